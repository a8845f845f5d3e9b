"""Named, splittable random streams.

A stream is identified by a master seed plus a path of labels. Children are
derived by hashing labels into the seed sequence, so the draws seen by one
record never depend on how many draws another record consumed or on the
order in which worker threads run.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_key(label) -> int:
    digest = hashlib.blake2b(str(label).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RandomStream:
    """Deterministic random source addressed by ``(seed, path)``.

    >>> a = RandomStream(7).child("record", "a0001")
    >>> b = RandomStream(7).child("record", "a0001")
    >>> a.uniform(0, 1) == b.uniform(0, 1)
    True
    """

    def __init__(self, seed: int, path: tuple = ()):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.path = tuple(str(p) for p in path)
        seq = np.random.SeedSequence(self.seed, spawn_key=tuple(_label_key(p) for p in self.path))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path!r})"

    def child(self, *labels) -> "RandomStream":
        """Independent stream whose draws depend only on ``(seed, path + labels)``."""
        return RandomStream(self.seed, self.path + tuple(str(x) for x in labels))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def random(self) -> float:
        return float(self._gen.random())

    def uniform(self, lo: float, hi: float) -> float:
        """``rand(lo, hi)``: a float drawn uniformly between the bounds."""
        return float(self._gen.uniform(lo, hi))

    def randint(self, lo: int, hi: int) -> int:
        """``randint(lo, hi)`` with both bounds included."""
        return int(self._gen.integers(lo, hi, endpoint=True))

    def choice(self, options):
        """One element of ``options`` with equal probability."""
        options = list(options)
        return options[int(self._gen.integers(len(options)))]

    def gate(self, probability: float) -> bool:
        return bool(self._gen.random() < probability)

    def normal(self, size, loc: float = 0.0, scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(loc, scale, size)

    def permutation(self, n: int) -> list[int]:
        return [int(i) for i in self._gen.permutation(n)]

    def seed_int(self) -> int:
        """A fresh 63-bit seed, for draws that must be replayable from a log."""
        return int(self._gen.integers(0, 2**63 - 1))
