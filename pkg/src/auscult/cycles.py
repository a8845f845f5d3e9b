"""Heart-cycle rearrangement joined with correlation-aware crossfades."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import UnivariateSpline

from .dsp import Signal
from .rng import RandomStream

OVERLAP = 40
VARIANCE_FLOOR = 1e-6
REARRANGE_PROBABILITY = 0.75
MODES = ("halves", "groups", "cycles")


@dataclass(frozen=True)
class CycleBoundaries:
    """Strictly increasing sample indices separating heart cycles.

    Cycle ``i`` spans ``[indices[i], indices[i + 1])``; samples before the
    first index and after the last are kept in place by rearrangement.
    """

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices)
        if idx.ndim != 1:
            raise ValueError("cycle boundaries must be one-dimensional")
        if idx.size and not np.issubdtype(idx.dtype, np.integer):
            if not np.all(idx == np.round(idx)):
                raise ValueError("cycle boundaries must be integer sample indices")
        idx = idx.astype(np.int64)
        if np.any(idx < 0):
            raise ValueError("cycle boundaries must be non-negative")
        bad = np.flatnonzero(np.diff(idx) <= 0)
        if bad.size:
            i = int(bad[0])
            raise ValueError(
                f"cycle boundaries must be strictly increasing: {idx[i]} then {idx[i + 1]}"
            )
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return self.indices.size

    @property
    def n_cycles(self) -> int:
        return max(0, self.indices.size - 1)

    def check_within(self, length: int) -> None:
        if self.indices.size and self.indices[-1] > length:
            raise ValueError(f"cycle boundary {self.indices[-1]} beyond signal length {length}")

    def scaled(self, factor: float) -> "CycleBoundaries":
        return CycleBoundaries(np.round(self.indices * factor).astype(np.int64))


def fade_linear(t):
    """Constant-voltage linear fade ``1/2 + t/2``."""
    return 0.5 + 0.5 * np.asarray(t, dtype=np.float64)


def fade_odd(t):
    t = np.asarray(t, dtype=np.float64)
    return 9.0 / 16.0 * np.sin(np.pi / 2.0 * t) + 1.0 / 16.0 * np.sin(3.0 * np.pi / 2.0 * t)


def fade_even(t, r: float):
    o = fade_odd(t)
    radicand = 1.0 / (2.0 * (1.0 + r)) - (1.0 - r) / (1.0 + r) * o**2
    # |o| <= 1/2 on [-1, 1] keeps this non-negative up to rounding
    assert np.all(radicand > -1e-12), "crossfade radicand negative"
    return np.sqrt(np.maximum(radicand, 0.0))


def fade_generalized(t, r: float):
    """Correlation-aware fade ``o(t) + e(t)``.

    Satisfies ``f(t)^2 + f(-t)^2 + 2 r f(t) f(-t) = 1``: constant power at
    ``r = 0``, constant voltage at ``r = 1``.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [0, 1], got {r}")
    return fade_odd(t) + fade_even(t, r)


def overlap_times(n: int = OVERLAP) -> np.ndarray:
    """Sample centres of an ``n``-sample overlap mapped onto (-1, 1)."""
    return -1.0 + (2.0 * np.arange(n) + 1.0) / n


def crossfade(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float | None]:
    """Blend the tail ``x`` of one segment into the head ``y`` of the next.

    Returns the blended samples and the clamped correlation used, or
    ``None`` when a low-variance window forced the linear fade.
    """
    t = overlap_times(x.size)
    if np.var(x) < VARIANCE_FLOOR or np.var(y) < VARIANCE_FLOOR:
        return fade_linear(t) * y + fade_linear(-t) * x, None
    r = float(np.clip(np.corrcoef(x, y)[0, 1], 0.0, 1.0))
    return fade_generalized(t, r) * y + fade_generalized(-t, r) * x, r


def smooth_double(v: np.ndarray) -> np.ndarray:
    """Cubic smoothing spline through ``v`` evaluated on twice as many points."""
    t = overlap_times(v.size)
    spline = UnivariateSpline(t, v, k=3, s=float(v.size))
    return spline(np.linspace(t[0], t[-1], 2 * v.size))


def splice(first: Signal, second: Signal, overlap: int = OVERLAP) -> Signal:
    """Join two segments through a crossfaded, spline-doubled overlap.

    Output is ``first[:-overlap]``, the doubled crossfade, then
    ``second[overlap:]``, so its length is ``len(first) + len(second)``.
    """
    if first.sample_rate_hz != second.sample_rate_hz:
        raise ValueError("segments must share a sample rate")
    if len(first) < overlap or len(second) < overlap:
        raise ValueError(f"both segments need at least {overlap} samples")
    a, b = first.samples, second.samples
    v, _ = crossfade(a[-overlap:], b[:overlap])
    joined = np.concatenate([a[:-overlap], smooth_double(v), b[overlap:]])
    return first.replace(joined)


def plan_rearrangement(n_cycles: int, rng: RandomStream, mode: str | None = None,
                       probability: float = REARRANGE_PROBABILITY) -> dict:
    """Draw a new cycle order.

    Returns ``{"applied": bool, "mode": str | None, "order": list[int]}``;
    ``order`` lists original cycle indices in output order.
    """
    identity = list(range(n_cycles))
    if n_cycles < 2:
        return {"applied": False, "mode": None, "order": identity}
    if mode is None:
        if not rng.gate(probability):
            return {"applied": False, "mode": None, "order": identity}
        mode = rng.choice(MODES)
    if mode == "halves":
        size = -(-n_cycles // 2)
        groups = [identity[:size], identity[size:]]
    elif mode == "groups":
        groups, i = [], 0
        while i < n_cycles:
            k = rng.randint(1, 4)
            groups.append(identity[i:i + k])
            i += k
    elif mode == "cycles":
        groups = [[i] for i in identity]
    else:
        raise ValueError(f"unknown rearrangement mode {mode!r}")
    order = [c for g in rng.permutation(len(groups)) for c in groups[g]]
    return {"applied": True, "mode": mode, "order": order}


def apply_rearrangement(signal: Signal, bounds: CycleBoundaries, order) -> Signal:
    """Reassemble ``signal`` with its cycles in ``order``, splicing every joint.

    Joints involving a piece shorter than twice the overlap are plain
    concatenations.
    """
    bounds.check_within(len(signal))
    idx = bounds.indices
    x = signal.samples
    if sorted(order) != list(range(bounds.n_cycles)):
        raise ValueError("order must be a permutation of the cycle indices")
    pieces = [x[:idx[0]]] if idx[0] > 0 else []
    pieces += [x[idx[i]:idx[i + 1]] for i in order]
    if idx[-1] < x.size:
        pieces.append(x[idx[-1]:])
    out = signal.replace(pieces[0])
    for p in pieces[1:]:
        nxt = signal.replace(p)
        if len(out) >= OVERLAP and len(p) >= 2 * OVERLAP:
            out = splice(out, nxt)
        else:
            out = out.replace(np.concatenate([out.samples, p]))
    return out


def rearranged_boundaries(bounds: CycleBoundaries, order) -> CycleBoundaries:
    """Boundaries of the output of :func:`apply_rearrangement`.

    Splicing preserves total length, so cycle ``order[j]`` keeps its length.
    """
    idx = bounds.indices
    lengths = np.diff(idx)[list(order)]
    return CycleBoundaries(np.concatenate([[idx[0]], idx[0] + np.cumsum(lengths)]))


def rearrange_cycles(signal: Signal, bounds: CycleBoundaries, rng: RandomStream,
                     mode: str | None = None) -> Signal:
    """Shuffle heart cycles with probability 0.75 using one of three modes.

    ``halves`` swaps two half-size groups, ``groups`` shuffles random runs of
    1-4 cycles and ``cycles`` shuffles every cycle. Passing ``mode`` forces
    the rearrangement to happen in that mode.
    """
    if bounds.n_cycles < 2:
        warnings.warn("fewer than two heart cycles; signal left unchanged", RuntimeWarning,
                      stacklevel=2)
        return signal
    plan = plan_rearrangement(bounds.n_cycles, rng, mode=mode)
    if not plan["applied"]:
        return signal
    return apply_rearrangement(signal, bounds, plan["order"])
