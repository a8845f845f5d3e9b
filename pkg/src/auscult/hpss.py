"""Median-filter harmonic/percussive separation and the two-stage HPSS augmentation."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .dsp import Signal, Spectrogram, istft, normalize, stft
from .rng import RandomStream

WINDOW_CHOICES = (512, 1024, 2048)
HOP_CHOICES = (16, 32, 64, 128)
ETA = 1e-10


@dataclass(frozen=True)
class HpssParams:
    """Thresholds and median half-lengths for one decomposition.

    ``ell_h`` counts frames (time direction), ``ell_p`` counts bins.
    """

    lambda_h: float
    lambda_p: float
    ell_h: int
    ell_p: int
    eta: float = ETA

    def __post_init__(self):
        if self.lambda_h < 1 or self.lambda_p < 1:
            raise ValueError("HPSS thresholds must be >= 1")
        if self.ell_h < 1 or self.ell_p < 1:
            raise ValueError("median half-lengths must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")


@dataclass(frozen=True)
class HpssWeights:
    a_hh: float
    a_hp: float
    a_ph: float
    a_pp: float


@dataclass(frozen=True)
class HpssConstruction:
    """One two-stage decomposition/reconstruction."""

    window_len: int
    hop: int
    first: HpssParams
    second_h: HpssParams
    second_p: HpssParams
    weights: HpssWeights


@dataclass(frozen=True)
class HpssPlan:
    """Every value drawn for one HPSS augmentation."""

    constructions: tuple[HpssConstruction, HpssConstruction]
    a_hpss: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "HpssPlan":
        cons = tuple(
            HpssConstruction(
                window_len=int(c["window_len"]),
                hop=int(c["hop"]),
                first=HpssParams(**c["first"]),
                second_h=HpssParams(**c["second_h"]),
                second_p=HpssParams(**c["second_p"]),
                weights=HpssWeights(**c["weights"]),
            )
            for c in d["constructions"]
        )
        return cls(constructions=cons, a_hpss=float(d["a_hpss"]))


def running_median(values: np.ndarray, ell: int, axis: int) -> np.ndarray:
    """Median over ``2*ell + 1`` neighbours along ``axis``.

    Near the edges the window shrinks to the cells that exist; no padding
    values enter the median.
    """
    values = np.asarray(values, dtype=np.float64)
    moved = np.moveaxis(values, axis, 0)
    n = moved.shape[0]
    rows = np.ascontiguousarray(moved.reshape(n, -1).T)
    # Edge-pad every row by ell and chain them into one 1-D array: scipy's
    # 1-D median path is much faster than an (L, 1) footprint, and no window
    # centred on a real sample reaches into a neighbouring row.
    padded = np.pad(rows, ((0, 0), (ell, ell)), mode="edge")
    filtered = ndimage.median_filter(padded.ravel(), size=2 * ell + 1, mode="nearest")
    out = filtered.reshape(padded.shape)[:, ell:ell + n]
    for i in list(range(min(ell, n))) + list(range(max(ell, n - ell), n)):
        out[:, i] = np.median(rows[:, max(0, i - ell):i + ell + 1], axis=1)
    return np.moveaxis(out.T.reshape(moved.shape), 0, axis)


def hpss_masks(magnitude: np.ndarray, params: HpssParams) -> tuple[np.ndarray, np.ndarray]:
    """Binary harmonic and percussive masks for a ``(frame, bin)`` magnitude array."""
    y_h = running_median(magnitude, params.ell_h, axis=0)
    y_p = running_median(magnitude, params.ell_p, axis=1)
    m_h = y_h / (y_p + params.eta) > params.lambda_h
    # disjoint in exact arithmetic; the guard absorbs rounding when lambda_p == 1
    m_p = (y_p / (y_h + params.eta) >= params.lambda_p) & ~m_h
    return m_h, m_p


def hpss_decompose(spec: Spectrogram, params: HpssParams) -> tuple[Spectrogram, Spectrogram]:
    """Split a complex spectrogram into harmonic and percussive parts.

    Masks come from the magnitudes and are applied to the complex cells so
    phase survives for the inverse transform. Cells that pass neither
    threshold (the residual) are dropped.
    """
    m_h, m_p = hpss_masks(np.abs(spec.bins), params)
    return spec.replace(spec.bins * m_h), spec.replace(spec.bins * m_p)


def _draw_params(rng: RandomStream, lambda_hi: float) -> HpssParams:
    return HpssParams(
        lambda_h=rng.uniform(1.0, lambda_hi),
        lambda_p=rng.uniform(1.0, lambda_hi),
        ell_h=rng.randint(5, 30),
        ell_p=rng.randint(5, 30),
    )


def draw_hpss_plan(rng: RandomStream) -> HpssPlan:
    constructions = []
    for _ in range(2):
        window_len = rng.choice(WINDOW_CHOICES)
        hop = rng.choice(HOP_CHOICES)
        first = _draw_params(rng, 2.0)
        second_h = _draw_params(rng, 4.0)
        second_p = _draw_params(rng, 4.0)
        weights = HpssWeights(*(rng.uniform(0.01, 10.0) for _ in range(4)))
        constructions.append(HpssConstruction(window_len, hop, first, second_h, second_p, weights))
    return HpssPlan(tuple(constructions), a_hpss=rng.uniform(0.01, 0.05))


def reconstruct_construction(signal: Signal, c: HpssConstruction) -> np.ndarray:
    """Weighted sum ``a_hh x_hh + a_hp x_hp + a_ph x_ph + a_pp x_pp`` for one construction."""
    spec = stft(signal, c.window_len, c.hop)
    x_h, x_p = hpss_decompose(spec, c.first)
    x_hh, x_hp = hpss_decompose(x_h, c.second_h)
    x_ph, x_pp = hpss_decompose(x_p, c.second_p)
    w = c.weights
    return (w.a_hh * istft(x_hh).samples + w.a_hp * istft(x_hp).samples
            + w.a_ph * istft(x_ph).samples + w.a_pp * istft(x_pp).samples)


def apply_hpss_plan(signal: Signal, plan: HpssPlan) -> Signal:
    if any(len(signal) < c.window_len for c in plan.constructions):
        warnings.warn(
            f"signal of {len(signal)} samples is shorter than the HPSS window; left unchanged",
            RuntimeWarning,
            stacklevel=2,
        )
        return signal
    if not np.any(signal.samples):
        return signal.replace(np.zeros(len(signal)))
    s1 = reconstruct_construction(signal, plan.constructions[0])
    s2 = reconstruct_construction(signal, plan.constructions[1])
    return normalize(signal.replace(s1 + plan.a_hpss * s2))


def hpss_reconstruct_two_stage(signal: Signal, rng: RandomStream) -> Signal:
    """Randomised two-stage HPSS augmentation, renormalised.

    Two independent constructions are built, each drawing its own window
    and hop, and combined as ``s1 + a_hpss * s2``.
    """
    return apply_hpss_plan(signal, draw_hpss_plan(rng))
