from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Training schedules as (T, beta_min, beta_max).
DIFFWAVE_SCHEDULE = (50, 1e-4, 5e-2)
WAVEGRAD_SCHEDULE = (1000, 1e-6, 1e-2)
#: Six-step inference betas used with the DiffWave preset.
DIFFWAVE_INFERENCE_BETAS = (1e-4, 1e-3, 1e-2, 5e-2, 2e-1, 5e-1)


@dataclass(frozen=True)
class NoiseSchedule:
    """Quantities derived from a beta sequence.

    Arrays are stored 0-based: ``alpha_bars[t - 1]`` is the cumulative
    product up to diffusion step ``t``.
    """

    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray
    beta_tildes: np.ndarray

    @classmethod
    def from_betas(cls, betas) -> "NoiseSchedule":
        betas = np.asarray(betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size == 0:
            raise ValueError("betas must be a non-empty sequence")
        if np.any(betas <= 0) or np.any(betas >= 1):
            raise ValueError("every beta must lie strictly between 0 and 1")
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas)
        prev = np.concatenate([[1.0], alpha_bars[:-1]])
        beta_tildes = betas.copy()
        beta_tildes[1:] = (1.0 - prev[1:]) / (1.0 - alpha_bars[1:]) * betas[1:]
        for a in (betas, alphas, alpha_bars, beta_tildes):
            a.setflags(write=False)
        return cls(betas, alphas, alpha_bars, beta_tildes)

    @property
    def T(self) -> int:
        return self.betas.size

    def _check(self, t: int) -> int:
        if not 1 <= t <= self.T:
            raise ValueError(f"diffusion step {t} outside 1..{self.T}")
        return t - 1

    def alpha_bar(self, t: int) -> float:
        return float(self.alpha_bars[self._check(t)])

    def noise_level(self, t: int) -> float:
        """``sqrt(alpha_bar_t)``, the continuous level the denoiser is conditioned on."""
        return float(np.sqrt(self.alpha_bars[self._check(t)]))

    def sigma(self, t: int) -> float:
        """Standard deviation of the noise added by the reverse step at ``t``."""
        return float(np.sqrt(self.beta_tildes[self._check(t)]))


def make_linear_schedule(T: int, beta_min: float, beta_max: float) -> NoiseSchedule:
    """``T`` betas spaced linearly from ``beta_min`` to ``beta_max`` inclusive."""
    if T < 1:
        raise ValueError("T must be at least 1")
    if not 0 < beta_min <= beta_max < 1:
        raise ValueError(f"need 0 < beta_min <= beta_max < 1, got {beta_min}, {beta_max}")
    if T == 1:
        return NoiseSchedule.from_betas([beta_min])
    return NoiseSchedule.from_betas(np.linspace(beta_min, beta_max, T))


def diffwave_schedule() -> NoiseSchedule:
    return make_linear_schedule(*DIFFWAVE_SCHEDULE)


def wavegrad_schedule() -> NoiseSchedule:
    return make_linear_schedule(*WAVEGRAD_SCHEDULE)


def diffwave_inference_schedule() -> NoiseSchedule:
    return NoiseSchedule.from_betas(DIFFWAVE_INFERENCE_BETAS)
