"""Closed-form forward diffusion, epsilon losses and ancestral sampling."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..dsp import Signal
from ..rng import RandomStream
from .schedule import NoiseSchedule

#: ``denoiser(y_t, conditioner, noise_level) -> eps_hat`` with ``noise_level = sqrt(alpha_bar_t)``.
EpsilonModel = Callable[[np.ndarray, object, float], np.ndarray]


def forward_diffuse(y0, t: int, eps, schedule: NoiseSchedule):
    """``y_t = sqrt(alpha_bar_t) y0 + sqrt(1 - alpha_bar_t) eps``.

    Accepts arrays or :class:`Signal`; a Signal in gives a Signal out.
    """
    values = y0.samples if isinstance(y0, Signal) else np.asarray(y0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if eps.shape != values.shape:
        raise ValueError(f"noise shape {eps.shape} does not match signal shape {values.shape}")
    ab = schedule.alpha_bar(t)
    y_t = np.sqrt(ab) * values + np.sqrt(1.0 - ab) * eps
    return y0.replace(y_t) if isinstance(y0, Signal) else y_t


def epsilon_loss(eps_pred, eps_true, norm: str = "l1") -> float:
    """Mean absolute (``"l1"``) or squared (``"l2"``) prediction error."""
    eps_pred = np.asarray(eps_pred, dtype=np.float64)
    eps_true = np.asarray(eps_true, dtype=np.float64)
    if eps_pred.shape != eps_true.shape:
        raise ValueError(f"shape mismatch {eps_pred.shape} vs {eps_true.shape}")
    diff = eps_pred - eps_true
    if norm == "l1":
        return float(np.mean(np.abs(diff)))
    if norm == "l2":
        return float(np.mean(diff**2))
    raise ValueError(f"norm must be 'l1' or 'l2', got {norm!r}")


def reverse_step(y_t: np.ndarray, eps_hat: np.ndarray, t: int, schedule: NoiseSchedule,
                 z: np.ndarray | None = None) -> np.ndarray:
    """One ancestral update from ``y_t`` to ``y_{t-1}``; ``z=None`` adds no noise."""
    i = schedule._check(t)
    alpha, ab = schedule.alphas[i], schedule.alpha_bars[i]
    mean = (y_t - (1.0 - alpha) / np.sqrt(1.0 - ab) * eps_hat) / np.sqrt(alpha)
    if z is None:
        return mean
    return mean + np.sqrt(schedule.beta_tildes[i]) * z


def reverse_sample(denoiser: EpsilonModel, conditioner, schedule: NoiseSchedule, rng: RandomStream,
                   length: int, *, y_T: np.ndarray | None = None, noise_scale: float = 1.0) -> np.ndarray:
    """Generate ``y_0`` by running the reverse chain from ``t = T`` down to 1.

    ``noise_scale`` multiplies the per-step noise ``sigma_t z`` (0 gives the
    deterministic mean path). No noise is added at ``t = 1``.
    """
    y = rng.normal(length) if y_T is None else np.array(y_T, dtype=np.float64)
    if y.shape != (length,):
        raise ValueError(f"initial state must have shape ({length},)")
    for t in range(schedule.T, 0, -1):
        eps_hat = np.asarray(denoiser(y, conditioner, schedule.noise_level(t)), dtype=np.float64)
        z = None
        if t > 1 and noise_scale != 0.0:
            z = noise_scale * rng.normal(length)
        y = reverse_step(y, eps_hat, t, schedule, z)
    return y


def sample_noise_level_continuous(schedule: NoiseSchedule, rng: RandomStream) -> tuple[float, int]:
    """Draw a step ``t`` uniformly, then ``sqrt(alpha_bar)`` uniformly inside its bucket
    ``[sqrt(alpha_bar_t), sqrt(alpha_bar_{t-1})]`` (``alpha_bar_0 = 1``)."""
    if schedule.T < 2:
        raise ValueError("continuous noise levels need at least two steps")
    t = rng.randint(1, schedule.T)
    lower = np.sqrt(schedule.alpha_bars[t - 1])
    upper = 1.0 if t == 1 else np.sqrt(schedule.alpha_bars[t - 2])
    return rng.uniform(lower, upper), t
