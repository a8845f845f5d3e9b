"""Finite-difference check of analytic parameter gradients."""

from __future__ import annotations

import copy
from typing import Callable

import numpy as np
import torch
from torch import nn

from ..rng import RandomStream


def gradient_check(model: nn.Module, loss_fn: Callable[[nn.Module], torch.Tensor], rng: RandomStream,
                   n_params: int = 100, step: float = 1e-4, floor: float = 1e-6,
                   analytic: Callable[[nn.Module], dict] | None = None) -> float:
    """Largest relative error between analytic and central-difference gradients.

    Runs on a float64 copy of ``model``. ``loss_fn(model)`` evaluates the
    scalar loss on a fixed probe batch. Each sampled parameter is perturbed by
    ``step * max(1, |theta|)``. ``analytic`` can replace autograd: it gets the
    copy and returns ``{name: gradient tensor}``.
    """
    probe = copy.deepcopy(model).double()
    params = dict(probe.named_parameters())
    if analytic is None:
        probe.zero_grad()
        loss_fn(probe).backward()
        grads = {k: p.grad.detach().clone() for k, p in params.items() if p.grad is not None}
    else:
        grads = {k: g.detach().double() for k, g in analytic(probe).items()}
    names = [k for k in params if k in grads]
    sizes = np.array([params[k].numel() for k in names])
    total = int(sizes.sum())
    picks = rng.generator.choice(total, size=min(n_params, total), replace=False)
    starts = np.concatenate([[0], np.cumsum(sizes)])
    worst = 0.0
    with torch.no_grad():
        for flat in np.sort(picks):
            j = int(np.searchsorted(starts, flat, side="right") - 1)
            name, idx = names[j], int(flat - starts[j])
            theta = params[name].view(-1)
            orig = float(theta[idx])
            h = step * max(1.0, abs(orig))
            theta[idx] = orig + h
            up = float(loss_fn(probe))
            theta[idx] = orig - h
            down = float(loss_fn(probe))
            theta[idx] = orig
            fd = (up - down) / (2 * h)
            a = float(grads[name].reshape(-1)[idx])
            worst = max(worst, abs(a - fd) / max(abs(fd), floor))
    return worst
