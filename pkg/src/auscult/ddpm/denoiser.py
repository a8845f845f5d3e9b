"""A small dilated-convolution epsilon predictor.

Four gated residual layers with dilations 1, 2, 4, 8 and 32 channels. Each
layer receives the mel conditioner (projected per frame, then repeated up to
the sample rate) and a 32-dimensional sinusoidal embedding of the noise
level, optionally summed with a learned label embedding.
"""

from __future__ import annotations

import math

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

LEVEL_SCALE = 5000.0


def level_embedding(level: torch.Tensor, dim: int) -> torch.Tensor:
    """Sinusoidal features of ``LEVEL_SCALE * sqrt(alpha_bar)``."""
    half = dim // 2
    freqs = torch.exp(-math.log(10000.0) * torch.arange(half, dtype=level.dtype) / max(half - 1, 1))
    arg = LEVEL_SCALE * level[:, None] * freqs[None, :]
    return torch.cat([torch.sin(arg), torch.cos(arg)], dim=1)


class ResidualLayer(nn.Module):
    def __init__(self, channels: int, dilation: int, n_mels: int, embed_dim: int, kernel_size: int = 3):
        super().__init__()
        self.dilated = nn.Conv1d(channels, 2 * channels, kernel_size, dilation=dilation,
                                 padding=dilation * (kernel_size - 1) // 2)
        self.embed = nn.Linear(embed_dim, 2 * channels)
        self.cond = nn.Conv1d(n_mels, 2 * channels, 1)
        self.out = nn.Conv1d(channels, 2 * channels, 1)

    def forward(self, h, emb, cond_frames, hop, length):
        cond = self.cond(cond_frames).repeat_interleave(hop, dim=2)[..., :length]
        z = self.dilated(h) + self.embed(emb)[..., None] + cond
        a, b = z.chunk(2, dim=1)
        g = torch.tanh(a) * torch.sigmoid(b)
        residual, skip = self.out(g).chunk(2, dim=1)
        return (h + residual) / math.sqrt(2.0), skip


class ToyDenoiser(nn.Module):
    """``eps_theta(y_t, mel, level, label)`` for waveforms of any length.

    Inputs are ``y`` of shape ``(B, L)``, ``mel`` of shape ``(B, frames,
    n_mels)`` covering at least ``L / hop`` frames, ``level`` of shape
    ``(B,)`` holding ``sqrt(alpha_bar)``, and optional integer ``label`` of
    shape ``(B,)``. The input is fed both raw and divided by
    ``sqrt(1 - level^2)``.
    """

    def __init__(self, channels: int = 32, dilations=(1, 2, 4, 8), n_mels: int = 80,
                 embed_dim: int = 32, n_labels: int = 3, hop: int = 256, zero_output: bool = True):
        super().__init__()
        self.hparams = {"channels": channels, "dilations": list(dilations), "n_mels": n_mels,
                        "embed_dim": embed_dim, "n_labels": n_labels, "hop": hop}
        self.hop = hop
        self.embed_dim = embed_dim
        self.input = nn.Conv1d(2, channels, 1)
        self.label_embedding = nn.Embedding(n_labels, embed_dim) if n_labels else None
        self.embed_mlp = nn.Sequential(nn.Linear(embed_dim, embed_dim), nn.SiLU(),
                                       nn.Linear(embed_dim, embed_dim), nn.SiLU())
        self.layers = nn.ModuleList(ResidualLayer(channels, d, n_mels, embed_dim) for d in dilations)
        self.output = nn.Conv1d(channels, 1, 1)
        if zero_output:
            nn.init.zeros_(self.output.weight)
            nn.init.zeros_(self.output.bias)

    def forward(self, y, mel, level, label=None):
        length = y.shape[-1]
        scale = torch.rsqrt(torch.clamp(1.0 - level**2, min=1e-4))
        h = self.input(torch.stack([y, y * scale[:, None]], dim=1))
        emb = level_embedding(level, self.embed_dim)
        if label is not None and self.label_embedding is not None:
            emb = emb + self.label_embedding(label)
        emb = self.embed_mlp(emb)
        cond_frames = mel.transpose(1, 2)
        skips = 0.0
        for layer in self.layers:
            h, skip = layer(h, emb, cond_frames, self.hop, length)
            skips = skips + skip
        return self.output(h + skips / math.sqrt(len(self.layers)))[:, 0]


def build_denoiser(seed: int, **hparams) -> ToyDenoiser:
    """Construct a denoiser whose initial weights depend only on ``seed``."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return ToyDenoiser(**hparams)


def log_mel(bands: np.ndarray) -> np.ndarray:
    """Compress mel power for use as a conditioner."""
    return (np.log10(np.maximum(bands, 1e-5)) + 1.0) / 4.0


class EpsilonPredictor:
    """Numpy adapter: ``predictor(y_t, mel_bands, level) -> eps_hat`` for one waveform."""

    def __init__(self, model: ToyDenoiser, label: int | None = None):
        self.model = model
        self.label = None if label is None else int(label)

    @torch.no_grad()
    def __call__(self, y_t, conditioner, level):
        dtype = next(self.model.parameters()).dtype
        bands = getattr(conditioner, "bands", conditioner)
        y = torch.as_tensor(np.asarray(y_t), dtype=dtype)[None]
        frames = pad_frames(log_mel(np.asarray(bands)), conditioner_frames(y.shape[-1], self.model.hop))
        mel = torch.as_tensor(frames, dtype=dtype)[None]
        lvl = torch.tensor([level], dtype=dtype)
        lab = None if self.label is None else torch.tensor([self.label])
        return self.model(y, mel, lvl, lab)[0].double().numpy()


def conditioner_frames(length: int, hop: int) -> int:
    return -(-length // hop)


def pad_frames(mel: np.ndarray, frames: int) -> np.ndarray:
    if mel.shape[0] >= frames:
        return mel[:frames]
    return np.pad(mel, ((0, frames - mel.shape[0]), (0, 0)), mode="edge")


def l1_or_l2(pred, target, norm: str):
    return F.l1_loss(pred, target) if norm == "l1" else F.mse_loss(pred, target)
