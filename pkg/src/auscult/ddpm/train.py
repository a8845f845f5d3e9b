"""Desk-scale training of the toy denoiser on paired PCG/ECG records."""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field

import numpy as np
import torch

from ..cycles import CycleBoundaries, apply_rearrangement, plan_rearrangement
from ..dsp import Signal, bandpass, mel_spectrogram, normalize, resample
from ..records import LABELS, PairedRecord
from ..rng import RandomStream
from .denoiser import ToyDenoiser, build_denoiser, l1_or_l2, log_mel, pad_frames
from .diffusion import sample_noise_level_continuous
from .schedule import (
    DIFFWAVE_INFERENCE_BETAS,
    DIFFWAVE_SCHEDULE,
    WAVEGRAD_SCHEDULE,
    NoiseSchedule,
    make_linear_schedule,
)

PCG_BAND_HZ = (2.0, 500.0)
ECG_BAND_HZ = (0.25, 100.0)
PRESETS = {
    "diffwave": {"schedule": DIFFWAVE_SCHEDULE, "conditioning": "step"},
    "wavegrad": {"schedule": WAVEGRAD_SCHEDULE, "conditioning": "continuous"},
}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2e-4
    batch_size: int = 8
    norm: str = "l1"
    preset: str = "diffwave"
    steps: int = 2000
    crop_frames: int = 8
    eval_every: int = 100
    rearrange_probability: float = 0.75
    sample_rate_hz: float = 4000.0
    window_len: int = 1024
    hop: int = 256
    n_mels: int = 80
    channels: int = 32
    dilations: tuple = (1, 2, 4, 8)
    embed_dim: int = 32
    inference_betas: tuple = DIFFWAVE_INFERENCE_BETAS
    adam_betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if isinstance(getattr(self, f.name), list):
                object.__setattr__(self, f.name, tuple(getattr(self, f.name)))
        if self.preset not in PRESETS:
            raise ValueError(f"preset must be one of {sorted(PRESETS)}, got {self.preset!r}")
        if self.norm not in ("l1", "l2"):
            raise ValueError(f"norm must be 'l1' or 'l2', got {self.norm!r}")
        if self.batch_size < 1 or self.steps < 0 or self.crop_frames < 1 or self.eval_every < 1:
            raise ValueError("batch_size, crop_frames and eval_every must be positive; steps >= 0")
        if self.learning_rate < 0:
            raise ValueError("learning rate must be non-negative")

    @property
    def schedule(self) -> NoiseSchedule:
        return make_linear_schedule(*PRESETS[self.preset]["schedule"])

    @property
    def conditioning(self) -> str:
        return PRESETS[self.preset]["conditioning"]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        unknown = sorted(set(d) - {f.name for f in dataclasses.fields(cls)})
        if unknown:
            raise ValueError(f"unknown training keys: {', '.join(unknown)}")
        return cls(**d)


@dataclass
class TrainingItem:
    """A record band-passed, normalised and resampled to the conditioning rate."""

    pcg: np.ndarray
    ecg: np.ndarray
    cycles: CycleBoundaries | None
    label: int


@dataclass
class TrainResult:
    model: ToyDenoiser
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)  # (step, loss)
    initial_val: float = float("nan")
    best_val: float = float("nan")
    best_step: int = 0


def prepare_ecg(ecg: Signal, rate: float) -> Signal:
    return resample(normalize(bandpass(ecg, *ECG_BAND_HZ)), rate)


def prepare_pcg(pcg: Signal, rate: float) -> Signal:
    return resample(normalize(bandpass(pcg, *PCG_BAND_HZ)), rate)


def prepare_item(record: PairedRecord, config: TrainConfig) -> TrainingItem:
    if record.ecg is None:
        raise ValueError(f"record {record.id} has no ECG to condition on")
    rate = config.sample_rate_hz
    pcg = prepare_pcg(record.pcg, rate).samples
    ecg = prepare_ecg(record.ecg, rate).samples
    n = min(pcg.size, ecg.size)
    cycles = None
    if record.cycles is not None and record.cycles.n_cycles >= 2:
        scaled = np.minimum(np.round(record.cycles.indices * rate / record.pcg.sample_rate_hz), n)
        scaled = np.unique(scaled.astype(np.int64))
        if scaled.size >= 3:
            cycles = CycleBoundaries(scaled)
    return TrainingItem(pcg[:n], ecg[:n], cycles, LABELS.index(record.label))


def _crop(item: TrainingItem, pcg: np.ndarray, ecg: np.ndarray, config: TrainConfig,
          rng: RandomStream) -> tuple[np.ndarray, np.ndarray]:
    hop, frames = config.hop, config.crop_frames
    mel = log_mel(mel_spectrogram(Signal(ecg, config.sample_rate_hz), config.sample_rate_hz,
                                  config.window_len, hop, config.n_mels).bands)
    avail = max(0, pcg.size // hop - frames)
    f0 = rng.randint(0, avail)
    y0 = np.zeros(frames * hop)
    seg = pcg[f0 * hop:(f0 + frames) * hop]
    y0[:seg.size] = seg
    return y0, pad_frames(mel[f0:], frames)


def collate(items: list[TrainingItem], config: TrainConfig, rng: RandomStream,
            rearrange: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Crop a batch, first shuffling heart cycles of each record with probability 0.75.

    PCG and ECG are rearranged with the same cycle order so they stay aligned.
    """
    ys, mels, labels = [], [], []
    for j, item in enumerate(items):
        r = rng.child("item", j)
        pcg, ecg = item.pcg, item.ecg
        if rearrange and item.cycles is not None:
            plan = plan_rearrangement(item.cycles.n_cycles, r.child("cycles"),
                                      probability=config.rearrange_probability)
            if plan["applied"]:
                rate = config.sample_rate_hz
                pcg = apply_rearrangement(Signal(pcg, rate), item.cycles, plan["order"]).samples
                ecg = apply_rearrangement(Signal(ecg, rate), item.cycles, plan["order"]).samples
        y0, mel = _crop(item, pcg, ecg, config, r.child("crop"))
        ys.append(y0)
        mels.append(mel)
        labels.append(item.label)
    return np.stack(ys), np.stack(mels), np.array(labels)


def draw_levels(n: int, schedule: NoiseSchedule, config: TrainConfig, rng: RandomStream) -> np.ndarray:
    """Per-example ``sqrt(alpha_bar)``: at a uniform step, or uniform within a step's bucket."""
    if config.conditioning == "continuous":
        return np.array([sample_noise_level_continuous(schedule, rng)[0] for _ in range(n)])
    return np.array([schedule.noise_level(rng.randint(1, schedule.T)) for _ in range(n)])


def _tensors(y0, mel, labels, levels, eps):
    f = torch.float32
    return (torch.as_tensor(y0, dtype=f), torch.as_tensor(mel, dtype=f), torch.as_tensor(labels),
            torch.as_tensor(levels, dtype=f), torch.as_tensor(eps, dtype=f))


def diffusion_loss(model: ToyDenoiser, y0, mel, labels, levels, eps, norm: str):
    y_t = levels[:, None] * y0 + torch.sqrt(1.0 - levels[:, None] ** 2) * eps
    return l1_or_l2(model(y_t, mel, levels, labels), eps, norm)


def make_validation_batch(items, config: TrainConfig, rng: RandomStream, size: int | None = None):
    size = size or config.batch_size
    chosen = [items[i % len(items)] for i in range(size)]
    y0, mel, labels = collate(chosen, config, rng.child("batch"), rearrange=False)
    levels = draw_levels(size, config.schedule, config, rng.child("levels"))
    eps = rng.child("eps").normal(y0.shape)
    return _tensors(y0, mel, labels, levels, eps)


def train_toy_denoiser(dataset, config: TrainConfig, rng: RandomStream,
                       model: ToyDenoiser | None = None) -> TrainResult:
    """Fit the denoiser with Adam on the epsilon-prediction loss.

    ``dataset`` holds :class:`PairedRecord` or prepared :class:`TrainingItem`
    objects. When there are at least eight, every eighth is held out for the
    frozen validation batch. The returned model carries the weights with the
    lowest validation loss seen.
    """
    items = [d if isinstance(d, TrainingItem) else prepare_item(d, config) for d in dataset]
    if not items:
        raise ValueError("training set is empty")
    if len(items) >= 8:
        val_items = items[7::8]
        train_items = [it for i, it in enumerate(items) if i % 8 != 7]
    else:
        val_items = train_items = items
    schedule = config.schedule
    if model is None:
        model = build_denoiser(rng.child("init").seed_int() % 2**31, channels=config.channels,
                               dilations=config.dilations, n_mels=config.n_mels,
                               embed_dim=config.embed_dim, n_labels=len(LABELS), hop=config.hop)
    val = make_validation_batch(val_items, config, rng.child("validation"))
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate, betas=config.adam_betas,
                           eps=config.adam_eps)

    def evaluate():
        model.eval()
        with torch.no_grad():
            y0, mel, labels, levels, eps = val
            return float(diffusion_loss(model, y0, mel, labels, levels, eps, config.norm))

    result = TrainResult(model=model)
    result.initial_val = result.best_val = evaluate()
    result.val_losses.append((0, result.initial_val))
    best_state = copy.deepcopy(model.state_dict())
    for step in range(1, config.steps + 1):
        r = rng.child("step", step)
        picks = [train_items[r.randint(0, len(train_items) - 1)] for _ in range(config.batch_size)]
        y0, mel, labels = collate(picks, config, r.child("collate"))
        levels = draw_levels(config.batch_size, schedule, config, r.child("levels"))
        eps = r.child("eps").normal(y0.shape)
        model.train()
        loss = diffusion_loss(model, *_tensors(y0, mel, labels, levels, eps), config.norm)
        opt.zero_grad()
        loss.backward()
        opt.step()
        result.train_losses.append(loss.item())
        if step % config.eval_every == 0 or step == config.steps:
            v = evaluate()
            result.val_losses.append((step, v))
            if v < result.best_val:
                result.best_val, result.best_step = v, step
                best_state = copy.deepcopy(model.state_dict())
    model.load_state_dict(best_state)
    return result
