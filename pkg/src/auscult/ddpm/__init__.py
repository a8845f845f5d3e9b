"""Diffusion schedules, sampling and a desk-scale conditional denoiser."""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .denoiser import EpsilonPredictor, ToyDenoiser, build_denoiser, level_embedding, log_mel
from .diffusion import (
    epsilon_loss,
    forward_diffuse,
    reverse_sample,
    reverse_step,
    sample_noise_level_continuous,
)
from .gradcheck import gradient_check
from .schedule import (
    DIFFWAVE_INFERENCE_BETAS,
    DIFFWAVE_SCHEDULE,
    WAVEGRAD_SCHEDULE,
    NoiseSchedule,
    diffwave_inference_schedule,
    diffwave_schedule,
    make_linear_schedule,
    wavegrad_schedule,
)
from .train import TrainConfig, TrainResult, TrainingItem, prepare_item, train_toy_denoiser

__all__ = [
    "CheckpointError", "DIFFWAVE_INFERENCE_BETAS", "DIFFWAVE_SCHEDULE", "EpsilonPredictor",
    "NoiseSchedule", "ToyDenoiser", "TrainConfig", "TrainResult", "TrainingItem", "WAVEGRAD_SCHEDULE",
    "build_denoiser", "diffwave_inference_schedule", "diffwave_schedule", "epsilon_loss",
    "forward_diffuse", "gradient_check", "level_embedding", "load_checkpoint", "log_mel",
    "make_linear_schedule", "prepare_item", "reverse_sample", "reverse_step",
    "sample_noise_level_continuous", "save_checkpoint", "train_toy_denoiser", "wavegrad_schedule",
]
