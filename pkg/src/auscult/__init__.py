"""Augmentation and conditional synthesis tools for paired PCG/ECG recordings."""

__version__ = "0.1.0"

from .augment import AugmentConfig, ConfigurationError, ExternalNoiseBank, augment_pair, apply_plan, draw_plan
from .cycles import CycleBoundaries, crossfade, fade_generalized, rearrange_cycles, splice
from .dsp import (
    InvalidBandError,
    MelSpectrogram,
    Signal,
    Spectrogram,
    bandpass,
    istft,
    mel_spectrogram,
    normalize,
    resample,
    stft,
)
from .hpss import HpssParams, hpss_decompose, hpss_reconstruct_two_stage
from .metrics import ConfusionMatrix, MetricsReport, aggregate_subject, compute_metrics
from .records import PairedRecord
from .rng import RandomStream

__all__ = [
    "AugmentConfig", "ConfigurationError", "ConfusionMatrix", "CycleBoundaries", "ExternalNoiseBank",
    "HpssParams", "InvalidBandError", "MelSpectrogram", "MetricsReport", "PairedRecord", "RandomStream",
    "Signal", "Spectrogram", "aggregate_subject", "apply_plan", "augment_pair", "bandpass",
    "compute_metrics", "crossfade", "draw_plan", "fade_generalized", "hpss_decompose",
    "hpss_reconstruct_two_stage", "istft", "mel_spectrogram", "normalize", "rearrange_cycles",
    "resample", "splice", "stft",
]
