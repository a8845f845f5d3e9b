"""Stochastic PCG/ECG augmentation chain.

Randomness is separated from signal processing: :func:`draw_plan` consumes
the random stream and returns a JSON-ready description of every gate and
parameter, and :func:`apply_plan` turns a record plus a plan into the
augmented record without touching any random stream. Replaying a logged
plan therefore reproduces the output exactly.

PCG chain: HPSS, noise, time stretch, amplitude modulation, noise,
parametric EQ, external noise. ECG chain: noise, baseline wander, time
stretch, parametric EQ, external noise. The stretch factor is shared.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .dsp import Signal, bandpass, normalize, resample
from .hpss import HpssPlan, apply_hpss_plan, draw_hpss_plan
from .records import PairedRecord
from .rng import RandomStream

PCG_STAGES = ("hpss", "noise_1", "stretch", "am", "noise_2", "eq", "ext_noise")
ECG_STAGES = ("noise", "wander", "stretch", "eq", "ext_noise")


class ConfigurationError(ValueError):
    """Raised for unusable augmentation settings, e.g. an empty noise bank."""


@dataclass(frozen=True)
class AugmentConfig:
    """Gate probabilities and parameter ranges of the augmentation chain."""

    pcg_hpss: float = 0.75
    pcg_noise: float = 0.075
    pcg_stretch: float = 0.75
    pcg_am: float = 0.75
    pcg_eq: float = 0.25
    pcg_ext_noise: float = 0.5
    ecg_noise: float = 0.075
    ecg_wander: float = 0.30
    ecg_stretch: float = 0.25
    ecg_eq: float = 0.25
    ecg_ext_noise: float = 0.5
    #: "pcg": shared gate pcg_stretch with a factor from pcg_stretch_factors;
    #: "ecg": gate ecg_stretch with a factor from ecg_stretch_range.
    stretch_rule: str = "pcg"
    noise_sigmas: tuple = (0.01, 0.001, 0.0001)
    noise_mean: tuple = (0.0, 0.1)
    pcg_stretch_factors: tuple = (1.004, 1.006)
    ecg_stretch_range: tuple = (1.0, 1.06)
    am_depth: tuple = (0.01, 0.25)
    wander_depth: tuple = (0.01, 0.2)
    fast_rate_hz: tuple = (0.05, 0.5)
    slow_rate_hz: tuple = (0.001, 0.05)
    phase: tuple = (0.0, 1.0)
    eq_bands: int = 5
    eq_bandwidth: tuple = (0.05, 0.20)
    eq_gain: tuple = (0.0, 1.0)
    pcg_eq_range_hz: tuple = (2.0, 500.0)
    ecg_eq_range_hz: tuple = (0.25, 100.0)
    ext_snr_db: tuple = (5.0, 20.0)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                object.__setattr__(self, f.name, tuple(v))
        for name in self.gate_names():
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name} must be a probability, got {p}")
        if self.stretch_rule not in ("pcg", "ecg"):
            raise ConfigurationError(f"stretch_rule must be 'pcg' or 'ecg', got {self.stretch_rule!r}")
        for name in ("noise_mean", "ecg_stretch_range", "am_depth", "wander_depth", "fast_rate_hz",
                     "slow_rate_hz", "phase", "eq_bandwidth", "eq_gain", "pcg_eq_range_hz",
                     "ecg_eq_range_hz", "ext_snr_db"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigurationError(f"{name} must be an increasing pair, got {(lo, hi)}")
        if not self.noise_sigmas or not self.pcg_stretch_factors:
            raise ConfigurationError("choice lists must not be empty")
        if self.eq_bands < 1:
            raise ConfigurationError("eq_bands must be positive")

    @classmethod
    def gate_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls) if f.type == "float")

    @classmethod
    def disabled(cls) -> "AugmentConfig":
        return cls(**{name: 0.0 for name in cls.gate_names()})

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigurationError(f"unknown augmentation keys: {', '.join(unknown)}")
        return cls(**d)


@dataclass
class ExternalNoiseBank:
    """Recorded noise clips grouped by kind (``"pcg"``, ``"ecg"``)."""

    clips: dict = field(default_factory=dict)

    def __post_init__(self):
        for kind, clips in self.clips.items():
            for clip in clips:
                if len(clip) == 0:
                    raise ConfigurationError(f"empty {kind} noise clip")

    def get(self, kind: str) -> list:
        return list(self.clips.get(kind, ()))


# -- individual stages ---------------------------------------------------------

def apply_gaussian_noise(signal: Signal, sigma: float, mu: float, seed: int) -> Signal:
    noise = np.random.default_rng(seed).normal(mu, sigma, len(signal)) if sigma > 0 else mu
    return signal.replace(signal.samples + noise)


def _draw_noise(rng: RandomStream, cfg: AugmentConfig) -> dict:
    return {"sigma": rng.choice(cfg.noise_sigmas), "mu": rng.uniform(*cfg.noise_mean),
            "seed": rng.seed_int()}


def add_gaussian_noise(signal: Signal, rng: RandomStream, config: AugmentConfig | None = None) -> Signal:
    """Add ``N(mu, sigma)`` noise, sigma from {1e-2, 1e-3, 1e-4} and mu from rand(0, 0.1)."""
    return apply_gaussian_noise(signal, **_draw_noise(rng, config or AugmentConfig()))


def time_stretch(signal: Signal, factor: float) -> Signal:
    """Lengthen by ``factor`` via band-limited resampling at an unchanged rate.

    Frequencies scale by ``1/factor``; the length becomes
    ``round(len * factor)``.
    """
    if not 1.0 <= factor <= 1.1:
        raise ValueError(f"stretch factor must lie in [1.0, 1.1], got {factor}")
    if factor == 1.0:
        return signal.replace(signal.samples.copy())
    fs = signal.sample_rate_hz
    return Signal(resample(signal, fs * factor).samples, fs)


def _two_tone(t: np.ndarray, b1, c1, d1, b2, c2, d2) -> np.ndarray:
    return b1 * np.sin(2 * np.pi * c1 * t + d1) + b2 * np.sin(2 * np.pi * c2 * t + d2)


def apply_amplitude_modulation(signal: Signal, b1, c1, d1, b2, c2, d2) -> Signal:
    """``s(t) * (1 + b1 sin(2 pi c1 t + d1) + b2 sin(2 pi c2 t + d2))``, t in seconds."""
    return signal.replace(signal.samples * (1.0 + _two_tone(signal.times(), b1, c1, d1, b2, c2, d2)))


def apply_baseline_wander(signal: Signal, b1, c1, d1, b2, c2, d2) -> Signal:
    """``s(t) + b1 sin(2 pi c1 t + d1) + b2 sin(2 pi c2 t + d2)``, t in seconds."""
    return signal.replace(signal.samples + _two_tone(signal.times(), b1, c1, d1, b2, c2, d2))


def _draw_two_tone(rng: RandomStream, depth: tuple, cfg: AugmentConfig) -> dict:
    return {
        "b1": rng.uniform(*depth), "c1": rng.uniform(*cfg.fast_rate_hz), "d1": rng.uniform(*cfg.phase),
        "b2": rng.uniform(*depth), "c2": rng.uniform(*cfg.slow_rate_hz), "d2": rng.uniform(*cfg.phase),
    }


def amplitude_modulate(signal: Signal, rng: RandomStream, config: AugmentConfig | None = None) -> Signal:
    cfg = config or AugmentConfig()
    return apply_amplitude_modulation(signal, **_draw_two_tone(rng, cfg.am_depth, cfg))


def baseline_wander(signal: Signal, rng: RandomStream, config: AugmentConfig | None = None) -> Signal:
    cfg = config or AugmentConfig()
    return apply_baseline_wander(signal, **_draw_two_tone(rng, cfg.wander_depth, cfg))


def apply_parametric_eq(signal: Signal, bands) -> Signal:
    """Add ``gain * bandpass(signal, lo, hi)`` for every band, then normalise."""
    x = signal.samples
    out = x.copy()
    if np.any(x):
        for lo, hi, gain in bands:
            if gain != 0.0:
                out += gain * bandpass(signal, lo, hi).samples
    return normalize(signal.replace(out))


def draw_eq_bands(lo_hz: float, hi_hz: float, rng: RandomStream,
                  config: AugmentConfig | None = None) -> list[list[float]]:
    """Random sub-bands of ``[lo_hz, hi_hz]`` with widths of 5-20 % of the range."""
    cfg = config or AugmentConfig()
    span = hi_hz - lo_hz
    bands = []
    for _ in range(cfg.eq_bands):
        width = rng.uniform(*cfg.eq_bandwidth) * span
        start = rng.uniform(lo_hz, hi_hz - width)
        bands.append([start, start + width, rng.uniform(*cfg.eq_gain)])
    return bands


def parametric_eq(signal: Signal, lo_hz: float, hi_hz: float, rng: RandomStream,
                  config: AugmentConfig | None = None) -> Signal:
    return apply_parametric_eq(signal, draw_eq_bands(lo_hz, hi_hz, rng, config))


def noise_segment(clip: Signal, length: int, sample_rate_hz: float, offset: float) -> np.ndarray:
    """``length`` samples of ``clip`` at the given rate, starting at fraction
    ``offset`` of the clip and looping as needed."""
    if clip.sample_rate_hz != sample_rate_hz:
        clip = resample(clip, sample_rate_hz)
    c = clip.samples
    if c.size == 0:
        raise ConfigurationError("empty noise clip")
    start = int(offset * c.size) % c.size
    return c[(start + np.arange(length)) % c.size]


def scaled_noise(signal: Signal, clip: Signal, offset: float, snr_db: float) -> np.ndarray:
    """The clip segment scaled so that signal power over noise power is ``snr_db``."""
    noise = noise_segment(clip, len(signal), signal.sample_rate_hz, offset)
    p_signal = np.mean(signal.samples**2)
    p_noise = np.mean(noise**2)
    if p_noise == 0 or p_signal == 0 or np.isinf(snr_db):
        return np.zeros(len(signal))
    return noise * np.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0)))


def apply_external_noise(signal: Signal, clip: Signal, offset: float, snr_db: float) -> Signal:
    """Add :func:`scaled_noise` to the signal, then normalise."""
    return normalize(signal.replace(signal.samples + scaled_noise(signal, clip, offset, snr_db)))


def _draw_ext_noise(rng: RandomStream, cfg: AugmentConfig) -> dict:
    return {"clip": rng.random(), "offset": rng.random(), "snr_db": rng.uniform(*cfg.ext_snr_db)}


def _pick_clip(bank: ExternalNoiseBank | None, kind: str, u: float) -> Signal:
    clips = bank.get(kind) if bank is not None else []
    if not clips:
        raise ConfigurationError(f"noise bank has no {kind!r} clips")
    return clips[min(int(u * len(clips)), len(clips) - 1)]


def mix_external_noise(signal: Signal, bank: ExternalNoiseBank, kind: str, rng: RandomStream,
                       config: AugmentConfig | None = None) -> Signal:
    """Mix a random segment of a recorded noise clip at a random SNR in [5, 20] dB."""
    p = _draw_ext_noise(rng, config or AugmentConfig())
    clip = _pick_clip(bank, kind, p["clip"])
    return apply_external_noise(signal, clip, p["offset"], p["snr_db"])


# -- plan / apply --------------------------------------------------------------

def draw_plan(config: AugmentConfig, rng: RandomStream) -> dict:
    """Draw every gate and parameter of one augmentation.

    Each stage uses its own child stream, so a change to one stage's settings
    never shifts the draws of another.
    """
    def stage(channel, name, prob, drawer):
        r = rng.child(channel, name)
        fired = r.gate(prob)
        return {"stage": name, "fired": fired, "params": drawer(r) if fired else None}

    cfg = config
    r = rng.child("shared", "stretch")
    if cfg.stretch_rule == "pcg":
        fired = r.gate(cfg.pcg_stretch)
        factor = r.choice(cfg.pcg_stretch_factors) if fired else None
    else:
        fired = r.gate(cfg.ecg_stretch)
        factor = r.uniform(*cfg.ecg_stretch_range) if fired else None
    stretch = {"stage": "stretch", "fired": fired, "params": {"factor": factor} if fired else None}

    pcg = [
        stage("pcg", "hpss", cfg.pcg_hpss, lambda r: draw_hpss_plan(r).to_dict()),
        stage("pcg", "noise_1", cfg.pcg_noise, lambda r: _draw_noise(r, cfg)),
        stretch,
        stage("pcg", "am", cfg.pcg_am, lambda r: _draw_two_tone(r, cfg.am_depth, cfg)),
        stage("pcg", "noise_2", cfg.pcg_noise, lambda r: _draw_noise(r, cfg)),
        stage("pcg", "eq", cfg.pcg_eq, lambda r: {"bands": draw_eq_bands(*cfg.pcg_eq_range_hz, r, cfg)}),
        stage("pcg", "ext_noise", cfg.pcg_ext_noise, lambda r: _draw_ext_noise(r, cfg)),
    ]
    ecg = [
        stage("ecg", "noise", cfg.ecg_noise, lambda r: _draw_noise(r, cfg)),
        stage("ecg", "wander", cfg.ecg_wander, lambda r: _draw_two_tone(r, cfg.wander_depth, cfg)),
        stretch,
        stage("ecg", "eq", cfg.ecg_eq, lambda r: {"bands": draw_eq_bands(*cfg.ecg_eq_range_hz, r, cfg)}),
        stage("ecg", "ext_noise", cfg.ecg_ext_noise, lambda r: _draw_ext_noise(r, cfg)),
    ]
    return {"seed": rng.seed, "path": list(rng.path), "pcg": pcg, "ecg": ecg}


def _apply_stage(signal: Signal, stage: dict, kind: str, bank: ExternalNoiseBank | None) -> tuple[Signal, bool]:
    p = stage["params"]
    name = stage["stage"]
    if name == "hpss":
        return apply_hpss_plan(signal, HpssPlan.from_dict(p)), True
    if name.startswith("noise"):
        return apply_gaussian_noise(signal, p["sigma"], p["mu"], p["seed"]), True
    if name == "stretch":
        return time_stretch(signal, p["factor"]), True
    if name == "am":
        return apply_amplitude_modulation(signal, **p), True
    if name == "wander":
        return apply_baseline_wander(signal, **p), True
    if name == "eq":
        return apply_parametric_eq(signal, p["bands"]), True
    if name == "ext_noise":
        if bank is None or not bank.get(kind):
            return signal, False
        return apply_external_noise(signal, _pick_clip(bank, kind, p["clip"]), p["offset"], p["snr_db"]), True
    raise ValueError(f"unknown stage {name!r}")


def apply_chain(signal: Signal, stages: list, kind: str,
                bank: ExternalNoiseBank | None = None) -> tuple[Signal, list[str]]:
    """Run the fired stages in order; returns the signal and the stages applied."""
    applied = []
    for stage in stages:
        if stage["fired"]:
            signal, done = _apply_stage(signal, stage, kind, bank)
            if done:
                applied.append(stage["stage"])
    return signal, applied


def stretch_factor(plan: dict) -> float:
    for stage in plan["pcg"]:
        if stage["stage"] == "stretch" and stage["fired"]:
            return float(stage["params"]["factor"])
    return 1.0


def apply_plan(record: PairedRecord, plan: dict,
               bank: ExternalNoiseBank | None = None) -> tuple[PairedRecord, dict]:
    """Apply a drawn plan. Returns the new record and a log of applied stages.

    External-noise stages are skipped when the bank has no clip of the
    required kind; the log says so.
    """
    pcg, pcg_done = apply_chain(record.pcg, plan["pcg"], "pcg", bank)
    ecg, ecg_done = record.ecg, []
    if record.ecg is not None:
        ecg, ecg_done = apply_chain(record.ecg, plan["ecg"], "ecg", bank)
    factor = stretch_factor(plan)
    cycles = record.cycles
    if cycles is not None and factor != 1.0:
        cycles = cycles.scaled(factor)
    out = record.replace(pcg=pcg, ecg=ecg, cycles=cycles)
    return out, {"pcg": pcg_done, "ecg": ecg_done}


def augment_pair(record: PairedRecord, config: AugmentConfig, rng: RandomStream,
                 bank: ExternalNoiseBank | None = None) -> PairedRecord:
    """Augment a synchronised PCG/ECG record; both channels share one stretch."""
    return apply_plan(record, draw_plan(config, rng), bank)[0]
