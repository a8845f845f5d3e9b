"""Versioned JSON configuration for batch jobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .augment import AugmentConfig, ConfigurationError
from .cycles import MODES, REARRANGE_PROBABILITY
from .ddpm.train import TrainConfig

SCHEMA_VERSION = 1
INTERNAL_RATE_HZ = 2000.0


@dataclass(frozen=True)
class RearrangeConfig:
    enabled: bool = False
    probability: float = REARRANGE_PROBABILITY
    mode: str | None = None  # None draws one of MODES per record

    def __post_init__(self):
        if not isinstance(self.enabled, bool):
            raise ConfigurationError("rearrange.enabled must be true or false")
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigurationError(f"rearrange.probability must be a probability, got {self.probability}")
        if self.mode is not None and self.mode not in MODES:
            raise ConfigurationError(f"rearrange.mode must be one of {MODES} or null, got {self.mode!r}")


@dataclass(frozen=True)
class PipelineConfig:
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    rearrange: RearrangeConfig = field(default_factory=RearrangeConfig)
    seed: int | None = None
    out_dir: str | None = None
    copies: int = 1
    noise_bank: dict = field(default_factory=lambda: {"pcg": [], "ecg": []})
    version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.version != SCHEMA_VERSION:
            raise ConfigurationError(f"unsupported config version {self.version}; expected {SCHEMA_VERSION}")
        if not isinstance(self.copies, int) or self.copies < 1:
            raise ConfigurationError(f"copies must be a positive integer, got {self.copies!r}")
        if self.seed is not None and (not isinstance(self.seed, int) or not 0 <= self.seed < 2**64):
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        bad = sorted(set(self.noise_bank) - {"pcg", "ecg"})
        if bad:
            raise ConfigurationError(f"noise_bank keys must be 'pcg' or 'ecg', got {bad}")

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "copies": self.copies,
            "augment": self.augment.to_dict(),
            "train": self.train.to_dict(),
            "rearrange": {"enabled": self.rearrange.enabled, "probability": self.rearrange.probability,
                          "mode": self.rearrange.mode},
            "noise_bank": {k: [str(p) for p in v] for k, v in self.noise_bank.items()},
        }

    @classmethod
    def from_dict(cls, d: dict, base_dir=None) -> "PipelineConfig":
        """Validate a parsed document; relative noise-bank paths resolve against ``base_dir``."""
        if not isinstance(d, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {"version", "seed", "out_dir", "copies", "augment", "train", "rearrange", "noise_bank"}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        if "version" not in d:
            raise ConfigurationError("config is missing 'version'")
        rearrange = d.get("rearrange", {})
        extra = sorted(set(rearrange) - {"enabled", "probability", "mode"})
        if extra:
            raise ConfigurationError(f"unknown rearrange keys: {', '.join(extra)}")
        try:
            train = TrainConfig.from_dict(d.get("train", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(str(exc)) from exc
        bank = {"pcg": [], "ecg": []}
        for kind, paths in d.get("noise_bank", {}).items():
            if not isinstance(paths, list):
                raise ConfigurationError(f"noise_bank.{kind} must be a list of paths")
            base = Path(base_dir) if base_dir is not None else None
            bank[kind] = [str(base / p) if base is not None and not Path(p).is_absolute() else str(p)
                          for p in paths]
        try:
            return cls(
                augment=AugmentConfig.from_dict(d.get("augment", {})),
                train=train,
                rearrange=RearrangeConfig(**rearrange),
                seed=d.get("seed"),
                out_dir=d.get("out_dir"),
                copies=d.get("copies", 1),
                noise_bank=bank,
                version=d["version"],
            )
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from exc


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return PipelineConfig.from_dict(doc, base_dir=path.parent)


def save_config(path, config: PipelineConfig) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")
