"""Per-record batch augmentation with replayable provenance.

Every copy of every record gets its own stream,
``RandomStream(seed).child("record", id).child("copy", k)``, so outputs do not
depend on processing order. :func:`plan_copy` consumes all randomness and
returns a JSON-ready sidecar; :func:`apply_copy` replays a sidecar without
any RNG.
"""

from __future__ import annotations

import numpy as np

from .augment import ExternalNoiseBank, apply_plan, draw_plan
from .config import INTERNAL_RATE_HZ, PipelineConfig
from .cycles import CycleBoundaries, apply_rearrangement, plan_rearrangement, rearranged_boundaries
from .dsp import Signal, resample
from .records import PairedRecord
from .rng import RandomStream


def record_stream(seed: int, record_id: str, copy: int) -> RandomStream:
    return RandomStream(seed).child("record", record_id).child("copy", copy)


def to_internal_rate(record: PairedRecord, rate: float = INTERNAL_RATE_HZ) -> tuple[PairedRecord, dict]:
    """Resample both channels to ``rate``; returns the record and a log of what changed."""
    log = {}
    pcg, ecg, cycles = record.pcg, record.ecg, record.cycles
    if pcg.sample_rate_hz != rate:
        log["pcg_resampled_from_hz"] = pcg.sample_rate_hz
        if cycles is not None:
            cycles = cycles.scaled(rate / pcg.sample_rate_hz)
        pcg = resample(pcg, rate)
    if ecg is not None and ecg.sample_rate_hz != rate:
        log["ecg_resampled_from_hz"] = ecg.sample_rate_hz
        ecg = resample(ecg, rate)
    if ecg is not None and len(ecg) != len(pcg):
        n = min(len(ecg), len(pcg))
        pcg, ecg = pcg.replace(pcg.samples[:n]), ecg.replace(ecg.samples[:n])
    if cycles is not None:
        idx = np.unique(np.minimum(cycles.indices, len(pcg)))
        cycles = CycleBoundaries(idx)
    return record.replace(pcg=pcg, ecg=ecg, cycles=cycles), log


def plan_copy(record: PairedRecord, config: PipelineConfig, seed: int, copy: int) -> dict:
    stream = record_stream(seed, record.id, copy)
    rearrange = None
    if config.rearrange.enabled and record.cycles is not None and record.cycles.n_cycles >= 2:
        rearrange = plan_rearrangement(record.cycles.n_cycles, stream.child("rearrange"),
                                       mode=config.rearrange.mode,
                                       probability=config.rearrange.probability)
    return {
        "seed": seed,
        "record": record.id,
        "copy": copy,
        "rearrange": rearrange,
        "augment": draw_plan(config.augment, stream.child("augment")),
    }


def apply_copy(record: PairedRecord, sidecar: dict,
               bank: ExternalNoiseBank | None = None) -> tuple[PairedRecord, dict]:
    """Apply cycle rearrangement (if planned) and then the augmentation chain."""
    r = sidecar.get("rearrange")
    if r and r["applied"]:
        order = r["order"]
        ecg = record.ecg
        if ecg is not None:
            ecg = apply_rearrangement(ecg, record.cycles, order)
        record = record.replace(
            pcg=apply_rearrangement(record.pcg, record.cycles, order),
            ecg=ecg,
            cycles=rearranged_boundaries(record.cycles, order),
        )
    out, applied = apply_plan(record, sidecar["augment"], bank)
    applied["rearranged"] = bool(r and r["applied"])
    return out, applied


def load_bank(paths: dict, loader) -> ExternalNoiseBank | None:
    """Build a noise bank from ``{"pcg": [...], "ecg": [...]}`` using ``loader(path) -> Signal``."""
    clips = {k: [resample(loader(p), INTERNAL_RATE_HZ) for p in v] for k, v in paths.items() if v}
    return ExternalNoiseBank(clips) if clips else None


def extract_fragments(signal: Signal, seconds: float, count: int) -> list[Signal]:
    """``count`` consecutive, non-overlapping fragments of ``seconds`` each from the start."""
    n = int(round(seconds * signal.sample_rate_hz))
    if n < 1 or count < 1:
        raise ValueError("fragment length and count must be positive")
    if n * count > len(signal):
        raise ValueError(f"signal of {signal.duration:.3f} s is too short for {count} x {seconds} s fragments")
    return [signal.replace(signal.samples[i * n:(i + 1) * n]) for i in range(count)]
