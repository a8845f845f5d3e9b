"""Synthetic PCG/ECG pairs with exactly known heart-cycle boundaries.

Pseudo-PCG: per cycle, damped 30-150 Hz tone bursts for S1 and S2, plus a
150-400 Hz noise murmur during systole for abnormal records. Pseudo-ECG:
Gaussian P, QRS and T waves. Cycle boundaries sit at diastole end, just
before the QRS complex.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .cycles import CycleBoundaries
from .dsp import Signal, bandpass, normalize
from .io import ManifestRow, write_cycles, write_manifest, write_wav
from .records import PairedRecord
from .rng import RandomStream

FIXTURE_RATE = 2000.0


def _burst(n: int, fs: float, start: float, freq: float, decay: float, amp: float) -> np.ndarray:
    t = np.arange(n) / fs - start
    env = np.where(t >= 0, np.exp(-np.clip(t, 0, None) / decay), 0.0)
    rise = np.clip(t / 0.004, 0.0, 1.0)
    return amp * env * rise * np.sin(2 * np.pi * freq * np.clip(t, 0, None))


def _gauss(n: int, fs: float, centre: float, width: float, amp: float) -> np.ndarray:
    t = np.arange(n) / fs
    return amp * np.exp(-0.5 * ((t - centre) / width) ** 2)


def synth_record(rng: RandomStream, record_id: str, label: str, seconds: float = 6.0,
                 fs: float = FIXTURE_RATE) -> PairedRecord:
    """One synthetic paired record; all randomness comes from ``rng``."""
    period = 60.0 / rng.uniform(60.0, 90.0)
    starts = [0.0]
    while starts[-1] + 2 * period <= seconds:
        starts.append(starts[-1] + period * rng.uniform(0.97, 1.03))
    n = int(round(starts[-1] * fs))
    pcg = np.zeros(n)
    ecg = np.zeros(n)
    s1_freq, s2_freq = rng.uniform(30.0, 90.0), rng.uniform(60.0, 150.0)
    systole = 0.3 * period + 0.05
    for start in starts[:-1]:
        s1 = start + 0.05
        s2 = s1 + systole
        pcg += _burst(n, fs, s1, s1_freq, 0.025, 1.0)
        pcg += _burst(n, fs, s1 + 0.012, 1.6 * s1_freq, 0.015, 0.4)
        pcg += _burst(n, fs, s2, s2_freq, 0.018, rng.uniform(0.5, 0.8))
        if label == "abnormal":
            seg = int(round((systole - 0.1) * fs))
            i0 = int(round((s1 + 0.07) * fs))
            noise = rng.normal(seg + 400)
            murmur = bandpass(Signal(noise, fs), 150.0, 400.0).samples[200:200 + seg]
            env = np.sin(np.pi * np.arange(seg) / seg)
            murmur = 0.4 * env * murmur / (np.max(np.abs(murmur)) + 1e-12)
            stop = min(n, i0 + seg)
            pcg[i0:stop] += murmur[: stop - i0]
        qrs = start + 0.03
        ecg += _gauss(n, fs, qrs - 0.16, 0.025, 0.15)
        ecg += _gauss(n, fs, qrs - 0.012, 0.006, -0.12)
        ecg += _gauss(n, fs, qrs, 0.008, 1.0)
        ecg += _gauss(n, fs, qrs + 0.014, 0.007, -0.25)
        ecg += _gauss(n, fs, qrs + 0.26, 0.04, 0.3)
    pcg += 0.002 * rng.normal(n)
    ecg += 0.002 * rng.normal(n)
    bounds = CycleBoundaries(np.round(np.array(starts) * fs).astype(np.int64))
    return PairedRecord(
        id=record_id,
        pcg=normalize(Signal(pcg, fs)),
        ecg=normalize(Signal(ecg, fs)),
        label=label,
        cycles=bounds,
        provenance="synthetic",
    )


def fixture_label(i: int) -> str:
    return "abnormal" if i % 2 else "normal"


def make_fixture_records(seed: int, count: int, seconds: float = 6.0) -> list[PairedRecord]:
    root = RandomStream(seed).child("fixtures")
    return [synth_record(root.child("record", i), f"fx{i:04d}", fixture_label(i), seconds)
            for i in range(count)]


def make_noise_clips(seed: int, count: int = 2, seconds: float = 10.0,
                     fs: float = FIXTURE_RATE) -> dict[str, list[Signal]]:
    """Stand-ins for recorded clinical PCG noise and ambulatory ECG noise."""
    root = RandomStream(seed).child("noise")
    n = int(seconds * fs)
    t = np.arange(n) / fs
    clips = {"pcg": [], "ecg": []}
    for i in range(count):
        r = root.child("pcg", i)
        rumble = np.cumsum(r.normal(n))
        rumble -= np.convolve(rumble, np.ones(401) / 401, mode="same")
        thumps = np.zeros(n)
        for _ in range(int(seconds)):
            thumps += _burst(n, fs, r.uniform(0, seconds), r.uniform(20, 60), 0.05, r.uniform(0.5, 1))
        hiss = bandpass(Signal(r.normal(n), fs), 200.0, 900.0).samples
        clips["pcg"].append(normalize(Signal(rumble / np.std(rumble) + 2 * thumps + hiss, fs)))
        r = root.child("ecg", i)
        wander = np.sin(2 * np.pi * r.uniform(0.1, 0.4) * t + r.uniform(0, 6.3))
        emg = bandpass(Signal(r.normal(n), fs), 20.0, 400.0).samples
        steps = np.cumsum(np.where(r.generator.random(n) < 1.0 / fs, r.normal(n), 0.0))
        clips["ecg"].append(normalize(Signal(wander + 0.3 * emg + 0.5 * steps, fs)))
    return clips


def make_fixtures(out_dir, seed: int, count: int, seconds: float = 6.0,
                  noise_clips: int = 2) -> Path:
    """Write WAVs, cycle annotations, noise clips and ``manifest.csv`` to ``out_dir``.

    Returns the manifest path. Identical arguments give byte-identical files.
    """
    out = Path(out_dir)
    for sub in ("pcg", "ecg", "cycles", "noise"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    rows = []
    for rec in make_fixture_records(seed, count, seconds):
        pcg, ecg, ann = out / "pcg" / f"{rec.id}.wav", out / "ecg" / f"{rec.id}.wav", out / "cycles" / f"{rec.id}.csv"
        write_wav(pcg, rec.pcg)
        write_wav(ecg, rec.ecg)
        write_cycles(ann, rec.cycles)
        rows.append(ManifestRow(rec.id, pcg, ecg, ann, rec.label))
    for kind, clips in make_noise_clips(seed, noise_clips).items():
        for i, clip in enumerate(clips):
            write_wav(out / "noise" / f"{kind}_{i:02d}.wav", clip)
    manifest = out / "manifest.csv"
    write_manifest(manifest, rows)
    return manifest


def chirp_tagged_cycles(n_cycles: int = 3, fs: float = FIXTURE_RATE,
                        cycle_seconds=(0.8, 0.9, 0.75)) -> tuple[Signal, CycleBoundaries]:
    """Cycles that each carry a distinct linear chirp, for tracking reordering."""
    pieces = []
    for i in range(n_cycles):
        dur = cycle_seconds[i % len(cycle_seconds)]
        n = int(round(dur * fs))
        t = np.arange(n) / fs
        f0, f1 = 60.0 + 120.0 * i, 150.0 + 160.0 * i
        k = (f1 - f0) / (0.6 * dur)
        active = (t >= 0.1 * dur) & (t < 0.7 * dur)
        tt = t - 0.1 * dur
        chirp = np.where(active, np.sin(2 * np.pi * (f0 * tt + 0.5 * k * tt**2)), 0.0)
        chirp *= np.sin(np.pi * np.clip(tt / (0.6 * dur), 0, 1)) ** 2
        pieces.append(chirp)
    lengths = [p.size for p in pieces]
    bounds = CycleBoundaries(np.concatenate([[0], np.cumsum(lengths)]))
    return Signal(np.concatenate(pieces), fs), bounds
