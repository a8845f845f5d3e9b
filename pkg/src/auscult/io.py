"""WAV files, manifests, cycle annotations and prediction tables."""

from __future__ import annotations

import csv
import json
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .cycles import CycleBoundaries
from .dsp import Signal
from .records import LABELS, PairedRecord

MANIFEST_COLUMNS = ("id", "pcg", "ecg", "annotations", "label")


class WavFormatError(ValueError):
    """Base class for unreadable or unsupported WAV files."""


class MalformedWavError(WavFormatError):
    pass


class UnsupportedWavError(WavFormatError):
    pass


class ManifestError(ValueError):
    pass


def load_wav(path) -> Signal:
    """Read a mono PCM16 or IEEE float32 WAV file as a float64 signal.

    PCM samples are scaled by 1/32767 so that :func:`write_wav` round-trips.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except (wavfile.WavFileWarning, struct.error, EOFError) as exc:
        raise MalformedWavError(f"{path}: {exc}") from exc
    except ValueError as exc:
        msg = str(exc)
        if "format" in msg.lower() and "unknown" in msg.lower():
            raise UnsupportedWavError(f"{path}: {msg}") from exc
        raise MalformedWavError(f"{path}: {msg}") from exc
    if data.ndim != 1:
        raise UnsupportedWavError(f"{path}: expected mono audio, found {data.shape[1]} channels")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32767.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedWavError(f"{path}: unsupported sample type {data.dtype}")
    return Signal(samples, float(rate))


def write_wav(path, signal: Signal, encoding: str = "float32") -> None:
    """Write ``signal`` as mono ``"float32"`` or ``"pcm16"``; PCM is clipped to [-1, 1]."""
    rate = signal.sample_rate_hz
    if rate != int(rate):
        raise ValueError(f"WAV needs an integer sample rate, got {rate}")
    if encoding == "float32":
        data = signal.samples.astype(np.float32)
    elif encoding == "pcm16":
        data = np.round(np.clip(signal.samples, -1.0, 1.0) * 32767.0).astype(np.int16)
    else:
        raise ValueError(f"encoding must be 'float32' or 'pcm16', got {encoding!r}")
    wavfile.write(path, int(rate), data)


def write_json_atomic(path, payload) -> None:
    """Write JSON through a temporary file and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class ManifestRow:
    id: str
    pcg: Path
    ecg: Path | None
    annotations: Path | None
    label: str


def load_manifest(path) -> list[ManifestRow]:
    """Parse a ``id,pcg,ecg,annotations,label`` CSV.

    Relative paths are resolved against the manifest's directory. Errors name
    the offending line (the header is line 1).
    """
    path = Path(path)
    base = path.parent
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("id", "pcg", "label") if c not in (reader.fieldnames or [])]
        if missing:
            raise ManifestError(f"{path}: missing column(s) {', '.join(missing)}")
        rows, seen = [], set()
        for line, raw in enumerate(reader, start=2):
            rid = (raw.get("id") or "").strip()
            label = (raw.get("label") or "").strip()
            if not rid:
                raise ManifestError(f"{path}, line {line}: empty id")
            if rid in seen:
                raise ManifestError(f"{path}, line {line}: duplicate id {rid!r}")
            if label not in LABELS:
                raise ManifestError(f"{path}, line {line}: unknown label {label!r}")
            seen.add(rid)

            def resolve(key):
                value = (raw.get(key) or "").strip()
                return (base / value) if value else None

            if resolve("pcg") is None:
                raise ManifestError(f"{path}, line {line}: missing pcg path")
            rows.append(ManifestRow(rid, resolve("pcg"), resolve("ecg"), resolve("annotations"), label))
    return rows


def write_manifest(path, rows) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for r in rows:
            rel = [os.path.relpath(p, path.parent) if p else "" for p in (r.pcg, r.ecg, r.annotations)]
            w.writerow([r.id, *rel, r.label])


def load_cycles(path) -> CycleBoundaries:
    """One boundary sample index per line, strictly increasing."""
    values = []
    with open(path) as fh:
        for line, text in enumerate(fh, start=1):
            text = text.strip().split(",")[0].strip()
            if not text:
                continue
            try:
                v = int(text)
            except ValueError:
                if not values and line == 1:
                    continue  # header
                raise ManifestError(f"{path}, line {line}: not an integer: {text!r}") from None
            if values and v <= values[-1]:
                raise ManifestError(
                    f"{path}, line {line}: boundaries must be strictly increasing ({values[-1]} then {v})"
                )
            values.append(v)
    return CycleBoundaries(np.array(values, dtype=np.int64))


def write_cycles(path, bounds: CycleBoundaries) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{int(i)}\n" for i in bounds.indices)


def load_record(row: ManifestRow) -> PairedRecord:
    for p in (row.pcg, row.ecg, row.annotations):
        if p is not None and not p.exists():
            raise ManifestError(f"record {row.id}: file not found: {p}")
    return PairedRecord(
        id=row.id,
        pcg=load_wav(row.pcg),
        ecg=load_wav(row.ecg) if row.ecg else None,
        label=row.label,
        cycles=load_cycles(row.annotations) if row.annotations else None,
        provenance=str(row.pcg),
    )


def read_table(path) -> dict[str, list[str]]:
    """Two-column ``id,value`` CSV with a header; repeated ids collect values."""
    out: dict[str, list[str]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ManifestError(f"{path}: expected a header with id and value columns")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ManifestError(f"{path}, line {line}: expected two columns")
            out.setdefault(row[0].strip(), []).append(row[1].strip())
    return out
