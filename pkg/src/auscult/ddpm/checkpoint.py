"""Flat binary checkpoints.

Layout: the magic bytes ``AUSCKPT1``, a little-endian uint64 header length, a
UTF-8 JSON header, then the raw little-endian float32 tensor data. The header
lists hyper-parameters and, for each tensor, its name, shape and byte offset
into the data block.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
import torch

from .denoiser import ToyDenoiser

MAGIC = b"AUSCKPT1"


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, model: ToyDenoiser, extra: dict | None = None) -> None:
    tensors, blobs, offset = [], [], 0
    for name, value in model.state_dict().items():
        arr = value.detach().cpu().numpy().astype("<f4")
        tensors.append({"name": name, "shape": list(arr.shape), "offset": offset})
        blob = arr.tobytes(order="C")
        blobs.append(blob)
        offset += len(blob)
    header = json.dumps({"hparams": model.hparams, "tensors": tensors, "extra": extra or {}},
                        sort_keys=True).encode()
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "wb") as fh:
        fh.write(MAGIC + struct.pack("<Q", len(header)) + header)
        for blob in blobs:
            fh.write(blob)
    os.replace(tmp, path)


def read_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    (n,) = struct.unpack("<Q", data[8:16])
    try:
        header = json.loads(data[16:16 + n])
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: corrupt header") from exc
    body = memoryview(data)[16 + n:]
    arrays = {}
    for t in header["tensors"]:
        count = int(np.prod(t["shape"], dtype=np.int64))
        end = t["offset"] + 4 * count
        if end > len(body):
            raise CheckpointError(f"{path}: truncated tensor {t['name']}")
        arrays[t["name"]] = np.frombuffer(body[t["offset"]:end], dtype="<f4").reshape(t["shape"]).copy()
    return header, arrays


def load_checkpoint(path) -> tuple[ToyDenoiser, dict]:
    """Rebuild the denoiser; returns ``(model, extra)``."""
    header, arrays = read_checkpoint(path)
    model = ToyDenoiser(**header["hparams"])
    state = model.state_dict()
    if set(state) != set(arrays):
        raise CheckpointError(f"{path}: tensor names do not match the architecture")
    model.load_state_dict({k: torch.from_numpy(v) for k, v in arrays.items()})
    model.eval()
    return model, header.get("extra", {})
