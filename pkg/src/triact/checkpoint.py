"""Deterministic tensor checkpoints.

Layout: one JSON header line (format tag, version, caller metadata, tensor
names and shapes in order), then the raw little-endian float64 payload of
every tensor concatenated in that order. Writing the same tensors twice
yields byte-identical files, which archive formats with embedded
timestamps would not.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["CheckpointError", "save_tensors", "load_tensors"]

FORMAT_TAG = "triact-checkpoint"
FORMAT_VERSION = 1


class CheckpointError(RuntimeError):
    """The file is not a readable checkpoint of a supported version."""


def save_tensors(path: str | Path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    header = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "meta": meta or {},
        "tensors": [{"name": k, "shape": list(v.shape)} for k, v in tensors.items()],
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        for v in tensors.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def load_tensors(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    with open(path, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"{path}: not a checkpoint file") from exc
        if not isinstance(header, dict) or header.get("format") != FORMAT_TAG:
            raise CheckpointError(f"{path}: not a checkpoint file")
        if header.get("version") != FORMAT_VERSION:
            raise CheckpointError(
                f"{path}: unsupported checkpoint version {header.get('version')!r}")
        tensors: dict[str, np.ndarray] = {}
        for entry in header.get("tensors", []):
            shape = tuple(int(s) for s in entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise CheckpointError(f"{path}: truncated tensor {entry['name']!r}")
            tensors[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        if fh.read(1):
            raise CheckpointError(f"{path}: trailing bytes after payload")
    return tensors, header.get("meta", {})
