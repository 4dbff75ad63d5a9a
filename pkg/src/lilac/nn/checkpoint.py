"""Versioned checkpoint container.

Layout: a magic line, a canonical-JSON header (config + ordered tensor
manifest), then the raw little-endian float64 bytes of each tensor in
manifest order. Canonical JSON (sorted keys, fixed separators) makes
save -> load -> save byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

MAGIC = b"LILAC-CKPT v1\n"


def _canonical(header: dict) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode() + b"\n"


def save_checkpoint(path, kind: str, config: dict, tensors: dict[str, np.ndarray],
                    meta: dict | None = None) -> None:
    names = sorted(tensors)
    header = {
        "version": 1,
        "kind": kind,
        "config": config,
        "meta": meta or {},
        "tensors": [{"name": n, "shape": list(tensors[n].shape)} for n in names],
    }
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_canonical(header))
        for n in names:
            f.write(np.ascontiguousarray(tensors[n], dtype="<f8").tobytes())


def load_checkpoint(path):
    """Returns (kind, config, tensors, meta)."""
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ValueError(f"{path}: not a checkpoint file")
    body = raw[len(MAGIC):]
    nl = body.index(b"\n")
    header = json.loads(body[: nl + 1])
    if header.get("version") != 1:
        raise ValueError(f"unsupported checkpoint version {header.get('version')}")
    offset = nl + 1
    tensors: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(body, dtype="<f8", count=count, offset=offset)
        tensors[entry["name"]] = arr.reshape(shape).astype(np.float64)
        offset += count * 8
    if offset != len(body):
        raise ValueError("checkpoint has trailing bytes")
    return header["kind"], header["config"], tensors, header["meta"]
