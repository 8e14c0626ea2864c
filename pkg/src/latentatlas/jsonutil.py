"""Canonical JSON serialization so identical data always yields identical bytes."""

from __future__ import annotations

import json
from pathlib import Path


def canonical_dumps(obj) -> str:
    """Serialize with sorted keys, fixed separators, and no NaN/Inf literals."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_canonical_json(obj, path: str | Path) -> bytes:
    data = (canonical_dumps(obj) + "\n").encode("utf-8")
    Path(path).write_bytes(data)
    return data


def read_json(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
