"""Pipeline configuration: defaults, a key=value config file, and flag merging."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ParameterError


@dataclass
class PipelineConfig:
    # shared
    seed: int = 0
    workers: int = 1
    # intrinsic-dimension estimation
    scales: int = 24
    centers: int = 64
    epsilon: float = 0.1
    quad_threshold: float = 0.25
    r_min: float | None = None
    r_max: float | None = None
    # atlas
    r: float | None = None
    dmax: int = 8
    # layout
    iterations: int = 300
    # evaluation
    global_d: int = 8
    bins: int = 40
    geodesic_k: int = 10
    # service
    port: int = 8000
    cloud_path: str | None = None
    atlas_path: str | None = None
    spectrum_path: str | None = None
    decoder_url: str | None = None
    decoder_timeout_ms: int = 10000
    ui_dir: str | None = None


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _parse_value(key: str, raw: str):
    ftype = _FIELD_TYPES[key]
    raw = raw.strip()
    if raw.lower() in ("none", ""):
        return None
    if ftype in ("int", int):
        return int(raw)
    if ftype in ("float", float, "float | None"):
        return float(raw)
    if ftype in ("int | None",):
        return int(raw)
    return raw


def load_config_file(path: str | Path) -> dict:
    """Parse KEY=VALUE lines ('#' comments allowed); keys mirror CLI flags."""
    overrides: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ParameterError(f"{path}: line {lineno}: expected KEY=VALUE")
        key, _, raw = text.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ParameterError(f"{path}: line {lineno}: unknown config key {key!r}")
        overrides[key] = _parse_value(key, raw)
    return overrides


def merge_config(file_overrides: dict | None = None, flag_overrides: dict | None = None) -> PipelineConfig:
    """Defaults < config file < command-line flags."""
    cfg = PipelineConfig()
    for source in (file_overrides or {}, flag_overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            setattr(cfg, key, value)
    return cfg
