"""Per-dataset session state loaded once at service startup.

The atlas, layout, and spectrum must all derive from the loaded cloud: the
atlas file's embedded checksum is verified against the cloud at load time.
Synthesis history is an append-only in-memory log guarded by a lock; reads of
cloud/atlas/layout/spectrum are lock-free (immutable after load).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..atlas import Atlas, atlas_from_dict
from ..errors import ParameterError
from ..geometry import PointCloud, cloud_checksum, load_point_cloud
from ..jsonutil import canonical_dumps, read_json
from ..msvd import estimate_dimension, export_spectrum, import_spectrum


@dataclass
class ServiceConfig:
    port: int = 8000
    cloud_path: str | None = None
    atlas_path: str | None = None
    spectrum_path: str | None = None
    decoder_url: str | None = None
    decoder_timeout_ms: int = 10000
    ui_dir: str | None = None  # built web UI served at /ui when set


@dataclass
class SessionState:
    cloud: PointCloud
    checksum: str
    atlas: Atlas
    atlas_bytes: bytes
    layout_bytes: bytes
    spectrum: dict
    decoder_url: str | None
    decoder_timeout_ms: int
    history: list = field(default_factory=list)
    vectors: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def record_synthesis(self, timestamp: float, chart_id: int, coeffs,
                         vector: np.ndarray) -> int:
        with self.lock:
            vector_id = len(self.history)
            self.history.append({
                "vector_id": vector_id,
                "timestamp": timestamp,
                "chart_id": chart_id,
                "coeffs": [float(c) for c in coeffs],
            })
            self.vectors[vector_id] = vector
            return vector_id


def load_session(config: ServiceConfig) -> SessionState:
    if not config.cloud_path:
        raise ParameterError("cloud_path is required")
    if not config.atlas_path:
        raise ParameterError("atlas_path is required")
    cloud = load_point_cloud(config.cloud_path)
    checksum = cloud_checksum(cloud)

    atlas_bytes = Path(config.atlas_path).read_bytes()
    doc = read_json(config.atlas_path)
    atlas = atlas_from_dict(doc)
    if atlas.cloud_checksum != checksum:
        raise ParameterError(
            f"atlas {config.atlas_path} was built from a different cloud "
            f"(checksum {atlas.cloud_checksum[:12]}... != {checksum[:12]}...)"
        )
    layout = doc.get("layout")
    if layout is None:
        raise ParameterError(
            f"atlas {config.atlas_path} has no layout block; run the layout step first"
        )
    layout_bytes = (canonical_dumps(layout) + "\n").encode("utf-8")

    if config.spectrum_path:
        spectrum = import_spectrum(config.spectrum_path)
    else:
        # no precomputed spectrum supplied: derive one with pipeline defaults
        table, estimate = estimate_dimension(cloud)
        import tempfile

        with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
            export_spectrum(table, estimate, tmp.name)
            spectrum = import_spectrum(tmp.name)
    return SessionState(
        cloud=cloud,
        checksum=checksum,
        atlas=atlas,
        atlas_bytes=atlas_bytes,
        layout_bytes=layout_bytes,
        spectrum=spectrum,
        decoder_url=config.decoder_url,
        decoder_timeout_ms=config.decoder_timeout_ms,
    )
