"""FastAPI application around one loaded session.

Read endpoints are side-effect-free and serve the exact serialized bytes for
atlas/layout. Synthesis appends to the session history; decoding proxies the
vector to an external decoder endpoint when one is configured and otherwise
renders a deterministic SVG glyph from the vector's first two coordinates so
the UI stays operable on synthetic data.
"""

from __future__ import annotations

import time

import httpx
import numpy as np
from fastapi import FastAPI, HTTPException, Response

from .. import SCHEMA_VERSION
from ..atlas import chart_to_ambient
from .schemas import (
    ChartResponse,
    DecodeRequest,
    GridSampling,
    HealthResponse,
    HistoryEntry,
    HistoryResponse,
    SpectrumResponse,
    SynthesizeRequest,
    SynthesizeResponse,
)
from .state import ServiceConfig, SessionState, load_session

GRID_STEPS = 5
GRID_EXTENT_SIGMAS = 2.0


def placeholder_glyph(vector: np.ndarray) -> bytes:
    """Deterministic SVG stand-in for a decoder: the first two coordinates
    position a dot and set its hue."""
    x = float(vector[0])
    y = float(vector[1]) if len(vector) > 1 else 0.0
    cx = 50.0 + 40.0 * np.tanh(x)
    cy = 50.0 + 40.0 * np.tanh(y)
    hue = int(abs(x) * 997.0 + abs(y) * 131.0) % 360
    svg = (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100" '
        'width="100" height="100">'
        f'<rect width="100" height="100" fill="hsl({hue},35%,92%)"/>'
        f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="12" fill="hsl({hue},70%,45%)"/>'
        "</svg>"
    )
    return svg.encode("utf-8")


def create_app(state: SessionState, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="latentatlas", version=SCHEMA_VERSION)
    app.state.session = state
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            schema_version=SCHEMA_VERSION,
            n_points=state.cloud.n_points,
            n_charts=len(state.atlas.charts),
            decoder_configured=state.decoder_url is not None,
        )

    @app.get("/api/atlas")
    def atlas_document() -> Response:
        # exact bytes of the serialized atlas file
        return Response(content=state.atlas_bytes, media_type="application/json")

    @app.get("/api/layout")
    def layout_document() -> Response:
        return Response(content=state.layout_bytes, media_type="application/json")

    @app.get("/api/spectrum", response_model=SpectrumResponse)
    def spectrum() -> SpectrumResponse:
        spec = state.spectrum
        return SpectrumResponse(
            schema_version=SCHEMA_VERSION,
            radii=[float(r) for r in spec["radii"]],
            sigma=[[float(v) for v in row] for row in spec["sigma"]],
            classification=spec.get("classification"),
            optimal_range=spec.get("optimal_range"),
        )

    @app.get("/api/chart/{chart_id}", response_model=ChartResponse)
    def chart_detail(chart_id: int) -> ChartResponse:
        if not 0 <= chart_id < len(state.atlas.charts):
            raise HTTPException(status_code=404, detail=f"no chart with id {chart_id}")
        chart = state.atlas.charts[chart_id]
        member_rows = state.cloud.rows_for(chart.members)
        coords = (state.cloud.points[member_rows] - chart.mean) @ chart.basis.T
        return ChartResponse(
            schema_version=SCHEMA_VERSION,
            chart_id=chart.chart_id,
            center_id=int(chart.center_id),
            radius=float(chart.radius),
            d=chart.d,
            members=[int(p) for p in chart.members],
            member_coords=[[float(v) for v in row] for row in coords],
            mean=[float(v) for v in chart.mean],
            basis=[[float(v) for v in row] for row in chart.basis],
            sing_values=[float(v) for v in chart.sing_values],
            grid_sampling=GridSampling(
                steps=GRID_STEPS,
                extent_sigmas=GRID_EXTENT_SIGMAS,
                axis_scales=[float(v) for v in chart.sing_values],
            ),
        )

    @app.post("/api/synthesize", response_model=SynthesizeResponse)
    def synthesize(request: SynthesizeRequest) -> SynthesizeResponse:
        if not 0 <= request.chart_id < len(state.atlas.charts):
            raise HTTPException(status_code=404, detail=f"no chart with id {request.chart_id}")
        chart = state.atlas.charts[request.chart_id]
        if len(request.coeffs) != chart.d:
            raise HTTPException(
                status_code=422,
                detail=f"chart {chart.chart_id} has d={chart.d} local dimensions; "
                       f"got {len(request.coeffs)} coefficients",
            )
        vector = chart_to_ambient(chart, np.array(request.coeffs, dtype=np.float64))
        vector_id = state.record_synthesis(time.time(), chart.chart_id,
                                           request.coeffs, vector)
        return SynthesizeResponse(vector=[float(v) for v in vector], vector_id=vector_id)

    @app.post("/api/decode")
    def decode(request: DecodeRequest) -> Response:
        if (request.vector is None) == (request.vector_id is None):
            raise HTTPException(status_code=422,
                                detail="provide exactly one of vector or vector_id")
        if request.vector_id is not None:
            vector = state.vectors.get(request.vector_id)
            if vector is None:
                raise HTTPException(status_code=404,
                                    detail=f"unknown vector_id {request.vector_id}")
        else:
            vector = np.asarray(request.vector, dtype=np.float64)
            if len(vector) != state.cloud.dim:
                raise HTTPException(
                    status_code=422,
                    detail=f"vector length {len(vector)} != ambient dimension {state.cloud.dim}",
                )
        if state.decoder_url is None:
            return Response(content=placeholder_glyph(vector), media_type="image/svg+xml")
        try:
            upstream = httpx.post(
                state.decoder_url,
                json={"vector": [float(v) for v in vector]},
                timeout=state.decoder_timeout_ms / 1000.0,
            )
        except httpx.HTTPError as exc:
            raise HTTPException(status_code=502, detail=f"decoder unreachable: {exc}") from exc
        if not 200 <= upstream.status_code < 300:
            raise HTTPException(status_code=502,
                                detail=f"decoder returned status {upstream.status_code}")
        return Response(
            content=upstream.content,
            media_type=upstream.headers.get("content-type", "application/octet-stream"),
        )

    @app.get("/api/history", response_model=HistoryResponse)
    def history() -> HistoryResponse:
        with state.lock:
            entries = [HistoryEntry(**entry) for entry in state.history]
        return HistoryResponse(schema_version=SCHEMA_VERSION, entries=entries)

    return app


def create_app_from_config(config: ServiceConfig) -> FastAPI:
    return create_app(load_session(config), ui_dir=config.ui_dir)
