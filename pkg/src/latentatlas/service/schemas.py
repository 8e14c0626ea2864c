"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    schema_version: str
    n_points: int
    n_charts: int
    decoder_configured: bool


class SpectrumResponse(BaseModel):
    schema_version: str
    radii: list[float]
    sigma: list[list[float]]
    classification: list[str] | None = None
    optimal_range: tuple[float, float] | None = None


class GridSampling(BaseModel):
    steps: int
    extent_sigmas: float
    axis_scales: list[float]


class ChartResponse(BaseModel):
    schema_version: str
    chart_id: int
    center_id: int
    radius: float
    d: int
    members: list[int]
    member_coords: list[list[float]]  # members projected into the chart basis
    mean: list[float]
    basis: list[list[float]]
    sing_values: list[float]
    grid_sampling: GridSampling


class SynthesizeRequest(BaseModel):
    chart_id: int
    coeffs: list[float]


class SynthesizeResponse(BaseModel):
    vector: list[float]
    vector_id: int


class DecodeRequest(BaseModel):
    vector_id: int | None = None
    vector: list[float] | None = None


class HistoryEntry(BaseModel):
    vector_id: int
    timestamp: float
    chart_id: int
    coeffs: list[float]


class HistoryResponse(BaseModel):
    schema_version: str
    entries: list[HistoryEntry] = Field(default_factory=list)
