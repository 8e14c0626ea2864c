"""Ball coverings with per-ball local-PCA charts, and chart/ambient transforms.

An :class:`Atlas` covers every point of a cloud with at least one chart. Each
chart is a ball around a center point carrying the member centroid and an
orthonormal basis of local principal directions (at most ``d_max`` of them,
the UI slider cap). Charts whose 95%-variance dimension exceeds ``d_max``
shrink their radius by 0.8 until the cap holds or the member count would fall
below ``d_max + 2``; points orphaned by shrinking are re-covered with
additional balls. Overlapping member sets become graph edges.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, ParseError
from .geometry import PointCloud, cloud_checksum
from .jsonutil import read_json, write_canonical_json

SCHEMA_VERSION = "1"
VARIANCE_FRACTION = 0.95
SHRINK_FACTOR = 0.8
DEFAULT_D_MAX = 8
ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class Chart:
    """One local neighborhood: ball members, centroid, and local-PC basis."""

    chart_id: int
    center_id: int
    radius: float
    members: np.ndarray      # point ids
    mean: np.ndarray         # (D,)
    basis: np.ndarray        # (d, D) orthonormal rows, descending variance
    sing_values: np.ndarray  # (d,) std-dev along each local PC
    d: int

    def __post_init__(self):
        members = np.asarray(self.members, dtype=np.int64)
        mean = np.asarray(self.mean, dtype=np.float64)
        basis = np.atleast_2d(np.asarray(self.basis, dtype=np.float64))
        sing = np.atleast_1d(np.asarray(self.sing_values, dtype=np.float64))
        if basis.shape != (self.d, mean.shape[0]):
            raise ParameterError(
                f"basis shape {basis.shape} inconsistent with d={self.d}, D={mean.shape[0]}"
            )
        if sing.shape != (self.d,):
            raise ParameterError("sing_values length must equal d")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(self.d), atol=ORTHO_TOL):
            raise ParameterError("basis rows are not orthonormal")
        if np.any(np.diff(sing) > 0) or np.any(sing < 0):
            raise ParameterError("sing_values must be descending and non-negative")
        for arr in (members, mean, basis, sing):
            arr.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "sing_values", sing)


@dataclass(frozen=True)
class Atlas:
    """The full chart set with overlap edges; immutable once built."""

    charts: tuple
    edges: tuple             # (chart_a, chart_b, shared_count), a < b
    d_max: int
    covering_seed: int
    cloud_checksum: str
    n_points: int

    def chart(self, chart_id: int) -> Chart:
        if not 0 <= chart_id < len(self.charts):
            raise ParameterError(f"no chart with id {chart_id}")
        return self.charts[chart_id]


def cover(cloud: PointCloud, r: float, seed: int) -> list[tuple[int, np.ndarray]]:
    """Iteratively draw ball centers from the not-yet-covered points until every
    point lies in some ball. Membership may overlap; only center eligibility is
    restricted. Deterministic for a given (cloud, r, seed)."""
    if r <= 0:
        raise ParameterError(f"radius must be positive, got {r}")
    rng = np.random.default_rng(seed)
    return _cover_loop(cloud, r, rng, np.zeros(cloud.n_points, dtype=bool))


def _cover_loop(cloud: PointCloud, r: float, rng: np.random.Generator,
                covered: np.ndarray) -> list[tuple[int, np.ndarray]]:
    balls = []
    points = cloud.points
    ids = cloud.point_ids
    while not covered.all():
        pool = np.nonzero(~covered)[0]
        center_row = int(pool[rng.integers(len(pool))])
        dist = np.linalg.norm(points - points[center_row], axis=1)
        member_rows = np.nonzero(dist <= r)[0]
        covered[member_rows] = True
        balls.append((int(ids[center_row]), ids[member_rows].copy()))
    return balls


def _pca(member_points: np.ndarray):
    """Centered SVD: (mean, right singular rows, per-PC std-devs, 95% dim)."""
    m = len(member_points)
    mean = member_points.mean(axis=0)
    centered = member_points - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    var = svals**2
    total = var.sum()
    if total <= 0:
        return mean, None, None, 1
    frac = np.cumsum(var) / total
    d_var = int(np.searchsorted(frac, VARIANCE_FRACTION) + 1)
    return mean, vt, svals / np.sqrt(m - 1), d_var


def _sign_normalize(basis: np.ndarray) -> np.ndarray:
    """Make each row's largest-magnitude coordinate positive (reproducible
    across eigensolvers)."""
    out = basis.copy()
    for row in out:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return out


def _degenerate_chart(cloud: PointCloud, chart_id: int, center_id: int,
                      radius: float, members: np.ndarray) -> Chart:
    basis = np.zeros((1, cloud.dim))
    basis[0, 0] = 1.0
    mean = cloud.points[cloud.rows_for([center_id])[0]].copy()
    if len(members) >= 1:
        mean = cloud.points[cloud.rows_for(members)].mean(axis=0)
    return Chart(chart_id=chart_id, center_id=center_id, radius=radius,
                 members=members, mean=mean, basis=basis,
                 sing_values=np.array([0.0]), d=1)


def fit_chart(cloud: PointCloud, center_id: int, members, radius: float,
              d_max: int = DEFAULT_D_MAX, chart_id: int = 0) -> Chart:
    """Local PCA over the members: basis = top right singular directions of the
    centered member matrix; d = smallest count capturing >= 95% of variance,
    capped at d_max. Singleton or zero-variance balls yield a degenerate
    chart (d=1, unit basis vector, singular value 0)."""
    if d_max < 1:
        raise ParameterError(f"d_max must be >= 1, got {d_max}")
    members = np.atleast_1d(np.asarray(members, dtype=np.int64))
    rows = cloud.rows_for(members)
    if len(members) < 2:
        return _degenerate_chart(cloud, chart_id, center_id, radius, members)
    mean, vt, svals, d_var = _pca(cloud.points[rows])
    if vt is None:
        return _degenerate_chart(cloud, chart_id, center_id, radius, members)
    d = min(d_var, d_max)
    return Chart(chart_id=chart_id, center_id=center_id, radius=radius,
                 members=members, mean=mean, basis=_sign_normalize(vt[:d]),
                 sing_values=svals[:d], d=d)


def _fit_with_shrink(cloud: PointCloud, chart_id: int, center_id: int,
                     r: float, d_max: int) -> Chart:
    """Fit a ball's chart, shrinking its radius while the uncapped
    95%-variance dimension exceeds d_max and the member floor allows."""
    dist = cloud.distances_from(center_id)
    radius = r
    member_rows = np.nonzero(dist <= radius)[0]
    while len(member_rows) >= 2:
        _, vt, _, d_var = _pca(cloud.points[member_rows])
        if vt is None or d_var <= d_max:
            break
        new_radius = radius * SHRINK_FACTOR
        new_rows = np.nonzero(dist <= new_radius)[0]
        if len(new_rows) < d_max + 2:
            break
        radius, member_rows = new_radius, new_rows
    members = cloud.point_ids[member_rows]
    return fit_chart(cloud, center_id, members, radius, d_max, chart_id=chart_id)


def build_atlas(cloud: PointCloud, r: float, d_max: int = DEFAULT_D_MAX,
                seed: int = 0, workers: int = 1) -> Atlas:
    """Cover the cloud, fit every ball (optionally across worker threads),
    re-cover points orphaned by radius shrinking, and compute overlap edges.
    Bit-identical for a given seed regardless of worker count."""
    if r <= 0:
        raise ParameterError(f"radius must be positive, got {r}")
    if d_max < 1:
        raise ParameterError(f"d_max must be >= 1, got {d_max}")
    rng = np.random.default_rng(seed)
    covered = np.zeros(cloud.n_points, dtype=bool)
    balls = _cover_loop(cloud, r, rng, covered)

    charts: list[Chart] = [None] * len(balls)  # type: ignore[list-item]

    def fit_slot(i: int) -> None:
        center_id, _ = balls[i]
        charts[i] = _fit_with_shrink(cloud, i, center_id, r, d_max)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fit_slot, range(len(balls))))
    else:
        for i in range(len(balls)):
            fit_slot(i)

    # Shrinking may have dropped members; re-derive coverage and add balls
    # (sequentially, continuing the same RNG stream) until the covering holds.
    covered = np.zeros(cloud.n_points, dtype=bool)
    for chart in charts:
        covered[cloud.rows_for(chart.members)] = True
    while not covered.all():
        pool_rows = np.nonzero(~covered)[0]
        center_row = int(pool_rows[rng.integers(len(pool_rows))])
        center_id = int(cloud.point_ids[center_row])
        chart = _fit_with_shrink(cloud, len(charts), center_id, r, d_max)
        charts.append(chart)
        covered[cloud.rows_for(chart.members)] = True

    return Atlas(
        charts=tuple(charts),
        edges=tuple(_overlap_edges(charts)),
        d_max=d_max,
        covering_seed=seed,
        cloud_checksum=cloud_checksum(cloud),
        n_points=cloud.n_points,
    )


def _overlap_edges(charts) -> list[tuple[int, int, int]]:
    by_point: dict[int, list[int]] = {}
    for chart in charts:
        for pid in chart.members:
            by_point.setdefault(int(pid), []).append(chart.chart_id)
    counts: dict[tuple[int, int], int] = {}
    for chart_ids in by_point.values():
        chart_ids.sort()
        for i in range(len(chart_ids)):
            for j in range(i + 1, len(chart_ids)):
                key = (chart_ids[i], chart_ids[j])
                counts[key] = counts.get(key, 0) + 1
    return [(a, b, counts[(a, b)]) for a, b in sorted(counts)]


# ---------------------------------------------------------------------------
# Chart/ambient coordinate transforms


def chart_to_ambient(chart: Chart, coeffs) -> np.ndarray:
    """mean + sum_k coeffs[k] * basis[k]."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if coeffs.shape != (chart.d,):
        raise ParameterError(
            f"expected {chart.d} coefficients for chart {chart.chart_id}, got {len(coeffs)}"
        )
    return chart.mean + coeffs @ chart.basis


def ambient_to_chart(chart: Chart, x) -> tuple[np.ndarray, float]:
    """Project x onto the chart's affine span: (coefficients, residual norm)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != chart.mean.shape:
        raise ParameterError(f"expected a vector of length {len(chart.mean)}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("vector must be finite")
    offset = x - chart.mean
    coeffs = chart.basis @ offset
    residual = float(np.linalg.norm(offset - coeffs @ chart.basis))
    return coeffs, residual


def nearest_chart(atlas: Atlas, x) -> int:
    """Chart with the smallest projection residual for x (ties -> smaller id)."""
    if not atlas.charts:
        raise ParameterError("atlas has no charts")
    best_id, best_res = 0, np.inf
    for chart in atlas.charts:
        _, residual = ambient_to_chart(chart, x)
        if residual < best_res:
            best_id, best_res = chart.chart_id, residual
    return best_id


def atlas_residuals(atlas: Atlas, points: np.ndarray) -> np.ndarray:
    """Minimal chart residual for every row of `points` (vectorized
    nearest-chart distances)."""
    points = np.asarray(points, dtype=np.float64)
    best = np.full(len(points), np.inf)
    for chart in atlas.charts:
        offset = points - chart.mean
        coeffs = offset @ chart.basis.T
        res = np.linalg.norm(offset - coeffs @ chart.basis, axis=1)
        np.minimum(best, res, out=best)
    return best


# ---------------------------------------------------------------------------
# Serialization


def atlas_to_dict(atlas: Atlas, layout: dict | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "d_max": atlas.d_max,
        "covering_seed": atlas.covering_seed,
        "cloud_checksum": atlas.cloud_checksum,
        "n_points": atlas.n_points,
        "charts": [
            {
                "chart_id": c.chart_id,
                "center_id": int(c.center_id),
                "radius": float(c.radius),
                "d": c.d,
                "members": [int(p) for p in c.members],
                "mean": [float(v) for v in c.mean],
                "basis": [[float(v) for v in row] for row in c.basis],
                "sing_values": [float(v) for v in c.sing_values],
            }
            for c in atlas.charts
        ],
        "edges": [[a, b, n] for a, b, n in atlas.edges],
    }
    if layout is not None:
        doc["layout"] = layout
    return doc


def save_atlas(atlas: Atlas, path: str | Path, layout: dict | None = None) -> bytes:
    return write_canonical_json(atlas_to_dict(atlas, layout), path)


def atlas_from_dict(doc: dict) -> Atlas:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported atlas schema version {doc.get('schema_version')!r}")
    charts = tuple(
        Chart(
            chart_id=c["chart_id"],
            center_id=c["center_id"],
            radius=c["radius"],
            members=np.array(c["members"], dtype=np.int64),
            mean=np.array(c["mean"]),
            basis=np.array(c["basis"]),
            sing_values=np.array(c["sing_values"]),
            d=c["d"],
        )
        for c in doc["charts"]
    )
    return Atlas(
        charts=charts,
        edges=tuple((a, b, n) for a, b, n in doc["edges"]),
        d_max=doc["d_max"],
        covering_seed=doc["covering_seed"],
        cloud_checksum=doc["cloud_checksum"],
        n_points=doc["n_points"],
    )


def load_atlas(path: str | Path) -> Atlas:
    return atlas_from_dict(read_json(path))
