"""Quantitative comparisons: reconstruction error and local pairwise distances.

Two harnesses back the benchmark CLI:

* Reconstruction errors of every point under a global PCA basis versus the
  atlas (each point scored by its minimal-residual chart).
* Neighborhood locality: each representation (local charts, a global 2-D PCA,
  an imported 2-D embedding) identifies an equal-size neighborhood around a
  chart's center; pairwise distances among the identified points are measured
  in the ambient cloud, with Euclidean and graph-geodesic variants. Tight
  neighborhoods mean the representation preserves local geometry.

`pdist_report` is the underlying histogram machinery: for one fixed
neighborhood it histograms pairwise distances under arbitrary per-method
coordinate sets on shared bin edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from .atlas import Atlas, atlas_residuals
from .errors import InputError, ParameterError
from .geometry import NeighborGraph, PointCloud, geodesic_distances
from .jsonutil import write_canonical_json

DEFAULT_BINS = 40
GEODESIC_K = 10


@dataclass(frozen=True)
class GlobalBasis:
    mean: np.ndarray
    basis: np.ndarray  # (d, D) orthonormal rows

    @property
    def d(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class ErrorDistribution:
    method: str
    dimension: int
    errors: np.ndarray

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=np.float64)
        if not np.all(np.isfinite(errors)) or np.any(errors < 0):
            raise ParameterError("errors must be finite and non-negative")
        errors.setflags(write=False)
        object.__setattr__(self, "errors", errors)

    @property
    def summary(self) -> dict:
        return {
            "mean": float(self.errors.mean()),
            "median": float(np.median(self.errors)),
            "p5": float(np.percentile(self.errors, 5)),
            "p95": float(np.percentile(self.errors, 95)),
        }


@dataclass(frozen=True)
class PdistReport:
    neighborhood_id: int
    metric: str
    bin_edges: np.ndarray
    histograms: dict          # method -> (bins,) counts
    finite_pairs: dict        # method -> int
    infinite_pairs: dict      # method -> int (geodesic only; excluded from mass)


def global_pca(cloud: PointCloud, d: int) -> GlobalBasis:
    """Top-d principal directions of the full centered cloud, sign-normalized."""
    limit = min(cloud.n_points - 1, cloud.dim)
    if not 1 <= d <= limit:
        raise ParameterError(f"need 1 <= d <= {limit}, got d={d}")
    mean = cloud.points.mean(axis=0)
    _, _, vt = np.linalg.svd(cloud.points - mean, full_matrices=False)
    from .atlas import _sign_normalize

    return GlobalBasis(mean=mean, basis=_sign_normalize(vt[:d]))


def reconstruction_errors(cloud: PointCloud, projector) -> ErrorDistribution:
    """Per-point residuals from the projector's affine span.

    `projector` is either a :class:`GlobalBasis` or an :class:`Atlas`; with an
    atlas, each point is scored against its minimal-residual chart.
    """
    if isinstance(projector, GlobalBasis):
        offset = cloud.points - projector.mean
        coeffs = offset @ projector.basis.T
        errors = np.linalg.norm(offset - coeffs @ projector.basis, axis=1)
        return ErrorDistribution(method="global-pca", dimension=projector.d, errors=errors)
    if isinstance(projector, Atlas):
        errors = atlas_residuals(projector, cloud.points)
        return ErrorDistribution(method="local-pca", dimension=projector.d_max, errors=errors)
    raise ParameterError(f"unsupported projector type {type(projector).__name__}")


def import_embedding(path: str | Path, cloud: PointCloud) -> np.ndarray:
    """Load an externally produced N x 2 embedding aligned to point ids by row."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split(",")
            if len(fields) != 2:
                raise InputError(f"{path}: row {lineno} has {len(fields)} columns, expected 2")
            try:
                rows.append([float(fields[0]), float(fields[1])])
            except ValueError:
                raise InputError(f"{path}: row {lineno}: not a number") from None
    coords = np.array(rows, dtype=np.float64)
    if len(coords) != cloud.n_points:
        raise InputError(
            f"{path}: {len(coords)} rows do not match the cloud's {cloud.n_points} points"
        )
    return coords


def export_embedding(coords: np.ndarray, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.asarray(coords, dtype=np.float64):
            fh.write(f"{float(row[0])!r},{float(row[1])!r}\n")


# ---------------------------------------------------------------------------
# Pairwise-distance histograms for a fixed neighborhood


def _member_coords(label: str, coords: np.ndarray, cloud: PointCloud,
                   member_rows: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2:
        raise InputError(f"representation {label!r} must be a 2-D coordinate array")
    if len(coords) == cloud.n_points:
        return coords[member_rows]
    if len(coords) == len(member_rows):
        return coords
    raise InputError(
        f"representation {label!r} provides {len(coords)} coordinate rows; "
        f"expected {cloud.n_points} (full cloud) or {len(member_rows)} (members)"
    )


def pdist_report(
    cloud: PointCloud,
    neighborhood,
    representations,
    metric: str = "euclidean",
    bins: int = DEFAULT_BINS,
    graphs: dict | None = None,
    neighborhood_id: int = 0,
) -> PdistReport:
    """Histogram pairwise distances among one neighborhood's points under each
    representation, on bin edges shared across methods.

    representations: list of (label, coords) with coords aligned either to the
    full cloud (N rows) or to the neighborhood (len(neighborhood) rows). For
    the geodesic metric, `graphs` maps labels to a :class:`NeighborGraph`
    built on that representation; infinite (disconnected) pairs are excluded
    from the histogram mass and counted separately.
    """
    if metric not in ("euclidean", "geodesic"):
        raise ParameterError(f"unknown metric {metric!r}")
    member_ids = np.atleast_1d(np.asarray(neighborhood, dtype=np.int64))
    member_rows = cloud.rows_for(member_ids)
    if len(member_ids) < 2:
        raise ParameterError("neighborhood needs at least 2 members")

    distance_sets: dict[str, np.ndarray] = {}
    inf_counts: dict[str, int] = {}
    for label, coords in representations:
        if metric == "euclidean":
            member = _member_coords(label, coords, cloud, member_rows)
            dists = pdist(member)
            inf_counts[label] = 0
        else:
            if graphs is None or label not in graphs:
                raise InputError(f"geodesic metric needs a NeighborGraph for {label!r}")
            mat = geodesic_distances(graphs[label], member_ids)
            iu = np.triu_indices(len(member_ids), 1)
            dists = mat[iu]
            inf_counts[label] = int(np.sum(~np.isfinite(dists)))
            dists = dists[np.isfinite(dists)]
        distance_sets[label] = dists

    pooled = np.concatenate([d for d in distance_sets.values() if len(d)])
    lo, hi = float(pooled.min()), float(pooled.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    histograms = {
        label: np.histogram(dists, bins=edges)[0]
        for label, dists in distance_sets.items()
    }
    finite = {label: int(len(d)) for label, d in distance_sets.items()}
    return PdistReport(neighborhood_id=neighborhood_id, metric=metric,
                       bin_edges=edges, histograms=histograms,
                       finite_pairs=finite, infinite_pairs=inf_counts)


# ---------------------------------------------------------------------------
# Neighborhood locality comparison across representations


def nearest_rows(coords: np.ndarray, anchor_row: int, count: int) -> np.ndarray:
    """Rows of the `count` nearest points to the anchor in a coordinate set
    (anchor included; ties broken by smaller row)."""
    dist = np.linalg.norm(coords - coords[anchor_row], axis=1)
    return np.argsort(dist, kind="stable")[:count]


def _median_pairwise(points: np.ndarray) -> float:
    return float(np.median(pdist(points)))


def _median_geodesic(graph: NeighborGraph, member_ids: np.ndarray) -> tuple[float, int]:
    mat = geodesic_distances(graph, member_ids)
    iu = np.triu_indices(len(member_ids), 1)
    vals = mat[iu]
    finite = vals[np.isfinite(vals)]
    inf_count = int(len(vals) - len(finite))
    med = float(np.median(finite)) if len(finite) else float("inf")
    return med, inf_count


def chart_locality_report(
    cloud: PointCloud,
    atlas: Atlas,
    representations,
    graph: NeighborGraph | None = None,
) -> dict:
    """Per chart: median ambient pairwise distance of the chart's members
    versus the equal-count nearest neighborhoods each 2-D representation picks
    around the chart center. The geodesic variant (over `graph`, built on the
    ambient cloud) is included when a graph is supplied.

    Charts with fewer than 3 members are skipped (no pairwise median).
    """
    labels = [label for label, _ in representations]
    rep_coords = {label: np.asarray(coords, dtype=np.float64)
                  for label, coords in representations}
    for label, coords in rep_coords.items():
        if len(coords) != cloud.n_points:
            raise InputError(
                f"representation {label!r} must cover the full cloud "
                f"({len(coords)} rows != {cloud.n_points})"
            )
    per_chart = []
    wins = 0
    comparable = 0
    for chart in atlas.charts:
        m = len(chart.members)
        if m < 3:
            continue
        member_rows = cloud.rows_for(chart.members)
        center_row = int(cloud.rows_for([chart.center_id])[0])
        entry: dict = {"chart_id": chart.chart_id, "members": m}
        local_med = _median_pairwise(cloud.points[member_rows])
        entry["euclidean"] = {"local-pca": local_med}
        if graph is not None:
            med, infs = _median_geodesic(graph, chart.members)
            entry["geodesic"] = {"local-pca": med}
            entry["geodesic_infinite_pairs"] = {"local-pca": infs}
        beats_all = True
        for label in labels:
            rows = nearest_rows(rep_coords[label], center_row, m)
            med = _median_pairwise(cloud.points[rows])
            entry["euclidean"][label] = med
            if local_med > med + 1e-12:
                beats_all = False
            if graph is not None:
                ids = cloud.point_ids[rows]
                gmed, infs = _median_geodesic(graph, ids)
                entry["geodesic"][label] = gmed
                entry["geodesic_infinite_pairs"][label] = infs
        entry["local_is_tightest_euclidean"] = beats_all
        comparable += 1
        wins += int(beats_all)
        per_chart.append(entry)
    return {
        "methods": ["local-pca"] + labels,
        "charts_compared": comparable,
        "local_tightest_count": wins,
        "local_tightest_fraction": (wins / comparable) if comparable else 0.0,
        "per_chart": per_chart,
    }


# ---------------------------------------------------------------------------
# Report writers


def write_error_csv(distributions, path: str | Path) -> None:
    """Flat CSV: method, d, point_id, error."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,d,point_id,error\n")
        for dist in distributions:
            for pid, err in enumerate(dist.errors):
                fh.write(f"{dist.method},{dist.dimension},{pid},{float(err)!r}\n")


def write_histogram_csv(report: PdistReport, path: str | Path) -> None:
    """Flat CSV: method, bin_lo, bin_hi, count."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,bin_lo,bin_hi,count\n")
        for label, counts in report.histograms.items():
            for b, count in enumerate(counts):
                fh.write(
                    f"{label},{float(report.bin_edges[b])!r},"
                    f"{float(report.bin_edges[b + 1])!r},{int(count)}\n"
                )


def write_report_json(payload: dict, path: str | Path) -> None:
    write_canonical_json(_jsonable(payload), path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj
