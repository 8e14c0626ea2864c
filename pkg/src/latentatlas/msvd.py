"""Multiscale SVD intrinsic-dimensionality estimation.

For a point z and radius r, the local spectrum is the set of singular values
of the centered neighborhood matrix scaled by 1/sqrt(m-1) — the square roots
of the local covariance eigenvalues. Averaging those spectra over sampled
centers on a grid of scales gives a :class:`SpectrumTable`; how each averaged
singular value grows with scale classifies the corresponding dimension:

* roughly linear growth at large scales -> signal (an intrinsic dimension),
* quadratic growth -> curvature of the manifold, not a true dimension,
* flat/shrinking -> sampling noise.

The signal test compares the large-scale slope of sigma_i(r) against
``epsilon * sigma_1(r_max) / r_max``. Normalizing by the top singular value
(rather than each dimension's own, which sits at the noise floor for noise
dimensions) keeps the threshold scale-free while rejecting the spurious
growth that finite-sample rank deficiency induces in the smallest singular
values.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateEstimateError,
    EmptyScaleError,
    InsufficientNeighborhoodError,
    ParameterError,
    ParseError,
)
from .geometry import PointCloud

DEFAULT_SCALES = 24
DEFAULT_CENTERS = 64
DEFAULT_EPSILON = 0.1
DEFAULT_QUAD_THRESHOLD = 0.25
# r_min heuristic: median distance to this nearest neighbor keeps the smallest
# scale populated (>= 2 members) on typical clouds.
R_MIN_NEIGHBOR = 10
LARGE_SCALE_FRACTION = 0.5


@dataclass(frozen=True)
class ScaleGrid:
    """Strictly ascending positive radii; at least 4 scales."""

    radii: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=np.float64)
        if radii.ndim != 1 or len(radii) < 4:
            raise ParameterError(f"need at least 4 radii, got {radii.shape}")
        if not np.all(np.isfinite(radii)) or np.any(radii <= 0):
            raise ParameterError("radii must be finite and positive")
        if np.any(np.diff(radii) <= 0):
            raise ParameterError("radii must be strictly ascending")
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)

    def __len__(self) -> int:
        return len(self.radii)


@dataclass(frozen=True)
class SpectrumTable:
    """Averaged singular values sigma[s][i] over a scale grid."""

    grid: ScaleGrid
    sigma: np.ndarray         # (S, D)
    centers_used: np.ndarray  # point ids sampled as neighborhood centers
    min_members: np.ndarray   # (S,) smallest usable neighborhood size per scale

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.shape[0] != len(self.grid):
            raise ParameterError("sigma row count must match the scale grid")
        if not np.all(np.isfinite(sigma)) or np.any(sigma < 0):
            raise ParameterError("sigma entries must be finite and non-negative")
        if np.any(np.diff(sigma, axis=1) > 1e-12):
            raise ParameterError("sigma rows must be non-increasing across dimensions")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "centers_used", np.asarray(self.centers_used, dtype=np.int64))
        object.__setattr__(self, "min_members", np.asarray(self.min_members, dtype=np.int64))

    @property
    def ambient_dim(self) -> int:
        return self.sigma.shape[1]


@dataclass(frozen=True)
class DimEstimate:
    """Intrinsic dimension plus the per-dimension classification behind it.

    Dimension indices are 1-based: signal/curvature/noise partition 1..D.
    """

    k: int
    signal_dims: tuple
    curvature_dims: tuple
    noise_dims: tuple
    slopes: np.ndarray
    r_max: float
    optimal_range: tuple
    epsilon: float

    def classification(self) -> list[str]:
        labels = []
        signal, curvature = set(self.signal_dims), set(self.curvature_dims)
        for i in range(1, len(self.slopes) + 1):
            if i in signal:
                labels.append("signal")
            elif i in curvature:
                labels.append("curvature")
            else:
                labels.append("noise")
        return labels


def compute_r_max(cloud: PointCloud, sample) -> float:
    """Point-cloud radius estimate: min over sampled points of the distance
    to the farthest point in the cloud."""
    sample = np.atleast_1d(np.asarray(sample, dtype=np.int64))
    if len(sample) == 0:
        raise ParameterError("sample must be non-empty")
    eccentricities = [float(cloud.distances_from(int(z)).max()) for z in sample]
    return min(eccentricities)


def build_scale_grid(r_min: float, r_max: float, count: int = DEFAULT_SCALES) -> ScaleGrid:
    """Geometric progression of `count` radii from r_min to r_max inclusive."""
    if not (r_min > 0 and r_max > r_min):
        raise ParameterError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
    if count < 4:
        raise ParameterError(f"need at least 4 scales, got {count}")
    return ScaleGrid(radii=np.geomspace(r_min, r_max, count))


def local_spectrum(cloud: PointCloud, z: int, r: float) -> np.ndarray:
    """Singular values of the centered neighborhood X(z, r), descending,
    scaled by 1/sqrt(m-1) and zero-padded to length D."""
    if r <= 0:
        raise ParameterError(f"radius must be positive, got {r}")
    dist = cloud.distances_from(z)
    members = cloud.points[dist <= r]
    m = len(members)
    if m < 2:
        raise InsufficientNeighborhoodError(m)
    centered = members - members.mean(axis=0)
    svals = np.linalg.svd(centered / np.sqrt(m - 1), compute_uv=False)
    out = np.zeros(cloud.dim)
    out[: len(svals)] = svals
    return out


def average_spectrum(
    cloud: PointCloud,
    centers,
    grid: ScaleGrid,
    workers: int = 1,
) -> SpectrumTable:
    """Average local spectra over the given centers at every grid scale.

    Centers with fewer than 2 members at a scale are skipped at that scale; a
    scale where every center is skipped raises :class:`EmptyScaleError`.
    Per-center jobs run across `workers` threads and land in preallocated
    (scale, center) slots, so the reduction is bit-identical for any worker
    count.
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=np.int64))
    if len(centers) == 0:
        raise ParameterError("centers must be non-empty")
    radii = grid.radii
    n_scales, n_centers, dim = len(radii), len(centers), cloud.dim
    spectra = np.full((n_scales, n_centers, dim), np.nan)
    counts = np.full((n_scales, n_centers), -1, dtype=np.int64)

    def fill(ci: int) -> None:
        dist = cloud.distances_from(int(centers[ci]))
        for si, r in enumerate(radii):
            members = cloud.points[dist <= r]
            m = len(members)
            if m < 2:
                continue
            centered = members - members.mean(axis=0)
            svals = np.linalg.svd(centered / np.sqrt(m - 1), compute_uv=False)
            spectra[si, ci, : len(svals)] = svals
            spectra[si, ci, len(svals):] = 0.0
            counts[si, ci] = m

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(n_centers)))
    else:
        for ci in range(n_centers):
            fill(ci)

    used = counts >= 2
    for si in range(n_scales):
        if not used[si].any():
            raise EmptyScaleError(float(radii[si]))
    sigma = np.nanmean(spectra, axis=1)
    min_members = np.array(
        [counts[si][used[si]].min() for si in range(n_scales)], dtype=np.int64
    )
    return SpectrumTable(grid=grid, sigma=sigma, centers_used=centers.copy(),
                         min_members=min_members)


def estimate_intrinsic_dim(
    table: SpectrumTable,
    epsilon: float = DEFAULT_EPSILON,
    quad_threshold: float = DEFAULT_QUAD_THRESHOLD,
) -> DimEstimate:
    """Classify every dimension as signal, curvature, or noise and return k.

    1. Fit OLS slopes m_i of sigma_i(r) over the large-scale window
       (r >= 0.5 * r_max, with r_max the largest grid radius).
    2. Signal dimensions satisfy m_i > epsilon * sigma_1(r_max) / r_max.
    3. Signal dimensions whose full-grid quadratic fit a*r^2 + b*r + c has
       a * r_max^2 > quad_threshold * sigma_i(r_max) are reclassified as
       curvature.
    4. The optimal scale range is the widest contiguous run of scales where
       every noise sigma stays below epsilon * sigma_k(r) and every curvature
       sigma stays below the smallest retained signal sigma; if no run of at
       least two scales qualifies, the large-scale window is reported.
    """
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    radii = table.grid.radii
    sigma = table.sigma
    dim = table.ambient_dim
    r_max = float(radii[-1])

    window = radii >= LARGE_SCALE_FRACTION * r_max
    if window.sum() < 2:
        window[-2:] = True  # OLS needs two points; geometric grids always have them
    slopes = np.polyfit(radii[window], sigma[window], 1)[0]
    threshold = epsilon * sigma[-1, 0] / r_max
    signal_mask = slopes > threshold
    signal = [i for i in range(dim) if signal_mask[i]]
    if not signal:
        raise DegenerateEstimateError()

    quad_coeff = np.polyfit(radii, sigma, 2)[0]
    curvature = [
        i for i in signal
        if quad_coeff[i] * r_max**2 > quad_threshold * sigma[-1, i]
    ]
    retained = [i for i in signal if i not in curvature]
    if not retained:
        raise DegenerateEstimateError(
            "every signal dimension was eliminated as curvature; "
            "try a larger r_max or a lower epsilon"
        )
    k = len(retained)
    noise = [i for i in range(dim) if not signal_mask[i]]

    ok = np.ones(len(radii), dtype=bool)
    sigma_k = sigma[:, k - 1]
    min_retained = sigma[:, retained].min(axis=1)
    if noise:
        ok &= np.all(sigma[:, noise] < epsilon * sigma_k[:, None], axis=1)
    if curvature:
        ok &= np.all(sigma[:, curvature] < min_retained[:, None], axis=1)
    lo, hi = _widest_run(ok)
    if lo is None:
        r_lo = float(radii[window][0])
        r_hi = r_max
    else:
        r_lo, r_hi = float(radii[lo]), float(radii[hi])

    return DimEstimate(
        k=k,
        signal_dims=tuple(i + 1 for i in retained),
        curvature_dims=tuple(i + 1 for i in curvature),
        noise_dims=tuple(i + 1 for i in noise),
        slopes=slopes,
        r_max=r_max,
        optimal_range=(r_lo, r_hi),
        epsilon=float(epsilon),
    )


def _widest_run(mask: np.ndarray):
    """Bounds of the longest True run of length >= 2, or (None, None)."""
    best = (None, None)
    best_len = 1
    start = None
    for i, flag in enumerate(list(mask) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            length = i - start
            if length > best_len:
                best, best_len = (start, i - 1), length
            start = None
    return best


# ---------------------------------------------------------------------------
# Convenience pipeline and CSV export


def default_r_min(cloud: PointCloud) -> float:
    """Median distance to the 10th nearest neighbor (or the farthest available)."""
    from scipy.spatial.distance import cdist

    n = cloud.n_points
    kth = min(R_MIN_NEIGHBOR, n - 1)
    dist = cdist(cloud.points, cloud.points)
    np.fill_diagonal(dist, np.inf)
    kth_dist = np.partition(dist, kth - 1, axis=1)[:, kth - 1]
    return float(np.median(kth_dist))


def sample_centers(cloud: PointCloud, count: int, seed: int) -> np.ndarray:
    """Draw `count` distinct center ids without replacement (ascending order)."""
    rng = np.random.default_rng(seed)
    rows = rng.choice(cloud.n_points, size=min(cloud.n_points, count), replace=False)
    return np.sort(cloud.point_ids[rows])


def estimate_dimension(
    cloud: PointCloud,
    *,
    scales: int = DEFAULT_SCALES,
    centers: int = DEFAULT_CENTERS,
    epsilon: float = DEFAULT_EPSILON,
    quad_threshold: float = DEFAULT_QUAD_THRESHOLD,
    seed: int = 0,
    workers: int = 1,
    r_min: float | None = None,
    r_max: float | None = None,
) -> tuple[SpectrumTable, DimEstimate]:
    """Full estimation pipeline: sample centers, build the grid, average, classify."""
    center_ids = sample_centers(cloud, centers, seed)
    if r_max is None:
        r_max = compute_r_max(cloud, center_ids)
    if r_min is None:
        r_min = default_r_min(cloud)
    if r_min >= r_max:
        r_min = r_max / 2.0 ** (max(scales, 4) - 1)
    grid = build_scale_grid(r_min, r_max, scales)
    table = average_spectrum(cloud, center_ids, grid, workers=workers)
    estimate = estimate_intrinsic_dim(table, epsilon=epsilon, quad_threshold=quad_threshold)
    return table, estimate


def export_spectrum(table: SpectrumTable, estimate: DimEstimate | None,
                    sink: str | Path) -> None:
    """Write the spectrum as CSV: header, one row per scale, then a
    classification footer and an optimal_range sidecar line."""
    dim = table.ambient_dim
    lines = ["r," + ",".join(f"sigma_{i}" for i in range(1, dim + 1))]
    for r, row in zip(table.grid.radii, table.sigma):
        lines.append(",".join([repr(float(r))] + [repr(float(v)) for v in row]))
    if estimate is not None:
        lines.append("classification," + ",".join(estimate.classification()))
        lines.append(
            "optimal_range,"
            + repr(float(estimate.optimal_range[0]))
            + ","
            + repr(float(estimate.optimal_range[1]))
        )
    Path(sink).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_spectrum(source: str | Path) -> dict:
    """Parse an exported spectrum CSV back into arrays (round-trips exactly)."""
    lines = Path(source).read_text(encoding="utf-8").strip().splitlines()
    if not lines or not lines[0].startswith("r,"):
        raise ParseError(f"{source}: not a spectrum CSV")
    radii, rows = [], []
    classification = None
    optimal_range = None
    for line in lines[1:]:
        fields = line.split(",")
        if fields[0] == "classification":
            classification = fields[1:]
        elif fields[0] == "optimal_range":
            optimal_range = (float(fields[1]), float(fields[2]))
        else:
            radii.append(float(fields[0]))
            rows.append([float(v) for v in fields[1:]])
    return {
        "radii": np.array(radii),
        "sigma": np.array(rows),
        "classification": classification,
        "optimal_range": optimal_range,
    }
