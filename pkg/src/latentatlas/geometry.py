"""Point-cloud storage, neighbor graphs, and geodesic distances.

A :class:`PointCloud` is an immutable N x D matrix of latent coordinates with
opaque integer point ids (0..N-1 by default). Two file formats are supported:

* CSV - one point per line, comma-separated decimal reals; lines starting
  with ``#`` are header/comment lines.
* lgpc-binary - magic bytes ``LGPC``, u32 little-endian N, u32 little-endian
  D, then N*D IEEE-754 little-endian 32-bit floats in row-major order.
  Load -> save -> load round-trips bit-exactly.

All distance computation happens in double precision regardless of storage
precision; downstream spectrum slopes are sensitive to accumulation error.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import cdist

from .errors import ParameterError, ParseError

LGPC_MAGIC = b"LGPC"


@dataclass(frozen=True)
class PointCloud:
    """N points in R^D. Immutable after construction; safe for concurrent reads."""

    points: np.ndarray
    point_ids: np.ndarray | None = None
    _id_to_row: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if points.ndim != 2:
            raise ParameterError(f"points must be a 2-D array, got ndim={points.ndim}")
        n, d = points.shape
        if n < 1 or d < 1:
            raise ParameterError(f"need N >= 1 and D >= 1, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            row, col = np.argwhere(~np.isfinite(points))[0]
            raise ParameterError(f"non-finite coordinate at row {row}, column {col}")
        if self.point_ids is None:
            ids = np.arange(n, dtype=np.int64)
        else:
            ids = np.asarray(self.point_ids, dtype=np.int64)
            if ids.shape != (n,):
                raise ParameterError(f"point_ids shape {ids.shape} does not match N={n}")
            if len(np.unique(ids)) != n:
                raise ParameterError("point_ids must be unique")
        points.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "point_ids", ids)
        object.__setattr__(self, "_id_to_row", {int(pid): i for i, pid in enumerate(ids)})

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def rows_for(self, ids) -> np.ndarray:
        """Map point ids to row indices, raising on unknown ids."""
        try:
            return np.asarray([self._id_to_row[int(i)] for i in np.atleast_1d(ids)],
                              dtype=np.int64)
        except KeyError as exc:
            raise ParameterError(f"unknown point id {exc.args[0]}") from None

    def distances_from(self, point_id: int) -> np.ndarray:
        """Euclidean distances from one point to every point in the cloud."""
        row = self.rows_for([point_id])[0]
        return np.linalg.norm(self.points - self.points[row], axis=1)


@dataclass(frozen=True)
class NeighborGraph:
    """Symmetric weighted k-NN graph over a point cloud.

    ``edges`` holds each undirected edge once as (a, b) with a < b by point id;
    the :meth:`adjacency` view expands both orientations.
    """

    k: int
    point_ids: np.ndarray
    edges: np.ndarray    # (M, 2) int64 point ids, a < b
    weights: np.ndarray  # (M,) float64

    def __post_init__(self):
        object.__setattr__(self, "point_ids", np.asarray(self.point_ids, dtype=np.int64))
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=np.int64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))

    def adjacency(self) -> list[tuple[int, int, float]]:
        out = []
        for (a, b), w in zip(self.edges, self.weights):
            out.append((int(a), int(b), float(w)))
            out.append((int(b), int(a), float(w)))
        return out

    def to_csr(self) -> tuple[csr_matrix, dict]:
        """Sparse symmetric weight matrix plus the id -> row mapping used."""
        id_to_row = {int(pid): i for i, pid in enumerate(self.point_ids)}
        n = len(self.point_ids)
        rows = np.array([id_to_row[int(a)] for a in self.edges[:, 0]], dtype=np.int64)
        cols = np.array([id_to_row[int(b)] for b in self.edges[:, 1]], dtype=np.int64)
        mat = csr_matrix(
            (np.concatenate([self.weights, self.weights]),
             (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(n, n),
        )
        return mat, id_to_row


def knn_graph(cloud: PointCloud, k: int, allow_zero_weights: bool = False) -> NeighborGraph:
    """Connect each point to its k nearest Euclidean neighbors, symmetrized by union.

    Ties in neighbor ranking are broken by smaller point id (stable sort over
    rows already ordered by id), so results are deterministic across platforms.
    Coincident points are rejected by default (edge weights must stay positive);
    graphs over low-dimensional representation coordinates, where an embedding
    may legitimately collapse points, can opt in to zero-weight edges.
    """
    n = cloud.n_points
    if not 1 <= k < n:
        raise ParameterError(f"need 1 <= k < N, got k={k} with N={n}")
    dist = cdist(cloud.points, cloud.points)
    np.fill_diagonal(dist, np.inf)
    edge_set: set[tuple[int, int]] = set()
    weights: dict[tuple[int, int], float] = {}
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    ids = cloud.point_ids
    for i in range(n):
        for j in order[i]:
            w = dist[i, j]
            if w == 0.0 and not allow_zero_weights:
                raise ParameterError(
                    f"points {int(ids[i])} and {int(ids[j])} coincide; "
                    "zero-weight edges are not representable"
                )
            key = (int(ids[min(i, j)]), int(ids[max(i, j)]))
            if key not in edge_set:
                edge_set.add(key)
                weights[key] = float(w)
    edges = np.array(sorted(edge_set), dtype=np.int64).reshape(-1, 2)
    wvec = np.array([weights[tuple(e)] for e in edges], dtype=np.float64)
    return NeighborGraph(k=k, point_ids=ids.copy(), edges=edges, weights=wvec)


def geodesic_distances(graph: NeighborGraph, subset) -> np.ndarray:
    """Shortest weighted path lengths between all pairs of a subset of points.

    Returns an S x S symmetric matrix with zero diagonal; disconnected pairs
    carry ``+inf`` (downstream histograms exclude and count them separately).
    """
    subset = np.atleast_1d(np.asarray(subset, dtype=np.int64))
    mat, id_to_row = graph.to_csr()
    try:
        rows = np.array([id_to_row[int(i)] for i in subset], dtype=np.int64)
    except KeyError as exc:
        raise ParameterError(f"point id {exc.args[0]} not present in graph") from None
    dist = dijkstra(mat, directed=False, indices=rows)[:, rows]
    dist = np.minimum(dist, dist.T)  # exact symmetry despite fp summation order
    np.fill_diagonal(dist, 0.0)
    return dist


# ---------------------------------------------------------------------------
# File formats


def load_point_cloud(source: str | Path, format: str = "auto") -> PointCloud:
    """Read a point cloud from CSV or lgpc-binary, preserving row order."""
    path = Path(source)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    fmt = _resolve_format(path, format)
    if fmt == "csv":
        return _load_csv(path)
    return _load_lgpc(path)


def save_point_cloud(cloud: PointCloud, sink: str | Path, format: str = "auto") -> None:
    path = Path(sink)
    fmt = _resolve_format(path, format)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            for row in cloud.points:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    else:
        path.write_bytes(encode_lgpc(cloud))


def encode_lgpc(cloud: PointCloud) -> bytes:
    """Canonical lgpc-binary encoding; also the basis of the cloud checksum."""
    n, d = cloud.points.shape
    header = LGPC_MAGIC + struct.pack("<II", n, d)
    payload = cloud.points.astype("<f4").tobytes(order="C")
    return header + payload


def cloud_checksum(cloud: PointCloud) -> str:
    """SHA-256 hex digest of the canonical lgpc-binary encoding."""
    return hashlib.sha256(encode_lgpc(cloud)).hexdigest()


def _resolve_format(path: Path, format: str) -> str:
    if format in ("csv", "lgpc-binary", "lgpc"):
        return "csv" if format == "csv" else "lgpc"
    if format == "auto":
        return "csv" if path.suffix.lower() == ".csv" else "lgpc"
    raise ParameterError(f"unknown format {format!r}; expected csv or lgpc-binary")


def _load_csv(path: Path) -> PointCloud:
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}: row {lineno} has {len(fields)} columns, expected {width}"
                )
            values = []
            for col, token in enumerate(fields, start=1):
                try:
                    v = float(token)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {lineno}, column {col}: not a number: {token.strip()!r}"
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(
                        f"{path}: row {lineno}, column {col}: non-finite value {token.strip()!r}"
                    )
                values.append(v)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return PointCloud(points=np.array(rows, dtype=np.float64))


def _load_lgpc(path: Path) -> PointCloud:
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:4] != LGPC_MAGIC:
        raise ParseError(f"{path}: missing LGPC magic header")
    n, d = struct.unpack("<II", blob[4:12])
    expected = 12 + 4 * n * d
    if len(blob) != expected:
        raise ParseError(
            f"{path}: payload size {len(blob) - 12} bytes does not match N={n}, D={d}"
        )
    if n < 1 or d < 1:
        raise ParseError(f"{path}: header declares empty cloud N={n}, D={d}")
    data = np.frombuffer(blob, dtype="<f4", offset=12).reshape(n, d).astype(np.float64)
    if not np.all(np.isfinite(data)):
        row, col = np.argwhere(~np.isfinite(data))[0]
        raise ParseError(f"{path}: non-finite value at row {row}, column {col}")
    return PointCloud(points=data)
