"""Seeded ground-truth manifold generators for validation and acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import PointCloud

KINDS = ("sphere", "linear", "swiss-roll")

# sklearn-style roll: t in [1.5*pi, 4.5*pi], strip height 21
_ROLL_HEIGHT = 21.0


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    intrinsic_dim: int
    ambient_dim: int
    count: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.intrinsic_dim < 1:
            raise ParameterError("intrinsic_dim must be >= 1")
        if self.intrinsic_dim >= self.ambient_dim:
            raise ParameterError(
                f"need intrinsic_dim < ambient_dim, got {self.intrinsic_dim} >= {self.ambient_dim}"
            )
        if self.count < self.intrinsic_dim + 2:
            raise ParameterError(
                f"need count >= intrinsic_dim + 2, got {self.count} < {self.intrinsic_dim + 2}"
            )
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be >= 0")
        if self.kind == "swiss-roll" and self.intrinsic_dim != 2:
            raise ParameterError("swiss-roll is a 2-manifold; intrinsic_dim must be 2")


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded random orthogonal matrix: QR of a Gaussian with sign-fixed diagonal."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def generate(spec: GeneratorSpec) -> PointCloud:
    """Sample a manifold per the spec; deterministic for a given seed.

    Draw order is fixed (surface samples, then the embedding rotation, then
    noise) so that every seed reproduces bit-identical clouds.
    """
    rng = np.random.default_rng(spec.seed)
    k, dim, n = spec.intrinsic_dim, spec.ambient_dim, spec.count
    if spec.kind == "sphere":
        g = rng.standard_normal((n, k + 1))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        base = g / norms
    elif spec.kind == "linear":
        base = rng.uniform(-1.0, 1.0, size=(n, k))
    else:  # swiss-roll
        t = 1.5 * np.pi * (1.0 + 2.0 * rng.random(n))
        y = _ROLL_HEIGHT * rng.random(n)
        base = np.stack([t * np.cos(t), y, t * np.sin(t)], axis=1)
    points = np.zeros((n, dim))
    points[:, : base.shape[1]] = base
    points = points @ random_orthogonal(dim, rng).T
    if spec.noise_sigma > 0:
        points = points + spec.noise_sigma * rng.standard_normal((n, dim))
    return PointCloud(points=points)
