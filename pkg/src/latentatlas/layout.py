"""Force-directed 2D placement of charts with pairwise collision removal.

Nodes repel with force proportional to 1/distance; overlap edges attract like
springs proportional to (distance - rest_length). Step size decays
multiplicatively, so positions converge and the result is deterministic for a
fixed seed. Node radii encode member counts area-proportionally (sqrt of the
count, normalized so the largest node has radius 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atlas import Atlas
from .errors import ParameterError

DEFAULT_ITERATIONS = 300
REST_LENGTH = 1.0
REPULSION = 0.5
COOLING = 0.99
STEP_SIZE = 0.1
COLLISION_TOL = 1e-6
MAX_SWEEPS = 200


@dataclass(frozen=True)
class LayoutNode:
    chart_id: int
    position: tuple
    render_radius: float

    def __post_init__(self):
        x, y = self.position
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ParameterError("positions must be finite")
        if self.render_radius <= 0:
            raise ParameterError("render_radius must be positive")
        object.__setattr__(self, "position", (float(x), float(y)))


def _render_radii(atlas: Atlas) -> np.ndarray:
    counts = np.array([len(c.members) for c in atlas.charts], dtype=np.float64)
    radii = np.sqrt(counts)
    return radii / radii.max()


def _pair_fallback_directions(n: int) -> np.ndarray:
    # coincident nodes get a deterministic pseudo-direction per node index
    angles = 2.0 * np.pi * np.arange(n) * 0.6180339887498949
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def force_layout(
    atlas: Atlas,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    rest_length: float = REST_LENGTH,
    repulsion: float = REPULSION,
    step_size: float = STEP_SIZE,
    cooling: float = COOLING,
    initial_positions: np.ndarray | None = None,
) -> list[LayoutNode]:
    """Seeded force simulation over the chart graph.

    Forces depend only on position differences, so translating the initial
    layout translates the result identically.
    """
    n = len(atlas.charts)
    if n == 0:
        raise ParameterError("atlas has no charts")
    radii = _render_radii(atlas)
    if n == 1:
        return [LayoutNode(chart_id=atlas.charts[0].chart_id,
                           position=(0.0, 0.0), render_radius=float(radii[0]))]

    if initial_positions is None:
        rng = np.random.default_rng(seed)
        span = np.sqrt(n) * rest_length
        pos = rng.uniform(0.0, span, size=(n, 2))
    else:
        pos = np.array(initial_positions, dtype=np.float64)
        if pos.shape != (n, 2):
            raise ParameterError(f"initial_positions must have shape ({n}, 2)")

    edges = np.array([(a, b) for a, b, _ in atlas.edges], dtype=np.int64).reshape(-1, 2)
    fallback = _pair_fallback_directions(n)
    step = step_size
    for _ in range(iterations):
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        np.fill_diagonal(dist, 1.0)
        unit = diff / dist[:, :, None]
        degenerate = dist < 1e-9
        np.fill_diagonal(degenerate, False)
        if degenerate.any():
            ii = np.nonzero(degenerate)
            unit[ii] = fallback[ii[0]]
            dist[degenerate] = 1e-9
        force = (repulsion / dist)[:, :, None] * unit
        np.einsum("iij->ij", force)[:] = 0.0
        total = force.sum(axis=1)
        if len(edges):
            a, b = edges[:, 0], edges[:, 1]
            delta = pos[a] - pos[b]
            d = np.linalg.norm(delta, axis=1)
            safe = np.where(d < 1e-9, 1e-9, d)
            pull = (d - rest_length)[:, None] * (delta / safe[:, None])
            np.add.at(total, a, -pull)
            np.add.at(total, b, pull)
        pos = pos + step * total
        step *= cooling

    return [
        LayoutNode(chart_id=atlas.charts[i].chart_id,
                   position=(float(pos[i, 0]), float(pos[i, 1])),
                   render_radius=float(radii[i]))
        for i in range(n)
    ]


def count_overlaps(nodes: list[LayoutNode]) -> int:
    pos = np.array([node.position for node in nodes])
    radii = np.array([node.render_radius for node in nodes])
    overlaps = 0
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            need = radii[i] + radii[j] - COLLISION_TOL
            if np.linalg.norm(pos[i] - pos[j]) < need:
                overlaps += 1
    return overlaps


def resolve_collisions(nodes: list[LayoutNode], max_sweeps: int = MAX_SWEEPS) -> list[LayoutNode]:
    """Iteratively push overlapping pairs apart along their center line until
    no two nodes overlap or the sweep budget runs out (best effort beyond it).
    Jammed configurations get a gentle dilation about the centroid every tenth
    sweep, which makes room while preserving the relative arrangement.
    Already-disjoint inputs come back unchanged."""
    if not nodes:
        return []
    pos = np.array([node.position for node in nodes], dtype=np.float64)
    radii = np.array([node.render_radius for node in nodes])
    n = len(nodes)
    fallback = _pair_fallback_directions(n)
    moved = False
    for sweep in range(max_sweeps):
        any_overlap = False
        for i in range(n):
            dist = np.linalg.norm(pos[i] - pos, axis=1)
            candidates = np.nonzero(dist < radii[i] + radii - COLLISION_TOL)[0]
            for j in candidates:
                if j == i:
                    continue
                dvec = pos[i] - pos[j]
                d = float(np.linalg.norm(dvec))
                need = radii[i] + radii[j]
                if d >= need - COLLISION_TOL:
                    continue  # resolved by an earlier push this sweep
                direction = dvec / d if d > 1e-9 else fallback[i]
                push = 0.5 * (need - d) + 1e-9
                pos[i] += push * direction
                pos[j] -= push * direction
                any_overlap = True
                moved = True
        if not any_overlap:
            break
        if (sweep + 1) % 10 == 0:
            center = pos.mean(axis=0)
            pos = center + (pos - center) * 1.02
    if not moved:
        return list(nodes)
    return [
        LayoutNode(chart_id=node.chart_id,
                   position=(float(pos[i, 0]), float(pos[i, 1])),
                   render_radius=node.render_radius)
        for i, node in enumerate(nodes)
    ]


def layout_block(nodes: list[LayoutNode], iterations: int, seed: int) -> dict:
    """The "layout" block embedded in the atlas JSON."""
    return {
        "iterations": iterations,
        "seed": seed,
        "unresolved_overlaps": count_overlaps(nodes),
        "nodes": [
            {
                "chart_id": node.chart_id,
                "x": node.position[0],
                "y": node.position[1],
                "render_radius": node.render_radius,
            }
            for node in nodes
        ],
    }


def compute_layout(atlas: Atlas, iterations: int = DEFAULT_ITERATIONS,
                   seed: int = 0) -> dict:
    """Force layout + collision removal, packaged as the serializable block."""
    nodes = resolve_collisions(force_layout(atlas, iterations=iterations, seed=seed))
    return layout_block(nodes, iterations, seed)
