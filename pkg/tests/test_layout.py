import numpy as np
import pytest

from latentatlas import build_atlas, force_layout, resolve_collisions
from latentatlas.layout import (
    REPULSION,
    REST_LENGTH,
    LayoutNode,
    compute_layout,
    count_overlaps,
)
from tests.conftest import make_plane_cloud


def two_chart_atlas():
    cloud = make_plane_cloud(n=40, ambient=4, seed=1)
    # radius spanning half the cloud: two overlapping charts
    for r in np.linspace(1.2, 2.0, 9):
        atlas = build_atlas(cloud, r=float(r), d_max=4, seed=0)
        if len(atlas.charts) == 2 and len(atlas.edges) == 1:
            return atlas
    raise AssertionError("could not construct a 2-chart, 1-edge atlas")


def analytic_equilibrium(rest: float, repulsion: float) -> float:
    """Force balance for two linked nodes: (d - rest) = repulsion / d."""
    return (rest + np.sqrt(rest**2 + 4 * repulsion)) / 2


def disjoint_nodes():
    return [
        LayoutNode(chart_id=0, position=(0.0, 0.0), render_radius=1.0),
        LayoutNode(chart_id=1, position=(5.0, 0.0), render_radius=1.0),
        LayoutNode(chart_id=2, position=(0.0, 7.0), render_radius=1.5),
    ]


# ---------------------------------------------------------------------------
# force layout


def test_single_chart_at_origin(small_cloud):
    atlas = build_atlas(small_cloud, r=1e3, d_max=8, seed=0)
    nodes = force_layout(atlas, seed=3)
    assert len(nodes) == 1
    assert nodes[0].position == (0.0, 0.0)
    assert nodes[0].render_radius == 1.0


def test_two_linked_charts_settle_at_analytic_fixed_point():
    atlas = two_chart_atlas()
    nodes = force_layout(atlas, iterations=300, seed=5)
    separation = np.linalg.norm(np.array(nodes[0].position) - np.array(nodes[1].position))
    expected = analytic_equilibrium(REST_LENGTH, REPULSION)
    assert abs(separation - expected) <= 0.1 * expected


def test_pure_repulsion_spreads_nodes():
    cloud = make_plane_cloud(n=30, ambient=4, seed=2)
    # three singleton-ish charts far apart: no overlap edges
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    from latentatlas import PointCloud

    atlas = build_atlas(PointCloud(points=pts), r=1.0, d_max=2, seed=0)
    assert len(atlas.charts) == 3 and atlas.edges == ()
    nodes = force_layout(atlas, iterations=300, seed=6)
    pos = np.array([n.position for n in nodes])
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.linalg.norm(pos[i] - pos[j]) >= REST_LENGTH


def test_layout_deterministic():
    atlas = two_chart_atlas()
    a = force_layout(atlas, iterations=120, seed=9)
    b = force_layout(atlas, iterations=120, seed=9)
    assert [n.position for n in a] == [n.position for n in b]


def test_translation_invariance():
    cloud = make_plane_cloud(n=120, ambient=5, seed=3)
    atlas = build_atlas(cloud, r=0.6, d_max=4, seed=1)
    n = len(atlas.charts)
    rng = np.random.default_rng(0)
    init = rng.uniform(0, 3, size=(n, 2))
    shift = np.array([12.5, -4.0])
    base = force_layout(atlas, iterations=150, initial_positions=init)
    moved = force_layout(atlas, iterations=150, initial_positions=init + shift)
    for a, b in zip(base, moved):
        np.testing.assert_allclose(np.array(b.position),
                                   np.array(a.position) + shift, atol=1e-9)


def test_render_radius_area_encoding():
    cloud = make_plane_cloud(n=200, ambient=5, seed=4)
    atlas = build_atlas(cloud, r=0.5, d_max=4, seed=2)
    nodes = force_layout(atlas, iterations=50, seed=0)
    counts = {c.chart_id: len(c.members) for c in atlas.charts}
    radii = {n.chart_id: n.render_radius for n in nodes}
    assert max(radii.values()) == pytest.approx(1.0)
    biggest = max(counts, key=counts.get)
    assert radii[biggest] == pytest.approx(1.0)
    for node in nodes:
        expected = np.sqrt(counts[node.chart_id] / counts[biggest])
        assert node.render_radius == pytest.approx(expected)


# ---------------------------------------------------------------------------
# collision removal


def test_disjoint_nodes_unchanged():
    nodes = disjoint_nodes()
    resolved = resolve_collisions(nodes)
    assert [n.position for n in resolved] == [n.position for n in nodes]


def test_coincident_pair_separated():
    nodes = [
        LayoutNode(chart_id=0, position=(1.0, 1.0), render_radius=1.0),
        LayoutNode(chart_id=1, position=(1.0, 1.0), render_radius=1.0),
    ]
    resolved = resolve_collisions(nodes)
    separation = np.linalg.norm(
        np.array(resolved[0].position) - np.array(resolved[1].position)
    )
    assert separation >= 2.0 - 1e-6


@pytest.mark.parametrize("n_nodes,seed", [(50, 0), (120, 1), (200, 2)])
def test_random_overlaps_fully_resolved(n_nodes, seed):
    rng = np.random.default_rng(seed)
    nodes = [
        LayoutNode(chart_id=i,
                   position=tuple(rng.uniform(0, np.sqrt(n_nodes), 2)),
                   render_radius=float(rng.uniform(0.2, 1.0)))
        for i in range(n_nodes)
    ]
    resolved = resolve_collisions(nodes)
    # exhaustive pair scan, independent of count_overlaps
    pos = np.array([n.position for n in resolved])
    radii = np.array([n.render_radius for n in resolved])
    overlapping = 0
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if np.linalg.norm(pos[i] - pos[j]) < radii[i] + radii[j] - 1e-6:
                overlapping += 1
    assert overlapping == 0
    assert count_overlaps(resolved) == 0


def test_collision_resolution_deterministic():
    rng = np.random.default_rng(5)
    nodes = [
        LayoutNode(chart_id=i, position=tuple(rng.uniform(0, 2, 2)),
                   render_radius=0.6)
        for i in range(30)
    ]
    a = resolve_collisions(nodes)
    b = resolve_collisions(nodes)
    assert [n.position for n in a] == [n.position for n in b]


def test_compute_layout_block_schema():
    cloud = make_plane_cloud(n=150, ambient=5, seed=6)
    atlas = build_atlas(cloud, r=0.55, d_max=4, seed=3)
    block = compute_layout(atlas, iterations=80, seed=4)
    assert block["iterations"] == 80 and block["seed"] == 4
    assert block["unresolved_overlaps"] == 0
    assert len(block["nodes"]) == len(atlas.charts)
    for node in block["nodes"]:
        assert set(node) == {"chart_id", "x", "y", "render_radius"}
