import numpy as np
import pytest

from latentatlas import (
    GeneratorSpec,
    InputError,
    ParameterError,
    PointCloud,
    build_atlas,
    chart_locality_report,
    generate,
    global_pca,
    import_embedding,
    knn_graph,
    pdist_report,
    reconstruction_errors,
)
from latentatlas.atlas import ambient_to_chart
from latentatlas.evaluation import (
    export_embedding,
    nearest_rows,
    write_error_csv,
    write_histogram_csv,
)
from tests.conftest import make_plane_cloud


# ---------------------------------------------------------------------------
# global PCA


def test_global_pca_rank_one_zero_residuals():
    points = np.outer(np.linspace(0, 1, 20), [1.0, 2.0, 3.0])
    cloud = PointCloud(points=points)
    dist = reconstruction_errors(cloud, global_pca(cloud, 1))
    np.testing.assert_allclose(dist.errors, 0.0, atol=1e-12)


def test_global_pca_full_rank_zero_residuals(rng):
    cloud = PointCloud(points=rng.standard_normal((30, 4)))
    dist = reconstruction_errors(cloud, global_pca(cloud, 4))
    np.testing.assert_allclose(dist.errors, 0.0, atol=1e-9)


def test_global_pca_matches_eigen_oracle(rng):
    points = rng.standard_normal((40, 10))
    cloud = PointCloud(points=points)
    basis = global_pca(cloud, 3)
    centered = points - points.mean(axis=0)
    cov = centered.T @ centered / 39
    _, vecs = np.linalg.eigh(cov)
    top = vecs[:, ::-1][:, :3].T
    assert np.linalg.norm(basis.basis.T @ basis.basis - top.T @ top) < 1e-8


def test_global_pca_d_range_enforced(small_cloud):
    with pytest.raises(ParameterError):
        global_pca(small_cloud, 0)
    with pytest.raises(ParameterError):
        global_pca(small_cloud, small_cloud.dim + 1)


def test_global_residuals_monotone_in_d(rng):
    cloud = PointCloud(points=rng.standard_normal((50, 8)))
    previous = None
    for d in range(1, 7):
        errors = reconstruction_errors(cloud, global_pca(cloud, d)).errors
        if previous is not None:
            assert np.all(errors <= previous + 1e-9)
        previous = errors


# ---------------------------------------------------------------------------
# reconstruction errors


def test_flat_plane_zero_errors_both_ways():
    cloud = make_plane_cloud(n=150, ambient=6, seed=1)
    assert reconstruction_errors(cloud, global_pca(cloud, 2)).summary["mean"] < 1e-12
    atlas = build_atlas(cloud, r=0.6, d_max=4, seed=0)
    local = reconstruction_errors(cloud, atlas)
    assert local.summary["mean"] < 1e-9


def test_atlas_minimal_residual_beats_fixed_chart(rng):
    cloud = make_plane_cloud(n=200, ambient=6, seed=2, noise=0.05)
    atlas = build_atlas(cloud, r=0.5, d_max=3, seed=1)
    local = reconstruction_errors(cloud, atlas).errors
    fixed = atlas.charts[0]
    for row in range(0, 200, 17):
        _, res = ambient_to_chart(fixed, cloud.points[row])
        assert local[row] <= res + 1e-12


def test_error_summary_consistent(rng):
    cloud = PointCloud(points=rng.standard_normal((60, 5)))
    dist = reconstruction_errors(cloud, global_pca(cloud, 2))
    assert dist.summary["mean"] == pytest.approx(dist.errors.mean())
    assert dist.summary["median"] == pytest.approx(np.median(dist.errors))
    assert dist.summary["p5"] == pytest.approx(np.percentile(dist.errors, 5))
    assert dist.summary["p95"] == pytest.approx(np.percentile(dist.errors, 95))


def test_error_csv_schema(tmp_path, rng):
    cloud = PointCloud(points=rng.standard_normal((15, 4)))
    dist = reconstruction_errors(cloud, global_pca(cloud, 2))
    out = tmp_path / "errors.csv"
    write_error_csv([dist], out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "method,d,point_id,error"
    assert len(lines) == 16
    method, d, pid, err = lines[1].split(",")
    assert method == "global-pca" and d == "2" and pid == "0"
    assert float(err) == pytest.approx(dist.errors[0])


# ---------------------------------------------------------------------------
# embedding import


def test_import_embedding_roundtrip(tmp_path, rng):
    cloud = PointCloud(points=rng.standard_normal((25, 6)))
    coords = rng.standard_normal((25, 2))
    path = tmp_path / "emb.csv"
    export_embedding(coords, path)
    loaded = import_embedding(path, cloud)
    np.testing.assert_array_equal(loaded, coords)


def test_import_embedding_row_count_mismatch(tmp_path):
    cloud = PointCloud(points=[[0.0], [1.0], [2.0]])
    path = tmp_path / "emb.csv"
    path.write_text("0,0\n1,1\n")
    with pytest.raises(InputError, match="3 points"):
        import_embedding(path, cloud)


def test_import_embedding_wrong_width(tmp_path):
    cloud = PointCloud(points=[[0.0], [1.0]])
    path = tmp_path / "emb.csv"
    path.write_text("0,0,0\n1,1,1\n")
    with pytest.raises(InputError, match="columns"):
        import_embedding(path, cloud)


# ---------------------------------------------------------------------------
# pairwise-distance histograms


def test_pdist_identity_matches_bruteforce(rng):
    points = rng.standard_normal((12, 4))
    cloud = PointCloud(points=points)
    report = pdist_report(cloud, cloud.point_ids, [("identity", points)],
                          metric="euclidean", bins=10)
    brute = [
        np.linalg.norm(points[i] - points[j])
        for i in range(12) for j in range(i + 1, 12)
    ]
    expected, _ = np.histogram(brute, bins=report.bin_edges)
    np.testing.assert_array_equal(report.histograms["identity"], expected)
    assert report.finite_pairs["identity"] == len(brute)


def test_pdist_two_member_neighborhood(rng):
    points = rng.standard_normal((8, 3))
    cloud = PointCloud(points=points)
    report = pdist_report(cloud, [2, 5], [("identity", points)], bins=6)
    assert report.histograms["identity"].sum() == 1
    assert np.count_nonzero(report.histograms["identity"]) == 1


def test_pdist_stretched_representation_shifts_mass(rng):
    points = rng.standard_normal((20, 5))
    cloud = PointCloud(points=points)
    report = pdist_report(
        cloud, cloud.point_ids,
        [("identity", points), ("stretched", 1.7 * points)],
        bins=20,
    )
    centers = 0.5 * (report.bin_edges[:-1] + report.bin_edges[1:])
    mean_identity = np.average(centers, weights=report.histograms["identity"])
    mean_stretched = np.average(centers, weights=report.histograms["stretched"])
    assert mean_identity < mean_stretched


def test_pdist_mass_conservation_euclidean_and_geodesic(rng):
    points = rng.standard_normal((30, 4))
    cloud = PointCloud(points=points)
    members = cloud.point_ids[:12]
    n_pairs = 12 * 11 // 2
    euclid = pdist_report(cloud, members, [("identity", points)], bins=15)
    assert euclid.histograms["identity"].sum() == n_pairs

    graph = knn_graph(cloud, 3)
    geo = pdist_report(cloud, members, [("identity", points)], metric="geodesic",
                       bins=15, graphs={"identity": graph})
    total = geo.histograms["identity"].sum() + geo.infinite_pairs["identity"]
    assert total == n_pairs
    assert np.all(np.diff(geo.bin_edges) > 0)


def test_pdist_member_aligned_coordinates(rng):
    points = rng.standard_normal((20, 6))
    cloud = PointCloud(points=points)
    members = cloud.point_ids[4:9]
    local = rng.standard_normal((5, 2))
    report = pdist_report(cloud, members, [("local", local)], bins=8)
    assert report.finite_pairs["local"] == 10


def test_pdist_missing_coordinates_error(rng):
    points = rng.standard_normal((20, 6))
    cloud = PointCloud(points=points)
    with pytest.raises(InputError, match="short-rep"):
        pdist_report(cloud, cloud.point_ids[:6], [("short-rep", points[:3])], bins=5)


def test_histogram_csv_schema(tmp_path, rng):
    points = rng.standard_normal((10, 3))
    cloud = PointCloud(points=points)
    report = pdist_report(cloud, cloud.point_ids, [("identity", points)], bins=5)
    out = tmp_path / "hist.csv"
    write_histogram_csv(report, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "method,bin_lo,bin_hi,count"
    assert len(lines) == 6
    total = sum(int(line.split(",")[3]) for line in lines[1:])
    assert total == 45


# ---------------------------------------------------------------------------
# neighborhood locality comparison


def test_nearest_rows_includes_anchor(rng):
    coords = rng.standard_normal((30, 2))
    rows = nearest_rows(coords, 7, 5)
    assert rows[0] == 7 and len(rows) == 5


def test_locality_report_prefers_genuine_balls():
    # swiss roll: a global 2-D projection collapses distant layers together,
    # so chart members should be tighter than projection neighborhoods
    cloud = generate(GeneratorSpec("swiss-roll", 2, 16, 800, noise_sigma=0.05, seed=3))
    atlas = build_atlas(cloud, r=2.0, d_max=6, seed=1)
    basis2 = global_pca(cloud, 2)
    scores = (cloud.points - basis2.mean) @ basis2.basis.T
    report = chart_locality_report(cloud, atlas, [("global-pca-2d", scores)])
    assert report["charts_compared"] > 10
    assert report["local_tightest_fraction"] >= 0.8
    entry = report["per_chart"][0]
    assert set(entry["euclidean"]) == {"local-pca", "global-pca-2d"}


def test_locality_report_geodesic_variant(rng):
    cloud = make_plane_cloud(n=150, ambient=5, seed=5, noise=0.02)
    atlas = build_atlas(cloud, r=0.6, d_max=3, seed=2)
    graph = knn_graph(cloud, 8)
    scores = (cloud.points - cloud.points.mean(0)) @ global_pca(cloud, 2).basis.T
    report = chart_locality_report(cloud, atlas, [("g2", scores)], graph=graph)
    for entry in report["per_chart"]:
        assert "geodesic" in entry
        assert set(entry["geodesic"]) == {"local-pca", "g2"}


def test_locality_report_requires_full_cloud_coords(rng):
    cloud = make_plane_cloud(n=100, ambient=4, seed=6)
    atlas = build_atlas(cloud, r=0.5, d_max=3, seed=3)
    with pytest.raises(InputError):
        chart_locality_report(cloud, atlas, [("bad", rng.standard_normal((10, 2)))])
