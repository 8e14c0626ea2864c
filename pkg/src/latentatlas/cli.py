"""Batch entry points for scripted reproduction of every quantitative result.

Subcommands: generate | estimate-dim | build-atlas | layout | eval-recon |
eval-pdist | serve. Flags mirror config-file keys one-to-one (flags win);
`--seed` threads through every stochastic step and `--workers` never changes
outputs. Exit codes: 0 success, 1 computational degenerate case, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atlas import build_atlas, load_atlas, save_atlas
from .config import load_config_file, merge_config
from .errors import (
    DegenerateEstimateError,
    EmptyScaleError,
    InputError,
    InsufficientNeighborhoodError,
    LatentAtlasError,
    ParameterError,
    ParseError,
)
from .evaluation import (
    chart_locality_report,
    global_pca,
    import_embedding,
    pdist_report,
    reconstruction_errors,
    write_error_csv,
    write_histogram_csv,
    write_report_json,
)
from .geometry import PointCloud, knn_graph, load_point_cloud, save_point_cloud
from .jsonutil import read_json, write_canonical_json
from .layout import compute_layout
from .msvd import estimate_dimension, export_spectrum
from .synth import GeneratorSpec, generate

USAGE_EXIT = 2
DEGENERATE_EXIT = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentatlas",
        description="Local-PCA chart atlases over high-dimensional point clouds.",
        epilog="Exit codes: 0 success, 1 computational degenerate case, 2 usage error.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--seed", type=int, help="seed for every stochastic step")
        p.add_argument("--workers", type=int, help="worker threads (never affects output)")

    p = sub.add_parser("generate", help="sample a synthetic ground-truth manifold")
    common(p)
    p.add_argument("--kind", required=True, choices=["sphere", "linear", "swiss-roll"])
    p.add_argument("--k", type=int, required=True, help="intrinsic dimension")
    p.add_argument("--ambient-dim", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0, help="per-coordinate Gaussian std")
    p.add_argument("--output", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "lgpc-binary"])

    p = sub.add_parser("estimate-dim", help="multiscale intrinsic-dimension estimate")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "lgpc-binary"])
    p.add_argument("--scales", type=int)
    p.add_argument("--centers", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--quad-threshold", type=float, dest="quad_threshold")
    p.add_argument("--r-min", type=float, dest="r_min")
    p.add_argument("--r-max", type=float, dest="r_max")
    p.add_argument("--output-spectrum", help="spectrum CSV path (default <input>.spectrum.csv)")
    p.add_argument("--json", action="store_true", help="machine-readable stdout")

    p = sub.add_parser("build-atlas", help="cover the cloud with local-PCA charts")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "lgpc-binary"])
    p.add_argument("--r", type=float, required=True, help="covering ball radius")
    p.add_argument("--dmax", type=int, help="local dimension cap (default 8)")
    p.add_argument("--output", required=True, help="atlas JSON path")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("layout", help="force-directed 2D layout of the chart graph")
    common(p)
    p.add_argument("--atlas", required=True, help="atlas JSON (layout block written in place)")
    p.add_argument("--iterations", type=int)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval-recon", help="reconstruction error: atlas vs global PCA")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "lgpc-binary"])
    p.add_argument("--atlas", required=True)
    p.add_argument("--global-d", type=int, dest="global_d")
    p.add_argument("--output", help="per-point error CSV (default <atlas>.recon.csv)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval-pdist", help="local pairwise-distance comparison across methods")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "lgpc-binary"])
    p.add_argument("--atlas", required=True)
    p.add_argument("--embedding", required=True, help="imported 2-column embedding CSV")
    p.add_argument("--bins", type=int)
    p.add_argument("--geodesic-k", type=int, dest="geodesic_k")
    p.add_argument("--output-prefix", help="report file prefix (default <atlas>.pdist)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="serve atlas/layout/spectrum/synthesis over HTTP")
    common(p)
    p.add_argument("--port", type=int)
    p.add_argument("--cloud", dest="cloud_path")
    p.add_argument("--atlas", dest="atlas_path")
    p.add_argument("--spectrum", dest="spectrum_path")
    p.add_argument("--decoder-url", dest="decoder_url")
    p.add_argument("--decoder-timeout-ms", type=int, dest="decoder_timeout_ms")
    p.add_argument("--ui-dir", dest="ui_dir", help="serve a built web UI at /ui")
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _config_for(args: argparse.Namespace):
    file_overrides = load_config_file(args.config) if getattr(args, "config", None) else {}
    flag_overrides = {
        key: getattr(args, key)
        for key in (
            "seed", "workers", "scales", "centers", "epsilon", "quad_threshold",
            "r_min", "r_max", "r", "dmax", "iterations", "global_d", "bins",
            "geodesic_k", "port", "cloud_path", "atlas_path", "spectrum_path",
            "decoder_url", "decoder_timeout_ms", "ui_dir",
        )
        if hasattr(args, key) and getattr(args, key) is not None
    }
    return merge_config(file_overrides, flag_overrides)


def _load_cloud(args: argparse.Namespace) -> PointCloud:
    return load_point_cloud(args.input, format=args.format)


def _emit(args: argparse.Namespace, payload: dict, text_lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        for line in text_lines:
            print(line)


def cmd_generate(args) -> int:
    cfg = _config_for(args)
    spec = GeneratorSpec(kind=args.kind, intrinsic_dim=args.k,
                         ambient_dim=args.ambient_dim, count=args.count,
                         noise_sigma=args.noise, seed=cfg.seed)
    cloud = generate(spec)
    save_point_cloud(cloud, args.output, format=args.format)
    print(f"wrote {cloud.n_points} x {cloud.dim} cloud to {args.output}")
    return 0


def cmd_estimate_dim(args) -> int:
    cfg = _config_for(args)
    cloud = _load_cloud(args)
    table, estimate = estimate_dimension(
        cloud,
        scales=cfg.scales,
        centers=cfg.centers,
        epsilon=cfg.epsilon,
        quad_threshold=cfg.quad_threshold,
        seed=cfg.seed,
        workers=cfg.workers,
        r_min=cfg.r_min,
        r_max=cfg.r_max,
    )
    out = args.output_spectrum or str(Path(args.input).with_suffix(".spectrum.csv"))
    export_spectrum(table, estimate, out)
    payload = {
        "k": estimate.k,
        "signal_dims": list(estimate.signal_dims),
        "curvature_dims": list(estimate.curvature_dims),
        "noise_dim_count": len(estimate.noise_dims),
        "r_max": estimate.r_max,
        "optimal_range": list(estimate.optimal_range),
        "epsilon": estimate.epsilon,
        "spectrum_csv": out,
    }
    _emit(args, payload, [
        f"k={estimate.k}",
        f"signal_dims={list(estimate.signal_dims)}",
        f"curvature_dims={list(estimate.curvature_dims)}",
        f"optimal_range=[{estimate.optimal_range[0]!r}, {estimate.optimal_range[1]!r}]",
        f"spectrum written to {out}",
    ])
    return 0


def cmd_build_atlas(args) -> int:
    cfg = _config_for(args)
    cloud = _load_cloud(args)
    atlas = build_atlas(cloud, r=args.r, d_max=cfg.dmax, seed=cfg.seed,
                        workers=cfg.workers)
    save_atlas(atlas, args.output)
    payload = {
        "charts": len(atlas.charts),
        "edges": len(atlas.edges),
        "d_max": atlas.d_max,
        "atlas_json": args.output,
    }
    _emit(args, payload, [
        f"{len(atlas.charts)} charts, {len(atlas.edges)} edges (d_max={atlas.d_max})",
        f"atlas written to {args.output}",
    ])
    return 0


def cmd_layout(args) -> int:
    cfg = _config_for(args)
    atlas = load_atlas(args.atlas)
    block = compute_layout(atlas, iterations=cfg.iterations, seed=cfg.seed)
    doc = read_json(args.atlas)
    doc["layout"] = block
    write_canonical_json(doc, args.atlas)
    payload = {
        "nodes": len(block["nodes"]),
        "unresolved_overlaps": block["unresolved_overlaps"],
        "atlas_json": args.atlas,
    }
    _emit(args, payload, [
        f"laid out {len(block['nodes'])} nodes "
        f"({block['unresolved_overlaps']} unresolved overlaps)",
        f"layout block written into {args.atlas}",
    ])
    return 0


def cmd_eval_recon(args) -> int:
    cfg = _config_for(args)
    cloud = _load_cloud(args)
    atlas = load_atlas(args.atlas)
    basis = global_pca(cloud, cfg.global_d)
    dist_global = reconstruction_errors(cloud, basis)
    dist_local = reconstruction_errors(cloud, atlas)
    out = args.output or f"{args.atlas}.recon.csv"
    write_error_csv([dist_global, dist_local], out)
    payload = {
        "global": {"d": dist_global.dimension, **dist_global.summary},
        "local": {"d_max": dist_local.dimension, **dist_local.summary},
        "local_mean_below_global_mean":
            bool(dist_local.summary["mean"] < dist_global.summary["mean"]),
        "errors_csv": out,
    }
    _emit(args, payload, [
        f"global-pca d={dist_global.dimension}: mean={dist_global.summary['mean']:.6g} "
        f"median={dist_global.summary['median']:.6g}",
        f"local-pca d_max={dist_local.dimension}: mean={dist_local.summary['mean']:.6g} "
        f"median={dist_local.summary['median']:.6g}",
        f"errors written to {out}",
    ])
    return 0


def cmd_eval_pdist(args) -> int:
    cfg = _config_for(args)
    cloud = _load_cloud(args)
    atlas = load_atlas(args.atlas)
    embedding = import_embedding(args.embedding, cloud)
    basis2 = global_pca(cloud, 2)
    scores2 = (cloud.points - basis2.mean) @ basis2.basis.T
    representations = [("global-pca-2d", scores2), ("embedding-2d", embedding)]

    ambient_graph = knn_graph(cloud, min(cfg.geodesic_k, cloud.n_points - 1))
    locality = chart_locality_report(cloud, atlas, representations, graph=ambient_graph)

    prefix = args.output_prefix or f"{args.atlas}.pdist"
    write_report_json(locality, f"{prefix}.json")
    _write_locality_csv(locality, f"{prefix}.csv")

    # Figure-style histograms for the largest chart's neighborhood: pairwise
    # distances under each method's own coordinates, Euclidean and geodesic.
    chart = max(atlas.charts, key=lambda c: (len(c.members), -c.chart_id))
    member_rows = cloud.rows_for(chart.members)
    offsets = cloud.points[member_rows] - chart.mean
    local_coords = offsets @ chart.basis.T
    reps = [("local-pca", local_coords),
            ("global-pca-2d", scores2),
            ("embedding-2d", embedding)]
    hist_e = pdist_report(cloud, chart.members, reps, metric="euclidean",
                          bins=cfg.bins, neighborhood_id=chart.chart_id)
    graphs = {}
    for label, coords in reps:
        rep_cloud = (PointCloud(points=coords, point_ids=chart.members)
                     if len(coords) == len(chart.members)
                     else PointCloud(points=coords, point_ids=cloud.point_ids))
        k = min(cfg.geodesic_k, rep_cloud.n_points - 1)
        graphs[label] = knn_graph(rep_cloud, k, allow_zero_weights=True)
    hist_g = pdist_report(cloud, chart.members, reps, metric="geodesic",
                          bins=cfg.bins, graphs=graphs,
                          neighborhood_id=chart.chart_id)
    write_histogram_csv(hist_e, f"{prefix}.euclidean.csv")
    write_histogram_csv(hist_g, f"{prefix}.geodesic.csv")

    payload = {
        "charts_compared": locality["charts_compared"],
        "local_tightest_count": locality["local_tightest_count"],
        "local_tightest_fraction": locality["local_tightest_fraction"],
        "report_json": f"{prefix}.json",
        "report_csv": f"{prefix}.csv",
        "histogram_euclidean_csv": f"{prefix}.euclidean.csv",
        "histogram_geodesic_csv": f"{prefix}.geodesic.csv",
    }
    _emit(args, payload, [
        f"local neighborhoods tightest for {locality['local_tightest_count']} of "
        f"{locality['charts_compared']} charts "
        f"({100.0 * locality['local_tightest_fraction']:.1f}%)",
        f"reports written to {prefix}.json / {prefix}.csv / "
        f"{prefix}.euclidean.csv / {prefix}.geodesic.csv",
    ])
    return 0


def _write_locality_csv(locality: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("chart_id,metric,method,median_distance,members\n")
        for entry in locality["per_chart"]:
            for metric in ("euclidean", "geodesic"):
                if metric not in entry:
                    continue
                for method, median in entry[metric].items():
                    value = repr(float(median)) if np.isfinite(median) else "inf"
                    fh.write(f"{entry['chart_id']},{metric},{method},{value},"
                             f"{entry['members']}\n")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app_from_config

    cfg = _config_for(args)
    service_config = ServiceConfig(
        port=cfg.port,
        cloud_path=cfg.cloud_path,
        atlas_path=cfg.atlas_path,
        spectrum_path=cfg.spectrum_path,
        decoder_url=cfg.decoder_url,
        decoder_timeout_ms=cfg.decoder_timeout_ms,
        ui_dir=cfg.ui_dir,
    )
    app = create_app_from_config(service_config)
    uvicorn.run(app, host=args.host, port=service_config.port, log_level="warning")
    return 0


_HANDLERS = {
    "generate": cmd_generate,
    "estimate-dim": cmd_estimate_dim,
    "build-atlas": cmd_build_atlas,
    "layout": cmd_layout,
    "eval-recon": cmd_eval_recon,
    "eval-pdist": cmd_eval_pdist,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (DegenerateEstimateError, EmptyScaleError, InsufficientNeighborhoodError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DEGENERATE_EXIT
    except (ParseError, ParameterError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except LatentAtlasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DEGENERATE_EXIT


if __name__ == "__main__":
    sys.exit(main())
