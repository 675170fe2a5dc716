"""Command-line interface for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Verbs:
    polygonize    PGM masks -> simplified GeoJSON polygons
    simplify      GeoJSON in -> simplified GeoJSON out
    evaluate      predicted vs ground-truth GeoJSON -> metric report
    oracle-check  dynamic program vs exhaustive search on random polylines
    bench         timing table of the dynamic program
    sweep         objective, IoU and N-ratio over a grid of lambda values

Exit codes: 0 success, 1 oracle failure, 2 input or configuration error.
"""

import argparse
import csv
import io
import json
import logging
import statistics
import sys
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np

from gcpoly import __version__
from gcpoly import io as gio
from gcpoly.config import LOG_LEVELS, PRESETS, RunConfig, effective_threads, resolve_config
from gcpoly.contour import RasterMask, initial_polylines, largest_component, reassemble, segment_windows, trace_contours
from gcpoly.errors import ConfigError, GcpolyError, InputFormatError
from gcpoly.geometry import Polygon, Polyline
from gcpoly.metrics import EvalCanvas, MetricReport, evaluate_set, n_ratio, rasterize
from gcpoly.simplify import (
    ALGORITHMS,
    BRUTE_FORCE_LIMIT,
    Selection,
    SimplifyParams,
    brute_force_simplify,
    douglas_peucker,
    full_selection,
    gcp_simplify,
    simplify_polygon,
    simplify_polyline,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

ORACLE_TOLERANCE = 1e-9
ORACLE_FAMILIES = ("uniform", "rectilinear", "collinear")
# Failing polylines kept in the oracle report.
ORACLE_EXAMPLES = 5
# Largest size for which bench also runs the unbounded (k_max = T) solve.
UNBOUNDED_CHECK_LIMIT = 256

DEFAULT_LAMBDAS = (0.0, 0.5, 1.0, 2.0, 4.0)
DEFAULT_SWEEP_LAMBDAS = (0.0, 1.0, 2.0, 4.0, 8.0)
DEFAULT_SIZES = (128, 256, 512, 1024)


def setup_logging(level: str) -> None:
    """Send log records to stderr at the given level."""
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, stream=sys.stderr, force=True)


def _fmt(value: float) -> str:
    return f"{value:.{gio.SIGNIFICANT_DIGITS}g}"


def _config_comment(config: RunConfig) -> str:
    return "# config " + json.dumps(gio.round_floats(config.to_dict()), sort_keys=True, separators=(",", ":"))


def _map(func: Callable[[Any], Any], items: Sequence[Any], workers: int) -> list[Any]:
    """Map in input order, in a process pool when workers > 1."""
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    logger.info("Running %d jobs on %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------- polygonize


def polygonize_mask(mask: RasterMask, config: RunConfig) -> tuple[Polygon, Polygon, list[Selection]]:
    """Run the mask-to-polygon pipeline on one mask.

    Returns:
        Tuple of (initial polygon before simplification, simplified polygon,
        one selection per simplified ring)
    """
    component = largest_component(mask)
    traced = trace_contours(component)
    lines = initial_polylines(traced, config.step, config.l_max)
    lines = reassemble(segment_windows(lines, config.window))
    initial = Polygon(lines[0], tuple(lines[1:]))
    simplified, selections = simplify_polygon(initial, config.simplify_params(), config.algorithm, config.dp_tolerance)
    logger.debug("Polygon reduced from %d to %d vertices", initial.vertex_count(), simplified.vertex_count())
    return initial, simplified, selections


def _polygonize_one(path: Path, config: RunConfig) -> dict[str, Any]:
    try:
        _, polygon, selections = polygonize_mask(gio.read_pgm(path), config)
    except GcpolyError as e:
        return {"error": {"source": str(path), "message": str(e)}}
    distance = sum(sel.distance_sum for sel in selections)
    properties = {
        "source": str(path),
        "image_id": Path(path).stem,
        "algorithm": config.algorithm,
        "lambda": config.lam,
        "k_max": config.k_max,
        "distance_sum": distance,
        "total_cost": sum(sel.total_cost for sel in selections),
        "vertex_count": polygon.vertex_count(),
    }
    return {"feature": gio.feature(gio.polygon_geometry(polygon), properties)}


def cmd_polygonize(paths: Sequence[Path], config: RunConfig) -> tuple[dict[str, Any], int]:
    """Polygonize PGM masks.

    Returns:
        Tuple of (FeatureCollection, number of masks that failed)
    """
    results = _map(partial(_polygonize_one, config=config), list(paths), effective_threads(config))
    features = [r["feature"] for r in results if "feature" in r]
    errors = [r["error"] for r in results if "error" in r]
    for err in errors:
        logger.error("%s: %s", err["source"], err["message"])
    return gio.feature_collection(features, config.to_dict(), errors), len(errors)


# --------------------------------------------------------------------------- simplify


def simplify_line(line: Polyline, config: RunConfig) -> Selection:
    """Simplify one polyline; a closed one never collapses below a triangle."""
    sel = simplify_polyline(line, config.simplify_params(), config.algorithm, config.dp_tolerance)
    if line.closed and sel.vertex_count < 4:
        return full_selection(line, config.lam)
    return sel


def _simplify_feature(item: dict[str, Any], config: RunConfig) -> dict[str, Any]:
    shapes = gio.parse_geometry(item["geometry"])
    properties = dict(item.get("properties") or {})
    properties.update({"algorithm": config.algorithm, "lambda": config.lam, "k_max": config.k_max})

    if isinstance(shapes[0], Polyline):
        line = shapes[0]
        sel = simplify_line(line, config)
        properties.update(
            {
                "indices": list(sel.indices),
                "input_vertex_count": len(line),
                "vertex_count": sel.vertex_count,
                "distance_sum": sel.distance_sum,
                "total_cost": sel.total_cost,
            }
        )
        return gio.feature(gio.polyline_geometry(sel.apply(line)), properties)

    params = config.simplify_params()
    results = [simplify_polygon(p, params, config.algorithm, config.dp_tolerance) for p in shapes]
    polygons = [polygon for polygon, _ in results]
    selections = [sel for _, sels in results for sel in sels]
    geometry = gio.polygons_geometry(polygons)
    properties.update(
        {
            "input_vertex_count": sum(p.vertex_count() for p in shapes),
            "vertex_count": sum(p.vertex_count() for p in polygons),
            "distance_sum": sum(sel.distance_sum for sel in selections),
            "total_cost": sum(sel.total_cost for sel in selections),
        }
    )
    return gio.feature(geometry, properties)


def cmd_simplify(path: Path, config: RunConfig) -> dict[str, Any]:
    """Simplify every geometry of a GeoJSON file.

    Raises:
        InputFormatError: On malformed GeoJSON
    """
    features = [_simplify_feature(item, config) for item in gio.read_features(path)]
    logger.info("Simplified %d features from %s", len(features), path)
    return gio.feature_collection(features, config.to_dict())


# --------------------------------------------------------------------------- evaluate


def cmd_evaluate(pred_path: Path, gt_path: Path, config: RunConfig, allow_missing: bool = False) -> MetricReport:
    """Evaluate predicted polygons against ground truth, image by image.

    Raises:
        InputFormatError: If image ids differ and allow_missing is False
    """
    preds = gio.polygons_by_image(pred_path)
    gts = gio.polygons_by_image(gt_path)
    missing = sorted(set(preds) ^ set(gts))
    if missing and not allow_missing:
        raise InputFormatError(f"Image ids present on one side only: {', '.join(missing)}")
    if missing:
        logger.warning("Treating %d image(s) missing on one side as empty", len(missing))
    ids = sorted(set(preds) | set(gts))
    return evaluate_set([preds.get(i, []) for i in ids], [gts.get(i, []) for i in ids], config.canvas, ids)


def metric_table(report: MetricReport) -> str:
    """Human-readable summary of a report."""

    def cell(value: float | None) -> str:
        return "-" if value is None else f"{value:.4f}"

    lines = [f"{'image':<20} {'iou':>8} {'c_iou':>8} {'n_ratio':>8} {'mta':>8}"]
    for row in report.images:
        lines.append(
            f"{row.image_id:<20} {cell(row.iou):>8} {cell(row.c_iou):>8} {cell(row.n_ratio):>8} {cell(row.mta):>8}"
        )
    lines.append(
        f"{'mean':<20} {cell(report.iou):>8} {cell(report.c_iou):>8} {cell(report.n_ratio):>8} {cell(report.mta):>8}"
    )
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- oracle-check


def random_polyline(rng: np.random.Generator, count: int, family: str) -> Polyline:
    """A seeded random polyline from one of ORACLE_FAMILIES."""
    if family == "uniform":
        points = rng.uniform(0.0, 100.0, size=(count, 2))
    elif family == "rectilinear":
        moves = np.zeros((count - 1, 2))
        axis = rng.integers(0, 2, size=count - 1)
        moves[np.arange(count - 1), axis] = rng.integers(1, 6, size=count - 1) * rng.choice([-1, 1], size=count - 1)
        points = 50.0 + np.vstack([[0.0, 0.0], np.cumsum(moves, axis=0)])
    elif family == "collinear":
        angle = rng.uniform(0.0, 2 * np.pi)
        along = np.cumsum(rng.uniform(0.5, 5.0, size=count))
        points = rng.uniform(0.0, 50.0, size=2) + along[:, None] * np.array([np.cos(angle), np.sin(angle)])
    else:
        raise ConfigError(f"Unknown polyline family: {family}")
    return Polyline(points)


def _selection_dict(sel: Selection) -> dict[str, Any]:
    return {"indices": list(sel.indices), "vertex_count": sel.vertex_count, "total_cost": sel.total_cost}


def cmd_oracle_check(
    config: RunConfig,
    trials: int = 1000,
    max_len: int = 14,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    perturb: bool = False,
) -> tuple[dict[str, Any], bool]:
    """Compare gcp_simplify with brute_force_simplify on seeded random polylines.

    Every trial draws a length in [2, max_len] and runs each lambda with
    k_max of 3 and of the full length.

    Returns:
        Tuple of (report, whether every comparison agreed)

    Raises:
        ConfigError: If max_len or trials are out of range
    """
    if not 2 <= max_len <= BRUTE_FORCE_LIMIT:
        raise ConfigError(f"max_len must be between 2 and {BRUTE_FORCE_LIMIT}, got {max_len}")
    if trials < 0:
        raise ConfigError(f"trials must be non-negative, got {trials}")

    rng = np.random.default_rng(config.seed)
    checks = 0
    failures = 0
    max_dev = 0.0
    examples: list[dict[str, Any]] = []
    for trial in range(trials):
        family = ORACLE_FAMILIES[trial % len(ORACLE_FAMILIES)]
        count = int(rng.integers(2, max_len + 1))
        line = random_polyline(rng, count, family)
        for lam in lambdas:
            for k_max in sorted({3, max(count, 2)}):
                params = SimplifyParams(lam=lam, k_max=k_max)
                fast = gcp_simplify(line, params, perturb=perturb)
                slow = brute_force_simplify(line, params)
                dev = abs(fast.total_cost - slow.total_cost)
                max_dev = max(max_dev, dev)
                checks += 1
                if dev <= ORACLE_TOLERANCE and fast.indices == slow.indices:
                    continue
                failures += 1
                if len(examples) < ORACLE_EXAMPLES:
                    case = {"trial": trial, "family": family, "lambda": lam, "k_max": k_max}
                    feature = gio.feature(gio.polyline_geometry(line), case)
                    logger.error("Oracle mismatch: %s", json.dumps(gio.round_floats(feature), sort_keys=True))
                    examples.append(
                        {
                            **case,
                            "polyline": feature,
                            "gcp": _selection_dict(fast),
                            "brute_force": _selection_dict(slow),
                        }
                    )

    passed = failures == 0
    report = {
        "config": config.to_dict(),
        "trials": trials,
        "max_len": max_len,
        "lambdas": list(lambdas),
        "perturb_dp": perturb,
        "checks": checks,
        "failures": failures,
        "max_deviation": max_dev,
        "passed": passed,
        "examples": examples,
    }
    logger.info("Oracle check: %d comparisons, %d failures, max deviation %.3g", checks, failures, max_dev)
    return report, passed


# --------------------------------------------------------------------------- bench


def bench_polyline(rng: np.random.Generator, count: int) -> Polyline:
    """A random-walk polyline used for timing."""
    return Polyline(np.cumsum(rng.normal(0.0, 1.0, size=(count, 2)), axis=0))


def log_log_slope(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    """Least-squares slope of log(seconds) against log(size)."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])


def cmd_bench(
    config: RunConfig,
    sizes: Sequence[int] = DEFAULT_SIZES,
    kmax_list: Sequence[int] | None = None,
    repetitions: int = 3,
) -> str:
    """Time gcp_simplify over polyline sizes and k_max values.

    Returns:
        CSV text; timings vary from run to run

    Raises:
        ConfigError: On unsorted sizes or bad counts
    """
    if list(sizes) != sorted(sizes) or any(t < 2 for t in sizes):
        raise ConfigError(f"sizes must be ascending and at least 2: {list(sizes)}")
    if repetitions < 1:
        raise ConfigError(f"repetitions must be at least 1, got {repetitions}")
    kmax_list = list(kmax_list) if kmax_list else [config.k_max]

    rng = np.random.default_rng(config.seed)
    lines = {t: bench_polyline(rng, t) for t in sizes}
    buffer = io.StringIO()
    buffer.write(_config_comment(config) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["T", "k_max", "repetitions", "median_seconds", "vertex_count", "matches_unbounded"])

    medians: dict[int, list[float]] = {k: [] for k in kmax_list}
    for t in sizes:
        line = lines[t]
        unbounded = None
        if t <= UNBOUNDED_CHECK_LIMIT:
            unbounded = gcp_simplify(line, SimplifyParams(lam=config.lam, k_max=t))
        for k_max in kmax_list:
            params = SimplifyParams(lam=config.lam, k_max=k_max)
            timings = []
            for _ in range(repetitions):
                start = time.perf_counter()
                sel = gcp_simplify(line, params)
                timings.append(time.perf_counter() - start)
            median = statistics.median(timings)
            medians[k_max].append(median)
            matches = "" if unbounded is None else str(sel.indices == unbounded.indices).lower()
            writer.writerow([t, k_max, repetitions, _fmt(median), sel.vertex_count, matches])
            logger.info("T=%d k_max=%d median %.4fs", t, k_max, median)

    if len(sizes) >= 2:
        for k_max in kmax_list:
            buffer.write(f"# slope k_max={k_max} {log_log_slope(sizes, medians[k_max]):.3f}\n")
    return buffer.getvalue()


# --------------------------------------------------------------------------- sweep


def _sweep_sources(paths: Sequence[Path], config: RunConfig) -> list[tuple[Polygon, np.ndarray, EvalCanvas]]:
    """(unsimplified polygon, reference mask, canvas) for every input polygon."""
    sources = []
    for path in paths:
        if Path(path).suffix.lower() == ".pgm":
            mask = largest_component(gio.read_pgm(path))
            lines = initial_polylines(trace_contours(mask), config.step, config.l_max)
            canvas = EvalCanvas(mask.width, mask.height, config.canvas.supersample)
            sources.append((Polygon(lines[0], tuple(lines[1:])), mask.values, canvas))
            continue
        for item in gio.read_features(path):
            for shape in gio.parse_geometry(item["geometry"]):
                if isinstance(shape, Polygon):
                    sources.append((shape, rasterize([shape], config.canvas).values, config.canvas))
    if not sources:
        raise InputFormatError("sweep found no polygon in its inputs")
    return sources


def cmd_sweep(paths: Sequence[Path], config: RunConfig, lambdas: Sequence[float] = DEFAULT_SWEEP_LAMBDAS) -> str:
    """Objective terms, IoU and N-ratio of gcp across a lambda grid.

    Each row also carries the mean objective Douglas-Peucker reaches on the
    same rings with the configured tolerance.

    Returns:
        CSV text
    """
    sources = _sweep_sources(paths, config)
    tol = config.dp_tolerance

    def run(lam: float) -> list[tuple[Polygon, list[Selection]]]:
        params = SimplifyParams(lam=lam, k_max=config.k_max)
        return [simplify_polygon(polygon, params, "gcp") for polygon, _, _ in sources]

    baseline = [polygon for polygon, _ in run(0.0)]
    buffer = io.StringIO()
    buffer.write(_config_comment(config) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "lambda",
            "polygons",
            "mean_vertices",
            "mean_distance_sum",
            "mean_total_cost",
            "dp_mean_total_cost",
            "mean_iou",
            "n_ratio",
        ]
    )
    for lam in lambdas:
        results = run(lam)
        vertices, dist, total, dp_total, overlap = [], [], [], [], []
        for (polygon, ref, canvas), (simplified, sels) in zip(sources, results, strict=True):
            vertices.append(simplified.vertex_count())
            dist.append(sum(s.distance_sum for s in sels))
            total.append(sum(s.total_cost for s in sels))
            dp_total.append(sum(douglas_peucker(ring, tol, lam).total_cost for ring in polygon.rings()))
            mask = rasterize([simplified], canvas).values
            union = np.logical_or(mask, ref).sum()
            overlap.append(float(np.logical_and(mask, ref).sum() / union) if union else 1.0)
        ratio = n_ratio([polygon for polygon, _ in results], baseline)
        writer.writerow(
            [
                _fmt(lam),
                len(sources),
                _fmt(float(np.mean(vertices))),
                _fmt(float(np.mean(dist))),
                _fmt(float(np.mean(total))),
                _fmt(float(np.mean(dp_total))),
                _fmt(float(np.mean(overlap))),
                _fmt(ratio),
            ]
        )
        logger.info("lambda=%g mean vertices %.2f", lam, np.mean(vertices))
    return buffer.getvalue()


# --------------------------------------------------------------------------- argument parsing


def _number_list(kind: type) -> Callable[[str], list]:
    def parse(text: str) -> list:
        try:
            return [kind(part) for part in text.split(",") if part.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}") from e

    return parse


def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("configuration")
    group.add_argument("--config", type=Path, help="JSON config file")
    group.add_argument("--preset", choices=sorted(PRESETS), help="Dataset preset for lambda")
    group.add_argument("--lambda", dest="lam", type=float, help="Weight per kept vertex (default 2)")
    group.add_argument("--kmax", dest="k_max", type=int, help="Longest index gap of a kept edge (default 64)")
    group.add_argument("--step", type=float, help="Contour resampling step in pixels (default 4)")
    group.add_argument("--window", type=int, help="Sliding window size (default 64)")
    group.add_argument("--lmax", dest="l_max", type=int, help="Maximum points per contour (default 512)")
    group.add_argument("--algorithm", choices=ALGORITHMS, help="Simplifier (default gcp)")
    group.add_argument("--tolerance", dest="dp_tolerance", type=float, help="Douglas-Peucker tolerance (default 1)")
    group.add_argument("--seed", type=int, help="Random seed (default 0)")
    group.add_argument("--threads", type=int, help="Worker processes, capped by $GCPOLY_THREADS (default 1)")
    group.add_argument("--canvas-width", type=int, help="Evaluation canvas width (default 300)")
    group.add_argument("--canvas-height", type=int, help="Evaluation canvas height (default 300)")
    group.add_argument("--supersample", type=int, help="Evaluation supersampling factor (default 1)")
    group.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="Log level (default WARNING)")
    parent.add_argument("--out", type=Path, help="Output file (default stdout)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """The gcpoly argument parser."""
    parser = argparse.ArgumentParser(prog="gcpoly", description="Collinearity-aware building polygonization")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True)
    parent = _config_parent()

    p = verbs.add_parser("polygonize", parents=[parent], help="PGM masks to simplified GeoJSON polygons")
    p.add_argument("masks", nargs="+", type=Path, help="PGM mask files")
    p.set_defaults(handler=_run_polygonize)

    p = verbs.add_parser("simplify", parents=[parent], help="Simplify GeoJSON LineStrings and Polygons")
    p.add_argument("input", type=Path, help="GeoJSON Feature or FeatureCollection")
    p.set_defaults(handler=_run_simplify)

    p = verbs.add_parser("evaluate", parents=[parent], help="IoU, C-IoU, N-ratio and MTA against ground truth")
    p.add_argument("pred", type=Path, help="Predicted polygons (GeoJSON with image_id properties)")
    p.add_argument("gt", type=Path, help="Ground-truth polygons (GeoJSON with image_id properties)")
    p.add_argument("--allow-missing", action="store_true", help="Treat images missing on one side as empty")
    p.set_defaults(handler=_run_evaluate)

    p = verbs.add_parser("oracle-check", parents=[parent], help="Check the dynamic program against brute force")
    p.add_argument("--trials", type=int, default=1000, help="Random polylines to test (default 1000)")
    p.add_argument("--max-len", type=int, default=14, help="Longest random polyline (default 14)")
    p.add_argument("--lambdas", type=_number_list(float), default=list(DEFAULT_LAMBDAS), help="Comma-separated lambdas")
    p.add_argument("--perturb-dp", action="store_true", help="Break the dynamic program on purpose (testing only)")
    p.set_defaults(handler=_run_oracle_check)

    p = verbs.add_parser("bench", parents=[parent], help="Time the dynamic program")
    p.add_argument("--sizes", type=_number_list(int), default=list(DEFAULT_SIZES), help="Comma-separated sizes")
    p.add_argument("--kmax-list", type=_number_list(int), default=None, help="Comma-separated k_max values")
    p.add_argument("--repetitions", type=int, default=3, help="Timed runs per cell (default 3)")
    p.set_defaults(handler=_run_bench)

    p = verbs.add_parser("sweep", parents=[parent], help="Simplification statistics over a lambda grid")
    p.add_argument("inputs", nargs="+", type=Path, help="PGM masks or GeoJSON files")
    p.add_argument(
        "--lambdas", type=_number_list(float), default=list(DEFAULT_SWEEP_LAMBDAS), help="Comma-separated lambdas"
    )
    p.set_defaults(handler=_run_sweep)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "lambda": args.lam,
        "k_max": args.k_max,
        "step": args.step,
        "window": args.window,
        "l_max": args.l_max,
        "algorithm": args.algorithm,
        "dp_tolerance": args.dp_tolerance,
        "seed": args.seed,
        "threads": args.threads,
        "log_level": args.log_level,
        "canvas": {"width": args.canvas_width, "height": args.canvas_height, "supersample": args.supersample},
    }


def _run_polygonize(args: argparse.Namespace, config: RunConfig) -> int:
    collection, failed = cmd_polygonize(args.masks, config)
    gio.write_text(gio.dumps(collection), args.out)
    return EXIT_INPUT if failed else EXIT_OK


def _run_simplify(args: argparse.Namespace, config: RunConfig) -> int:
    gio.write_text(gio.dumps(cmd_simplify(args.input, config)), args.out)
    return EXIT_OK


def _run_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    report = cmd_evaluate(args.pred, args.gt, config, allow_missing=args.allow_missing)
    gio.write_text(gio.dumps({"config": config.to_dict(), "report": report.to_dict()}), args.out)
    sys.stderr.write(metric_table(report))
    return EXIT_OK


def _run_oracle_check(args: argparse.Namespace, config: RunConfig) -> int:
    report, passed = cmd_oracle_check(config, args.trials, args.max_len, args.lambdas, perturb=args.perturb_dp)
    gio.write_text(gio.dumps(report), args.out)
    return EXIT_OK if passed else EXIT_FAILURE


def _run_bench(args: argparse.Namespace, config: RunConfig) -> int:
    gio.write_text(cmd_bench(config, args.sizes, args.kmax_list, args.repetitions), args.out)
    return EXIT_OK


def _run_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    gio.write_text(cmd_sweep(args.inputs, config, args.lambdas), args.out)
    return EXIT_OK


def main(argv: Iterable[str] | None = None) -> int:
    """Entry point of the gcpoly command."""
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    try:
        config = resolve_config(args.config, args.preset, _overrides(args))
    except ConfigError as e:
        setup_logging("WARNING")
        logger.error("%s", e)
        return EXIT_INPUT

    setup_logging(config.log_level)
    logger.debug("Effective config: %s", config.to_dict())
    try:
        return args.handler(args, config)
    except GcpolyError as e:
        logger.error("%s", e)
        return EXIT_INPUT
