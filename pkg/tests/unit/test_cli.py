"""Unit tests for the command implementations in gcpoly.cli.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Run with: pytest tests/unit -v
"""

import numpy as np
import pytest

from gcpoly.cli import (
    ORACLE_FAMILIES,
    build_parser,
    cmd_bench,
    cmd_oracle_check,
    log_log_slope,
    metric_table,
    polygonize_mask,
    random_polyline,
)
from gcpoly.config import RunConfig
from gcpoly.contour import RasterMask
from gcpoly.errors import ConfigError, ContourError
from gcpoly.metrics import EvalCanvas, evaluate_set, iou, rasterize


def _l_shape() -> RasterMask:
    values = np.zeros((60, 80), dtype=np.uint8)
    values[4:52, 4:40] = 1
    values[36:52, 40:70] = 1
    return RasterMask(values)


def _pipeline_iou(mask: RasterMask, config: RunConfig) -> float:
    _, polygon, _ = polygonize_mask(mask, config)
    drawn = rasterize([polygon], EvalCanvas(width=mask.width, height=mask.height)).values
    return float(np.logical_and(drawn, mask.values).sum() / np.logical_or(drawn, mask.values).sum())


class TestPolygonizeMask:
    """Tests for the mask-to-polygon pipeline."""

    def test_exact_at_unit_step_without_penalty(self):
        """Test that lambda 0 and unit steps reproduce the mask exactly."""
        assert _pipeline_iou(_l_shape(), RunConfig(lam=0.0, step=1.0)) == 1.0

    def test_default_settings_stay_close(self):
        """Test that the default settings keep a rectilinear mask."""
        assert _pipeline_iou(_l_shape(), RunConfig()) >= 0.95

    def test_l_shape_corners(self):
        """Test that an L-shaped mask keeps its six corners."""
        _, polygon, selections = polygonize_mask(_l_shape(), RunConfig(lam=2.0, step=2.0))
        assert polygon.vertex_count() == 6
        assert len(selections) == 1

    def test_initial_polygon_is_denser(self):
        """Test that simplification only removes vertices."""
        initial, polygon, _ = polygonize_mask(_l_shape(), RunConfig())
        assert polygon.vertex_count() < initial.vertex_count()

    def test_largest_component_only(self):
        """Test that a smaller second blob is ignored."""
        values = _l_shape().values.copy()
        values[55:58, 75:78] = 1
        _, polygon, _ = polygonize_mask(RasterMask(values), RunConfig(lam=0.0, step=1.0))
        assert iou([polygon], [polygonize_mask(_l_shape(), RunConfig(lam=0.0, step=1.0))[1]], EvalCanvas(80, 60)) == 1.0

    def test_empty_mask(self):
        """Test that an empty mask is a contour error."""
        with pytest.raises(ContourError):
            polygonize_mask(RasterMask(np.zeros((4, 4), dtype=np.uint8)), RunConfig())


class TestRandomPolyline:
    """Tests for the oracle's random polyline families."""

    def test_families(self):
        """Test the size and shape of each family."""
        rng = np.random.default_rng(0)
        for family in ORACLE_FAMILIES:
            line = random_polyline(rng, 9, family)
            assert len(line) == 9
        rectilinear = random_polyline(rng, 12, "rectilinear").points
        steps = np.diff(rectilinear, axis=0)
        assert np.all((steps[:, 0] == 0) != (steps[:, 1] == 0))

    def test_collinear_family(self):
        """Test that the collinear family lies on one line."""
        points = random_polyline(np.random.default_rng(4), 10, "collinear").points
        d = points - points[0]
        assert np.allclose(d[:, 0] * d[-1, 1] - d[:, 1] * d[-1, 0], 0.0, atol=1e-9)

    def test_unknown_family(self):
        """Test that an unknown family is rejected."""
        with pytest.raises(ConfigError):
            random_polyline(np.random.default_rng(0), 5, "spiral")


class TestOracleCheck:
    """Tests for cmd_oracle_check."""

    def test_agrees(self):
        """Test a short seeded run."""
        report, passed = cmd_oracle_check(RunConfig(seed=3), trials=20, max_len=10)
        assert passed
        assert report["checks"] > 0
        assert report["max_deviation"] <= 1e-9

    def test_perturbed(self):
        """Test that the broken recurrence is reported with examples."""
        report, passed = cmd_oracle_check(RunConfig(), trials=20, max_len=10, perturb=True)
        assert not passed
        assert 0 < len(report["examples"]) <= 5
        assert report["examples"][0]["polyline"]["type"] == "Feature"

    def test_limits(self):
        """Test the max_len and trials range checks."""
        with pytest.raises(ConfigError):
            cmd_oracle_check(RunConfig(), trials=1, max_len=1)
        with pytest.raises(ConfigError):
            cmd_oracle_check(RunConfig(), trials=-1)


class TestBench:
    """Tests for cmd_bench and log_log_slope."""

    def test_slope(self):
        """Test the fitted exponent of exact power laws."""
        sizes = [10, 20, 40, 80]
        assert abs(log_log_slope(sizes, [s**2 * 1e-6 for s in sizes]) - 2.0) < 1e-9
        assert abs(log_log_slope(sizes, [s * 3e-4 for s in sizes]) - 1.0) < 1e-9

    def test_rows(self):
        """Test one row per size and a slope line."""
        text = cmd_bench(RunConfig(), sizes=[8, 16], repetitions=1)
        lines = text.splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "T,k_max,repetitions,median_seconds,vertex_count,matches_unbounded"
        assert len([line for line in lines if line[:1].isdigit()]) == 2
        assert lines[-1].startswith("# slope k_max=64")

    def test_bad_arguments(self):
        """Test that unsorted sizes and zero repetitions are rejected."""
        with pytest.raises(ConfigError):
            cmd_bench(RunConfig(), sizes=[16, 8])
        with pytest.raises(ConfigError):
            cmd_bench(RunConfig(), sizes=[8], repetitions=0)


class TestMetricTable:
    """Tests for the printed metric summary."""

    def test_rows(self):
        """Test one row per image plus the mean."""
        shape = polygonize_mask(_l_shape(), RunConfig())[1]
        report = evaluate_set([[shape], [shape]], [[shape], []], EvalCanvas(80, 60), ["a", "b"])
        lines = metric_table(report).splitlines()
        assert len(lines) == 4
        assert lines[-1].startswith("mean")
        assert "-" in lines[2]


class TestParser:
    """Tests for argument parsing."""

    def test_number_lists(self):
        """Test comma-separated lists."""
        args = build_parser().parse_args(["sweep", "mask.pgm", "--lambdas", "0,1.5,4"])
        assert args.lambdas == [0.0, 1.5, 4.0]

    def test_bad_number_list(self):
        """Test that argparse rejects a malformed list."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["bench", "--sizes", "8,many"])

    def test_verb_required(self):
        """Test that a verb is required."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
