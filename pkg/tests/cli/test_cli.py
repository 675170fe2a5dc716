"""End-to-end tests for the gcpoly command.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Run with: pytest tests/cli -v
Skip the long oracle run with: pytest tests/cli -m "not slow"
"""

import csv
import io
import json

import pytest

from tests.cli.conftest import square_feature, write_geojson

pytestmark = pytest.mark.cli

RECTANGLE_CORNERS = {(0.0, 0.0), (30.0, 0.0), (30.0, 20.0), (0.0, 20.0)}
STAIRCASE_CORNERS = {
    (4.0, 4.0),
    (12.0, 4.0),
    (12.0, 12.0),
    (20.0, 12.0),
    (20.0, 20.0),
    (28.0, 20.0),
    (28.0, 28.0),
    (4.0, 28.0),
}


def _csv_rows(text: str) -> list[dict[str, str]]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def _linestring(path, coords, **properties):
    feature = {"type": "Feature", "geometry": {"type": "LineString", "coordinates": coords}, "properties": properties}
    return write_geojson(path, [feature])


class TestGeneral:
    """Tests for options shared by every verb."""

    def test_version(self, gcpoly):
        """Test that --version prints the program name."""
        result = gcpoly.run("--version")
        assert result.success
        assert "gcpoly" in result.output

    def test_unknown_verb(self, gcpoly):
        """Test that argparse rejects an unknown verb."""
        result = gcpoly.run("vectorize")
        assert result.returncode == 2

    def test_invalid_config_value(self, gcpoly, rectangle_mask):
        """Test that a negative lambda is an input error."""
        result = gcpoly.run("polygonize", rectangle_mask, "--lambda", "-1")
        assert result.returncode == 2
        assert "lambda" in result.stderr

    def test_missing_config_file(self, gcpoly, rectangle_mask, tmp_path):
        """Test that a missing config file is an input error."""
        result = gcpoly.run("polygonize", rectangle_mask, "--config", tmp_path / "absent.json")
        assert result.returncode == 2

    def test_config_file_and_preset(self, gcpoly, rectangle_mask, tmp_path):
        """Test that the preset overrides the file and the flag overrides both."""
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"lambda": 3.0, "step": 2.0}))
        result = gcpoly.run("polygonize", rectangle_mask, "--config", config, "--preset", "whu-mix")
        assert result.success, result.output
        assert result.json()["config"]["lambda"] == 4.0
        assert result.json()["config"]["step"] == 2.0
        result = gcpoly.run("polygonize", rectangle_mask, "--config", config, "--preset", "whu-mix", "--lambda", "5")
        assert result.json()["config"]["lambda"] == 5.0


class TestPolygonize:
    """Tests for the polygonize verb."""

    def test_rectangle(self, gcpoly, rectangle_mask):
        """Test that a full rectangle mask becomes its four corners."""
        result = gcpoly.run("polygonize", rectangle_mask, "--step", "2")
        assert result.success, result.output
        collection = result.json()
        assert collection["type"] == "FeatureCollection"
        assert collection["errors"] == []
        (feature,) = collection["features"]
        assert feature["geometry"]["type"] == "Polygon"
        (ring,) = feature["geometry"]["coordinates"]
        assert ring[0] == ring[-1]
        assert {tuple(p) for p in ring} == RECTANGLE_CORNERS
        assert feature["properties"]["vertex_count"] == 4
        assert feature["properties"]["image_id"] == "rectangle"

    def test_step_does_not_move_corners(self, gcpoly, staircase_mask):
        """Test that a staircase keeps the same corners at steps 1 and 4."""
        rings = []
        for step in ("1", "4"):
            result = gcpoly.run("polygonize", staircase_mask, "--step", step)
            assert result.success, result.output
            (feature,) = result.json()["features"]
            assert feature["properties"]["vertex_count"] == len(STAIRCASE_CORNERS)
            rings.append({tuple(p) for p in feature["geometry"]["coordinates"][0]})
        assert rings[0] == rings[1] == STAIRCASE_CORNERS

    def test_step_on_rectangle(self, gcpoly, rectangle_mask):
        """Test that steps landing on every corner select the same corners."""
        fine = gcpoly.run("polygonize", rectangle_mask, "--step", "1").json()
        coarse = gcpoly.run("polygonize", rectangle_mask, "--step", "2").json()
        fine_ring = fine["features"][0]["geometry"]["coordinates"][0]
        coarse_ring = coarse["features"][0]["geometry"]["coordinates"][0]
        assert {tuple(p) for p in fine_ring} == {tuple(p) for p in coarse_ring}

    def test_config_echoed(self, gcpoly, rectangle_mask):
        """Test that the effective config rides along with the output."""
        collection = gcpoly.run("polygonize", rectangle_mask, "--kmax", "32").json()
        assert collection["config"]["k_max"] == 32
        assert collection["config"]["lambda"] == 2.0

    def test_empty_mask(self, gcpoly, empty_mask):
        """Test that a mask without foreground is reported and fails the run."""
        result = gcpoly.run("polygonize", empty_mask)
        assert result.returncode == 2
        collection = result.json()
        assert collection["features"] == []
        assert len(collection["errors"]) == 1
        assert collection["errors"][0]["source"] == str(empty_mask)

    def test_one_bad_mask_among_good(self, gcpoly, rectangle_mask, empty_mask):
        """Test that good masks are still written when another fails."""
        result = gcpoly.run("polygonize", rectangle_mask, empty_mask, "--step", "2")
        assert result.returncode == 2
        collection = result.json()
        assert len(collection["features"]) == 1
        assert len(collection["errors"]) == 1

    def test_not_a_pgm(self, gcpoly, tmp_path):
        """Test that a non-PGM file is an error entry."""
        path = tmp_path / "mask.pgm"
        path.write_bytes(b"\x89PNG\r\n")
        result = gcpoly.run("polygonize", path)
        assert result.returncode == 2
        assert len(result.json()["errors"]) == 1

    def test_out_file(self, gcpoly, rectangle_mask, tmp_path):
        """Test writing the collection to a file."""
        out = tmp_path / "polygons.geojson"
        result = gcpoly.run("polygonize", rectangle_mask, "--step", "2", "--out", out)
        assert result.success
        assert result.stdout == ""
        assert json.loads(out.read_text())["features"][0]["properties"]["vertex_count"] == 4

    def test_deterministic(self, gcpoly, disk_mask):
        """Test that repeated runs are byte-identical."""
        first = gcpoly.run("polygonize", disk_mask)
        second = gcpoly.run("polygonize", disk_mask)
        assert first.success
        assert first.stdout == second.stdout

    def test_threads_do_not_change_features(self, gcpoly, disk_mask, rectangle_mask):
        """Test that worker processes give the same polygons as one process."""
        serial = gcpoly.run("polygonize", disk_mask, rectangle_mask)
        parallel = gcpoly.run("polygonize", disk_mask, rectangle_mask, "--threads", "2")
        assert serial.json()["features"] == parallel.json()["features"]


class TestSimplify:
    """Tests for the simplify verb."""

    def test_collinear(self, gcpoly, tmp_path):
        """Test that a straight line keeps only its endpoints."""
        path = _linestring(tmp_path / "line.geojson", [[0, 0], [1, 1], [2, 2], [3, 3], [4, 4]])
        result = gcpoly.run("simplify", path, "--lambda", "1")
        assert result.success, result.output
        (feature,) = result.json()["features"]
        assert feature["geometry"]["coordinates"] == [[0, 0], [4, 4]]
        assert feature["properties"]["indices"] == [0, 4]

    def test_corner(self, gcpoly, tmp_path):
        """Test that a right-angle polyline keeps its corner."""
        path = _linestring(tmp_path / "corner.geojson", [[0, 0], [1, 0], [2, 0], [2, 1], [2, 2]], name="corner")
        feature = gcpoly.run("simplify", path, "--lambda", "0.5").json()["features"][0]
        assert feature["properties"]["indices"] == [0, 2, 4]
        assert feature["properties"]["name"] == "corner"
        assert feature["properties"]["total_cost"] == 1.5

    def test_douglas_peucker_zero_tolerance(self, gcpoly, tmp_path):
        """Test that a zero tolerance keeps every vertex of a generic line."""
        coords = [[0, 0], [1, 3], [2, -1], [4, 5], [7, 2]]
        path = _linestring(tmp_path / "zigzag.geojson", coords)
        result = gcpoly.run("simplify", path, "--algorithm", "douglas_peucker", "--tolerance", "0")
        feature = result.json()["features"][0]
        assert feature["geometry"]["coordinates"] == coords
        assert feature["properties"]["algorithm"] == "douglas_peucker"

    def test_polygon(self, gcpoly, tmp_path):
        """Test that a densely sampled square simplifies to its corners."""
        ring = [[x, 0] for x in range(10)] + [[10, y] for y in range(10)]
        ring += [[10 - x, 10] for x in range(10)] + [[0, 10 - y] for y in range(10)] + [[0, 0]]
        feature = {"type": "Feature", "geometry": {"type": "Polygon", "coordinates": [ring]}, "properties": {}}
        path = write_geojson(tmp_path / "square.geojson", [feature])
        out = gcpoly.run("simplify", path).json()["features"][0]
        assert out["properties"]["input_vertex_count"] == 40
        assert out["properties"]["vertex_count"] == 4

    def test_malformed_input(self, gcpoly, tmp_path):
        """Test that invalid JSON is an input error."""
        path = tmp_path / "bad.geojson"
        path.write_text("{not json")
        assert gcpoly.run("simplify", path).returncode == 2

    def test_empty_multipolygon(self, gcpoly, tmp_path):
        """Test that an empty MultiPolygon is an input error, not a crash."""
        feature = {"type": "Feature", "geometry": {"type": "MultiPolygon", "coordinates": []}, "properties": {}}
        result = gcpoly.run("simplify", write_geojson(tmp_path / "empty.geojson", [feature]))
        assert result.returncode == 2
        assert "Traceback" not in result.stderr
        assert "Empty MultiPolygon" in result.stderr


class TestEvaluate:
    """Tests for the evaluate verb."""

    def test_perfect(self, gcpoly, tmp_path):
        """Test that a prediction equal to the ground truth scores perfectly."""
        path = write_geojson(tmp_path / "gt.geojson", [square_feature(10, 10, 40)])
        result = gcpoly.run("evaluate", path, path)
        assert result.success, result.output
        report = result.json()["report"]
        assert report["iou"] == 1.0
        assert report["n_ratio"] == 1.0
        assert report["mta"] < 1e-6
        assert "mean" in result.stderr

    def test_shifted_squares(self, gcpoly, tmp_path):
        """Test two squares overlapping a quarter of each."""
        pred = write_geojson(tmp_path / "pred.geojson", [square_feature(0, 0, 10)])
        gt = write_geojson(tmp_path / "gt.geojson", [square_feature(5, 5, 10)])
        report = gcpoly.run("evaluate", pred, gt).json()["report"]
        assert abs(report["iou"] - 1 / 7) < 1e-8

    def test_missing_image(self, gcpoly, tmp_path):
        """Test that image ids present on one side only are an error by default."""
        pred = write_geojson(tmp_path / "pred.geojson", [square_feature(0, 0, 10, "a"), square_feature(0, 0, 10, "b")])
        gt = write_geojson(tmp_path / "gt.geojson", [square_feature(0, 0, 10, "a")])
        result = gcpoly.run("evaluate", pred, gt)
        assert result.returncode == 2
        assert "b" in result.stderr

    def test_allow_missing(self, gcpoly, tmp_path):
        """Test that --allow-missing treats absent images as empty."""
        pred = write_geojson(tmp_path / "pred.geojson", [square_feature(0, 0, 10, "a"), square_feature(0, 0, 10, "b")])
        gt = write_geojson(tmp_path / "gt.geojson", [square_feature(0, 0, 10, "a")])
        result = gcpoly.run("evaluate", pred, gt, "--allow-missing")
        assert result.success, result.output
        report = result.json()["report"]
        assert report["iou"] == 0.5
        assert report["skipped"] == ["b"]


class TestOracleCheck:
    """Tests for the oracle-check verb."""

    def test_small_run_passes(self, gcpoly):
        """Test that a short run agrees with brute force."""
        result = gcpoly.run("oracle-check", "--trials", "30", "--max-len", "9", "--seed", "7")
        assert result.success, result.output
        report = result.json()
        assert report["passed"] is True
        assert report["failures"] == 0
        assert report["checks"] > 0

    def test_two_point_lines(self, gcpoly):
        """Test that two-point lines pass trivially."""
        result = gcpoly.run("oracle-check", "--trials", "10", "--max-len", "2")
        assert result.success
        assert result.json()["passed"] is True

    def test_perturbed_dp_fails(self, gcpoly):
        """Test that a broken dynamic program is caught."""
        result = gcpoly.run("oracle-check", "--trials", "30", "--max-len", "9", "--perturb-dp")
        assert result.returncode == 1
        report = result.json()
        assert report["passed"] is False
        assert report["failures"] > 0
        assert report["examples"]
        assert "Oracle mismatch" in result.stderr

    def test_max_len_out_of_range(self, gcpoly):
        """Test that too long a brute-force line is rejected."""
        assert gcpoly.run("oracle-check", "--max-len", "40").returncode == 2

    @pytest.mark.slow
    def test_full_run(self, gcpoly):
        """Test the full thousand-trial run."""
        result = gcpoly.run("oracle-check", "--trials", "1000", "--seed", "42", timeout=1800)
        assert result.success, result.output
        assert result.json()["passed"] is True


class TestBench:
    """Tests for the bench verb."""

    def test_csv(self, gcpoly):
        """Test that one repetition gives one well-formed row per size."""
        result = gcpoly.run("bench", "--sizes", "16,32", "--repetitions", "1")
        assert result.success, result.output
        assert result.stdout.startswith("#")
        rows = _csv_rows(result.stdout)
        assert [row["T"] for row in rows] == ["16", "32"]
        for row in rows:
            assert row["repetitions"] == "1"
            assert float(row["median_seconds"]) >= 0.0
            assert row["matches_unbounded"] == "true"
        assert "# slope k_max=64" in result.stdout

    def test_kmax_list(self, gcpoly):
        """Test one row per size and k_max."""
        result = gcpoly.run("bench", "--sizes", "20", "--kmax-list", "4,8", "--repetitions", "1")
        rows = _csv_rows(result.stdout)
        assert [(row["T"], row["k_max"]) for row in rows] == [("20", "4"), ("20", "8")]

    def test_unsorted_sizes(self, gcpoly):
        """Test that descending sizes are rejected."""
        assert gcpoly.run("bench", "--sizes", "32,16").returncode == 2


class TestSweep:
    """Tests for the sweep verb."""

    def test_vertices_fall_with_lambda(self, gcpoly, disk_mask):
        """Test that raising lambda never adds vertices."""
        result = gcpoly.run("sweep", disk_mask, "--lambdas", "0,0.5,1,2")
        assert result.success, result.output
        rows = _csv_rows(result.stdout)
        assert [float(row["lambda"]) for row in rows] == [0.0, 0.5, 1.0, 2.0]
        ratios = [float(row["n_ratio"]) for row in rows]
        assert ratios[0] == 1.0
        assert all(a >= b for a, b in zip(ratios, ratios[1:], strict=False))
        assert all(0.0 < float(row["mean_iou"]) <= 1.0 for row in rows)

    def test_geojson_input(self, gcpoly, tmp_path):
        """Test sweeping polygons read from GeoJSON."""
        path = write_geojson(tmp_path / "squares.geojson", [square_feature(10, 10, 30)])
        result = gcpoly.run("sweep", path, "--lambdas", "0,1")
        assert result.success, result.output
        assert len(_csv_rows(result.stdout)) == 2

    def test_no_polygons(self, gcpoly, tmp_path):
        """Test that inputs without polygons are an input error."""
        path = _linestring(tmp_path / "line.geojson", [[0, 0], [1, 1]])
        assert gcpoly.run("sweep", path).returncode == 2
