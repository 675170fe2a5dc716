"""Shared fixtures and utilities for gcpoly command-line tests.

This module provides:
- A runner that invokes `python -m gcpoly` in a subprocess
- Fixture builders for PGM masks and GeoJSON files
- Markers for test categorization
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from gcpoly.contour import RasterMask
from gcpoly.io import write_pgm

# Project root (where pyproject.toml lives)
PROJECT_ROOT = Path(__file__).parent.parent.parent


@dataclass(frozen=True)
class CliResult:
    """Result of one gcpoly invocation."""

    args: tuple[str, ...]
    returncode: int
    stdout: str
    stderr: str
    success: bool

    @property
    def output(self) -> str:
        """Combined stdout and stderr."""
        return f"{self.stdout}\n{self.stderr}".strip()

    def json(self) -> Any:
        """Parse stdout as JSON."""
        return json.loads(self.stdout)


class CliRunner:
    """Helper class for running the gcpoly command in tests."""

    def __init__(self, project_root: Path) -> None:
        """Initialize the runner with project root path."""
        self.project_root = project_root

    def run(self, *args: str | Path, timeout: int = 120, env: dict[str, str] | None = None) -> CliResult:
        """Run gcpoly with the given arguments and return the result.

        Args:
            *args: Command-line arguments (verb first)
            timeout: Timeout in seconds
            env: Additional environment variables

        Returns:
            CliResult with output and status
        """
        str_args = tuple(str(a) for a in args)
        cmd = [sys.executable, "-m", "gcpoly", *str_args]

        run_env = os.environ.copy()
        run_env.pop("GCPOLY_THREADS", None)
        if env:
            run_env.update(env)

        try:
            # S603: subprocess call is safe here - we're running our own module
            # with controlled arguments in a test context
            result = subprocess.run(  # noqa: S603
                cmd,
                cwd=self.project_root,
                capture_output=True,
                text=True,
                timeout=timeout,
                env=run_env,
                check=False,
            )
        except subprocess.TimeoutExpired as e:
            stdout_val = str(e.stdout) if e.stdout else ""
            return CliResult(
                args=str_args,
                returncode=-1,
                stdout=stdout_val,
                stderr=f"Command timed out after {timeout}s",
                success=False,
            )
        return CliResult(
            args=str_args,
            returncode=result.returncode,
            stdout=result.stdout,
            stderr=result.stderr,
            success=result.returncode == 0,
        )


def write_mask(path: Path, values: np.ndarray) -> Path:
    """Write a 0/1 array as a PGM mask and return its path."""
    write_pgm(path, RasterMask(np.asarray(values)))
    return path


def square_feature(x0: float, y0: float, size: float, image_id: str = "img") -> dict[str, Any]:
    """A GeoJSON Feature holding one axis-aligned square."""
    ring = [[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size], [x0, y0]]
    return {
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [ring]},
        "properties": {"image_id": image_id},
    }


def write_geojson(path: Path, features: list[dict[str, Any]]) -> Path:
    """Write a FeatureCollection and return its path."""
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}), encoding="utf-8")
    return path


@pytest.fixture
def gcpoly() -> CliRunner:
    """Fixture providing a CliRunner instance."""
    return CliRunner(PROJECT_ROOT)


@pytest.fixture
def rectangle_mask(tmp_path: Path) -> Path:
    """A 20 x 30 all-foreground mask."""
    return write_mask(tmp_path / "rectangle.pgm", np.ones((20, 30), dtype=np.uint8))


@pytest.fixture
def staircase_mask(tmp_path: Path) -> Path:
    """Three 8-pixel steps; every corner sits on a multiple of 4."""
    values = np.zeros((32, 32), dtype=np.uint8)
    for step in range(3):
        values[4 + 8 * step : 28, 4 : 12 + 8 * step] = 1
    return write_mask(tmp_path / "staircase.pgm", values)


@pytest.fixture
def empty_mask(tmp_path: Path) -> Path:
    """A mask without foreground."""
    return write_mask(tmp_path / "empty.pgm", np.zeros((8, 8), dtype=np.uint8))


@pytest.fixture
def disk_mask(tmp_path: Path) -> Path:
    """A filled disk of radius 14 on a 40 x 40 grid."""
    yy, xx = np.mgrid[0:40, 0:40]
    return write_mask(tmp_path / "disk.pgm", ((yy - 19.5) ** 2 + (xx - 19.5) ** 2 <= 14**2).astype(np.uint8))


def pytest_configure(config: pytest.Config) -> None:
    """Register custom pytest markers."""
    config.addinivalue_line("markers", "cli: marks tests that run the gcpoly command in a subprocess")
    config.addinivalue_line(
        "markers",
        "slow: marks tests as slow (deselect with '-m \"not slow\"')",
    )
