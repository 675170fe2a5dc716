"""gcpoly - collinearity-aware building polygonization.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Turns binary building masks into simplified vector polygons with an exact
dynamic-programming simplifier, and scores polygons with raster metrics.

Modules:
    geometry: Points, polylines, polygons, distances and resampling
    contour: Mask tracing, resampling and sliding windows
    simplify: Dynamic-programming simplifier, brute-force oracle, Douglas-Peucker
    align_losses: Vertex, angular and collinearity losses with gradients
    metrics: IoU, C-IoU, N-ratio and max tangent angle error
    config: Run configuration
    io: PGM and GeoJSON files
    cli: The gcpoly command
"""

from gcpoly.errors import (
    ConfigError,
    ContourError,
    GcpolyError,
    GeometryError,
    InputFormatError,
    LossError,
    MetricError,
    SimplifyError,
)
from gcpoly.geometry import Point, Polygon, Polyline, point_to_line, resample_uniform, signed_area
from gcpoly.simplify import (
    Selection,
    SimplifyParams,
    brute_force_simplify,
    douglas_peucker,
    gcp_simplify,
    objective_value,
)

__version__ = "0.1.0"
__author__ = "Sean P. Kane"
__license__ = "MIT"

__all__ = [
    "ConfigError",
    "ContourError",
    "GcpolyError",
    "GeometryError",
    "InputFormatError",
    "LossError",
    "MetricError",
    "Point",
    "Polygon",
    "Polyline",
    "Selection",
    "SimplifyError",
    "SimplifyParams",
    "brute_force_simplify",
    "douglas_peucker",
    "gcp_simplify",
    "objective_value",
    "point_to_line",
    "resample_uniform",
    "signed_area",
]
