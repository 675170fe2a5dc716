"""Exception types for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Library code raises these; only the CLI turns them into exit codes.
"""


class GcpolyError(Exception):
    """Base class for every error raised by gcpoly."""

    pass


class GeometryError(GcpolyError):
    """Raised for invalid points, polylines, rings or polygons."""

    pass


class ContourError(GcpolyError):
    """Raised when a mask cannot be traced or windows cannot be reassembled."""

    pass


class SimplifyError(GcpolyError):
    """Raised for invalid simplification parameters or selections."""

    pass


class LossError(GcpolyError):
    """Raised when loss inputs do not line up."""

    pass


class MetricError(GcpolyError):
    """Raised when a metric is undefined for its inputs."""

    pass


class ConfigError(GcpolyError):
    """Raised for an invalid run configuration or config file."""

    pass


class InputFormatError(GcpolyError):
    """Raised for unreadable masks or malformed GeoJSON."""

    pass
