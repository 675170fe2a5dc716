"""Elementary 2-D geometry for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Points, polylines and polygons plus the distance, area and resampling
helpers that the contour tracer, the simplifiers and the metrics share.
All coordinates are pixels in double precision; nothing is snapped.
"""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from gcpoly.errors import GeometryError


@dataclass(frozen=True)
class Point:
    """A 2-D point (or vector) in pixel coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"Point coordinates must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> "Point":
        return Point(self.x * scalar, self.y * scalar)

    def __rmul__(self, scalar: float) -> "Point":
        return self.__mul__(scalar)

    @property
    def length(self) -> float:
        """Length of the point taken as a vector."""
        return math.hypot(self.x, self.y)

    def dot(self, other: "Point") -> float:
        """Dot product with another vector."""
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        """Z component of the cross product with another vector."""
        return self.x * other.y - self.y * other.x

    def distance_to(self, other: "Point") -> float:
        """Euclidean distance to another point."""
        return (self - other).length


def _as_array(points: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    arr = np.array(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"Expected an (N, 2) coordinate array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Polyline:
    """An ordered 2-D point sequence, open or closed.

    A closed polyline repeats its first point as its last point. Apart from
    that closing duplicate no two consecutive points may coincide.
    """

    points: np.ndarray
    closed: bool = False

    def __post_init__(self) -> None:
        arr = _as_array(self.points)
        if len(arr) < 2:
            raise GeometryError(f"A polyline needs at least 2 points, got {len(arr)}")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("Polyline coordinates must be finite")
        steps = np.diff(arr, axis=0)
        if np.any(np.all(steps == 0.0, axis=1)):
            raise GeometryError("Polyline has two identical consecutive points")
        if self.closed:
            if len(arr) < 3:
                raise GeometryError("A closed polyline needs at least 3 points")
            if not np.array_equal(arr[0], arr[-1]):
                raise GeometryError("A closed polyline must end on its first point")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @classmethod
    def from_coords(cls, coords: Sequence[Sequence[float]] | np.ndarray, closed: bool | None = None) -> "Polyline":
        """Build a polyline from raw coordinates.

        Args:
            coords: Sequence of (x, y) pairs
            closed: Force closure; None detects it from first == last

        Returns:
            The polyline, with a closing duplicate appended if needed
        """
        arr = _as_array(coords)
        ends_equal = len(arr) > 1 and np.array_equal(arr[0], arr[-1])
        if closed is None:
            closed = bool(ends_equal) and len(arr) > 2
        if closed and not ends_equal:
            arr = np.vstack([arr, arr[:1]])
        return cls(arr, closed=closed)

    def __len__(self) -> int:
        return len(self.points)

    def point(self, index: int) -> Point:
        """Return one vertex as a Point."""
        x, y = self.points[index]
        return Point(float(x), float(y))

    def open_points(self) -> np.ndarray:
        """Vertices without the closing duplicate."""
        return self.points[:-1] if self.closed else self.points

    def reversed(self) -> "Polyline":
        """Same polyline walked backwards; a closed ring keeps its start vertex."""
        if self.closed:
            body = self.points[:-1]
            arr = np.vstack([body[:1], body[:0:-1], body[:1]])
        else:
            arr = self.points[::-1]
        return Polyline(arr, closed=self.closed)

    def take(self, indices: Sequence[int]) -> "Polyline":
        """Sub-polyline made of the given vertex indices."""
        arr = self.points[np.asarray(indices, dtype=np.intp)]
        closed = self.closed and len(arr) > 2 and np.array_equal(arr[0], arr[-1])
        return Polyline(arr, closed=closed)

    def coords(self) -> list[list[float]]:
        """Plain nested lists, for serialisation."""
        return self.points.tolist()


@dataclass(frozen=True, eq=False)
class Polygon:
    """An anti-clockwise exterior ring with zero or more clockwise holes."""

    exterior: Polyline
    interiors: tuple[Polyline, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "interiors", tuple(self.interiors))
        if not self.exterior.closed:
            raise GeometryError("Polygon exterior must be a closed ring")
        if signed_area(self.exterior) <= 0:
            raise GeometryError("Polygon exterior must be anti-clockwise with positive area")
        for i, ring in enumerate(self.interiors):
            if not ring.closed:
                raise GeometryError(f"Polygon interior {i} must be a closed ring")
            if signed_area(ring) >= 0:
                raise GeometryError(f"Polygon interior {i} must be clockwise with negative area")

    def rings(self) -> Iterator[Polyline]:
        """Exterior first, then every interior."""
        yield self.exterior
        yield from self.interiors

    def vertex_count(self) -> int:
        """Distinct vertices over all rings; closing duplicates count once."""
        return sum(len(ring) - 1 for ring in self.rings())


def point_to_line(q: Point, a: Point, b: Point) -> float:
    """Distance from q to the infinite line through a and b.

    Args:
        q: The query point
        a: First point on the line
        b: Second point on the line

    Returns:
        Perpendicular distance; the distance from q to a when a == b
    """
    direction = b - a
    norm = direction.length
    if norm == 0.0:
        return q.distance_to(a)
    return abs(direction.cross(q - a)) / norm


def point_to_line_many(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised point_to_line over broadcastable (..., 2) arrays."""
    dx = b[..., 0] - a[..., 0]
    dy = b[..., 1] - a[..., 1]
    wx = q[..., 0] - a[..., 0]
    wy = q[..., 1] - a[..., 1]
    norm = np.hypot(dx, dy)
    cross = np.abs(dx * wy - dy * wx)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = cross / norm
    return np.where(norm == 0.0, np.hypot(wx, wy), dist)


def point_to_segment_many(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each q to the closed segment a-b (broadcastable arrays)."""
    d = b - a
    w = q - a
    dd = np.sum(d * d, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dd > 0.0, np.sum(w * d, axis=-1) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * d
    return np.hypot(q[..., 0] - closest[..., 0], q[..., 1] - closest[..., 1])


def signed_area(ring: Polyline) -> float:
    """Shoelace area of a closed ring; positive iff anti-clockwise.

    Raises:
        GeometryError: If the ring is not closed
    """
    if not ring.closed:
        raise GeometryError("signed_area needs a closed ring")
    x = ring.points[:, 0]
    y = ring.points[:, 1]
    return float(0.5 * np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def polyline_length(line: Polyline) -> float:
    """Total arc length."""
    steps = np.diff(line.points, axis=0)
    return float(np.sum(np.hypot(steps[:, 0], steps[:, 1])))


def orient_ring(ring: Polyline, ccw: bool) -> Polyline:
    """Return the ring walked anti-clockwise (ccw=True) or clockwise."""
    area = signed_area(ring)
    if (area > 0) == ccw or area == 0:
        return ring
    return ring.reversed()


def resample_uniform(line: Polyline, step: float) -> Polyline:
    """Resample a polyline at a fixed arc-length spacing.

    The first point is kept, every further sample sits `step` further along
    the polyline, and the last input point closes the sequence (so the final
    gap may be shorter). A closed input gives a closed output.

    Args:
        line: Polyline to resample
        step: Arc-length spacing in pixels

    Returns:
        The resampled polyline

    Raises:
        GeometryError: If step is not positive or the polyline has zero length
    """
    if not step > 0:
        raise GeometryError(f"Resampling step must be positive, got {step}")
    pts = line.points
    seg = np.diff(pts, axis=0)
    cum = np.concatenate(([0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))))
    total = float(cum[-1])
    if total <= 0:
        raise GeometryError("Cannot resample a polyline of zero length")

    arc = np.arange(int(math.floor(total / step)) + 1, dtype=np.float64) * step
    # the end point is appended exactly below, so drop samples that land on it
    arc = arc[total - arc > 1e-9 * max(1.0, total)]
    xs = np.interp(arc, cum, pts[:, 0])
    ys = np.interp(arc, cum, pts[:, 1])
    out = np.vstack([np.column_stack([xs, ys]), pts[-1:]])
    return Polyline(out, closed=line.closed)


def downsample_to(line: Polyline, limit: int) -> Polyline:
    """Cap a polyline at `limit` points by uniform index selection.

    Raises:
        GeometryError: If limit < 2
    """
    if limit < 2:
        raise GeometryError(f"Downsample limit must be at least 2, got {limit}")
    count = len(line)
    if count <= limit:
        return line
    indices = np.rint(np.arange(limit) * (count - 1) / (limit - 1)).astype(np.intp)
    return Polyline(line.points[indices], closed=line.closed)
