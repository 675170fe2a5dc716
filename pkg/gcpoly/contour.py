"""Mask to contour conversion for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Turns a binary building mask into an initial polygon, resamples its rings
and cuts them into fixed-length windows (and back again).

Conventions:
    - foreground is 4-connected, background and holes are 8-connected
    - contour vertices lie on pixel corners: pixel (row r, col c) covers
      x in [c, c+1], y in [r, r+1]
    - orientation is the sign of the shoelace area in (x, y)
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from gcpoly.errors import ContourError, GeometryError
from gcpoly.geometry import Polygon, Polyline, downsample_to, resample_uniform, signed_area

logger = logging.getLogger(__name__)

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)

# Unit steps for the crack edges, (dx, dy).
_RIGHT = (1, 0)
_DOWN = (0, 1)
_LEFT = (-1, 0)
_UP = (0, -1)


@dataclass(frozen=True, eq=False)
class RasterMask:
    """An H x W binary grid; nonzero input values count as foreground."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContourError(f"A mask must be a non-empty 2-D grid, got shape {arr.shape}")
        arr = (arr > 0).astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    def foreground_count(self) -> int:
        """Number of foreground pixels."""
        return int(self.values.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterMask):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class WindowOrigin:
    """Where a window came from: source polyline, start offset, wrap flag."""

    source: int
    start: int
    wrapped: bool


@dataclass(frozen=True, eq=False)
class WindowedPolylines:
    """Fixed-length windows cut from a set of polylines.

    Attributes:
        windows: M x K x 2 coordinates; entries past valid_len repeat the last valid point
        valid_len: Number of real points in each window
        origins: One WindowOrigin per window
        source_lengths: Point count of every source polyline
        source_closed: Closure flag of every source polyline
    """

    windows: np.ndarray
    valid_len: np.ndarray
    origins: tuple[WindowOrigin, ...]
    source_lengths: tuple[int, ...]
    source_closed: tuple[bool, ...]

    @property
    def window_size(self) -> int:
        return int(self.windows.shape[1])

    def __len__(self) -> int:
        return int(self.windows.shape[0])


def largest_component(mask: RasterMask) -> RasterMask:
    """Keep only the largest 4-connected foreground component.

    Ties go to the component whose first pixel comes first in row-major order.

    Raises:
        ContourError: If the mask has no foreground pixel
    """
    labels, count = ndimage.label(mask.values, structure=_FOUR_CONNECTED)
    if count == 0:
        raise ContourError("Mask has no foreground pixel")
    if count == 1:
        return mask

    flat = labels.ravel()
    sizes = np.bincount(flat, minlength=count + 1)
    _, first_index = np.unique(flat, return_index=True)
    # label 0 is background; rank by (-size, first pixel)
    best = min(range(1, count + 1), key=lambda lab: (-sizes[lab], first_index[lab]))
    logger.debug("Keeping component %d of %d (%d px)", best, count, sizes[best])
    return RasterMask((labels == best).astype(np.uint8))


def _crack_edges(values: np.ndarray) -> dict[tuple[int, int], list[tuple[int, int]]]:
    """Directed boundary edges keyed by start corner, foreground on the left."""
    padded = np.pad(values, 1)
    fg = padded[1:-1, 1:-1].astype(bool)
    sides = (
        # (background neighbour, start corner offset, direction)
        (~padded[:-2, 1:-1].astype(bool), (0, 0), _RIGHT),  # top
        (~padded[1:-1, 2:].astype(bool), (1, 0), _DOWN),  # right
        (~padded[2:, 1:-1].astype(bool), (1, 1), _LEFT),  # bottom
        (~padded[1:-1, :-2].astype(bool), (0, 1), _UP),  # left
    )
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for open_side, (ox, oy), direction in sides:
        rows, cols = np.nonzero(fg & open_side)
        for r, c in zip(rows.tolist(), cols.tolist(), strict=True):
            edges.setdefault((c + ox, r + oy), []).append(direction)
    return edges


def _turn_order(heading: tuple[int, int]) -> tuple[tuple[int, int], ...]:
    dx, dy = heading
    # left, straight, right in the (x, y) shoelace frame
    return ((-dy, dx), (dx, dy), (dy, -dx))


def _walk_ring(edges: dict[tuple[int, int], list[tuple[int, int]]], start: tuple[int, int]) -> list[tuple[int, int]]:
    """Follow edges from `start` until the ring closes, returning its corners."""
    direction = edges[start][0]
    corners: list[tuple[int, int]] = []
    vertex, heading = start, direction
    previous: tuple[int, int] | None = None
    while True:
        outgoing = edges[vertex]
        outgoing.remove(heading)
        if not outgoing:
            del edges[vertex]
        if heading != previous:
            corners.append(vertex)
        previous = heading
        vertex = (vertex[0] + heading[0], vertex[1] + heading[1])
        options = list(edges.get(vertex, ()))
        if vertex == start:
            options.append(direction)
        if not options:
            raise ContourError(f"Open contour at corner {vertex}")
        # prefer turning towards the foreground so diagonal pixels stay apart
        heading = next(d for d in _turn_order(previous) if d in options)
        if vertex == start and heading == direction:
            break
    if previous == direction and len(corners) > 1:
        # start sat in the middle of a straight run
        corners = corners[1:]
    return corners


def _ring_from_corners(corners: list[tuple[int, int]]) -> Polyline:
    # start every ring at its smallest (y, x) corner
    k = min(range(len(corners)), key=lambda i: (corners[i][1], corners[i][0]))
    ordered = corners[k:] + corners[:k]
    return Polyline.from_coords(np.asarray(ordered, dtype=np.float64), closed=True)


def trace_contours(mask: RasterMask) -> Polygon:
    """Trace the border of a single-component mask into a polygon.

    The exterior ring runs anti-clockwise around the component and each hole
    gets a clockwise ring; all vertices are pixel corners and only direction
    changes are kept, so a solid square traces to its 4 corners.

    Args:
        mask: Mask with exactly one 4-connected foreground component

    Returns:
        Polygon whose rasterisation reproduces the mask

    Raises:
        ContourError: On an empty mask or one with several components
    """
    if mask.foreground_count() == 0:
        raise ContourError("Cannot trace an empty mask")
    edges = _crack_edges(mask.values)

    exteriors: list[Polyline] = []
    holes: list[Polyline] = []
    while edges:
        start = min(edges, key=lambda v: (v[1], v[0]))
        corners = _walk_ring(edges, start)
        ring = _ring_from_corners(corners)
        (exteriors if signed_area(ring) > 0 else holes).append(ring)

    if len(exteriors) != 1:
        raise ContourError(f"Expected one foreground component, found {len(exteriors)}; apply largest_component first")
    logger.debug("Traced exterior with %d corners and %d holes", len(exteriors[0]) - 1, len(holes))
    return Polygon(exteriors[0], tuple(holes))


def initial_polylines(polygon: Polygon, step: float, limit: int) -> list[Polyline]:
    """Resample every ring of a polygon at `step` and cap it at `limit` points.

    A ring too small to keep three distinct samples stays as traced.

    Returns:
        Exterior first, then the interiors, all closed
    """
    lines = []
    for ring in polygon.rings():
        try:
            sampled = resample_uniform(ring, step)
        except GeometryError:
            sampled = ring
        if len(sampled) < 4:
            sampled = ring
        lines.append(downsample_to(sampled, limit))
    return lines


def segment_windows(lines: Sequence[Polyline], window: int) -> WindowedPolylines:
    """Cut polylines into windows of `window` points sharing one point at each seam.

    A polyline of L points gives ceil((L - 1) / (window - 1)) windows. Closed
    polylines wrap around, so their last window is filled from the start of
    the ring; open polylines pad their last window with the final point.

    Raises:
        ContourError: If window < 2 or there is nothing to cut
    """
    if window < 2:
        raise ContourError(f"Window size must be at least 2, got {window}")
    if not lines:
        raise ContourError("segment_windows needs at least one polyline")

    blocks: list[np.ndarray] = []
    valid: list[int] = []
    origins: list[WindowOrigin] = []
    for source, line in enumerate(lines):
        count = len(line)
        if count < 2:
            raise ContourError(f"Polyline {source} has fewer than 2 points")
        n_windows = max(1, math.ceil((count - 1) / (window - 1)))
        period = count - 1
        for w in range(n_windows):
            start = w * (window - 1)
            if line.closed:
                n_valid = min(window, period + 1)
                idx = (start + np.arange(n_valid)) % period
                wrapped = start + n_valid - 1 > period
            else:
                n_valid = min(window, count - start)
                idx = start + np.arange(n_valid)
                wrapped = False
            block = np.empty((window, 2), dtype=np.float64)
            block[:n_valid] = line.points[idx]
            block[n_valid:] = block[n_valid - 1]
            blocks.append(block)
            valid.append(n_valid)
            origins.append(WindowOrigin(source=source, start=start, wrapped=bool(wrapped)))

    return WindowedPolylines(
        windows=np.stack(blocks),
        valid_len=np.asarray(valid, dtype=np.intp),
        origins=tuple(origins),
        source_lengths=tuple(len(line) for line in lines),
        source_closed=tuple(line.closed for line in lines),
    )


def reassemble(windowed: WindowedPolylines) -> list[Polyline]:
    """Invert segment_windows; points seen in several windows are averaged.

    Raises:
        ContourError: If the origin records are inconsistent or leave gaps
    """
    n_sources = len(windowed.source_lengths)
    if len(windowed.origins) != len(windowed) or len(windowed.valid_len) != len(windowed):
        raise ContourError("Window, valid_len and origin counts differ")
    sums = [np.zeros((n, 2), dtype=np.float64) for n in windowed.source_lengths]
    hits = [np.zeros(n, dtype=np.intp) for n in windowed.source_lengths]

    for block, n_valid, origin in zip(windowed.windows, windowed.valid_len, windowed.origins, strict=True):
        if not 0 <= origin.source < n_sources:
            raise ContourError(f"Window refers to unknown source {origin.source}")
        count = windowed.source_lengths[origin.source]
        closed = windowed.source_closed[origin.source]
        if not 1 <= n_valid <= windowed.window_size:
            raise ContourError(f"Invalid valid_len {n_valid}")
        idx = origin.start + np.arange(n_valid)
        if closed:
            idx = idx % (count - 1)
        elif idx[-1] >= count:
            raise ContourError(f"Window at {origin.start} runs past the end of source {origin.source}")
        np.add.at(sums[origin.source], idx, block[:n_valid])
        np.add.at(hits[origin.source], idx, 1)

    lines = []
    for source, (total, seen) in enumerate(zip(sums, hits, strict=True)):
        closed = windowed.source_closed[source]
        body = slice(0, len(seen) - 1) if closed else slice(None)
        if np.any(seen[body] == 0):
            raise ContourError(f"Source {source} is not fully covered by its windows")
        points = total[body] / seen[body, None]
        lines.append(Polyline.from_coords(points, closed=closed) if closed else Polyline(points))
    return lines
