"""Collinearity-aware polyline simplification for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

The objective of a selection t_1 < ... < t_m of polyline indices is

    distance_sum + lam * m

where distance_sum adds, for every kept edge (t_i, t_i+1), the distances of
the skipped points to the infinite line through the two kept ones. The first
and last points are always kept and no kept edge may skip more than k_max - 1
points.

gcp_simplify finds the exact minimum with dynamic programming over the full
sub-problem table, brute_force_simplify checks it by enumeration on short
inputs and douglas_peucker is the classic baseline.
"""

import itertools
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property, partial

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from gcpoly.errors import SimplifyError
from gcpoly.geometry import Polygon, Polyline, point_to_line, point_to_segment_many, signed_area

logger = logging.getLogger(__name__)

ALGORITHMS = ("gcp", "douglas_peucker")

# Largest polyline brute_force_simplify accepts (2**18 interior subsets).
BRUTE_FORCE_LIMIT = 20

# Relative gap under which two path costs count as equal.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SimplifyParams:
    """Weight per kept vertex (pixels) and the longest allowed index gap."""

    lam: float = 2.0
    k_max: int = 64

    def validate(self) -> list[str]:
        """Validate parameters and return list of errors.

        Returns:
            List of validation error messages (empty if valid)
        """
        errors = []
        if not self.lam >= 0:
            errors.append(f"lambda must be non-negative, got {self.lam}")
        if self.k_max < 2:
            errors.append(f"k_max must be at least 2, got {self.k_max}")
        return errors

    def check(self) -> None:
        """Raise SimplifyError if validate() reports anything."""
        errors = self.validate()
        if errors:
            raise SimplifyError("; ".join(errors))


@dataclass(frozen=True)
class Selection:
    """Kept vertex indices of a polyline and their objective terms."""

    indices: tuple[int, ...]
    distance_sum: float
    total_cost: float

    def __post_init__(self) -> None:
        idx = tuple(int(i) for i in self.indices)
        if len(idx) < 2:
            raise SimplifyError("A selection keeps at least the two endpoints")
        if any(b <= a for a, b in itertools.pairwise(idx)):
            raise SimplifyError(f"Selection indices must be strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def vertex_count(self) -> int:
        return len(self.indices)

    def apply(self, line: Polyline) -> Polyline:
        """The simplified polyline made of the kept vertices."""
        return line.take(self.indices)


@dataclass(frozen=True, eq=False)
class DpWorkspace:
    """Tables of one gcp_simplify run.

    The solver keeps edge costs as a band and the path tables indexed by
    (end, end - start), so every span of the recurrence reads plain slices.
    The dense T x T properties are built on demand for inspection.

    Attributes:
        band: band[i, g - 1] is the deviation sum of edge (i, i + g)
        cost_band: Edge costs matching band
        best: best[e, d] is the best cost of going from e - d to e
        succ: succ[e, d] is the successor of e - d on that path (-1 when d == 0)
        verts: verts[e, d] is the number of kept vertices on that path, both ends included
    """

    band: np.ndarray
    cost_band: np.ndarray
    best: np.ndarray
    succ: np.ndarray
    verts: np.ndarray

    @cached_property
    def D(self) -> np.ndarray:
        """Dense deviation sums, zero outside the band."""
        return _unband(self.band, 0.0)

    @cached_property
    def C(self) -> np.ndarray:
        """Dense edge costs, inf outside the band."""
        return _unband(self.cost_band, np.inf)

    @cached_property
    def L(self) -> np.ndarray:
        """L[i, e] is the best cost of going from i to e (inf for e < i)."""
        return _unskew(self.best, np.inf)

    @cached_property
    def F(self) -> np.ndarray:
        """F[i, e] is the successor of i on the best path to e."""
        return _unskew(self.succ, -1)

    @cached_property
    def M(self) -> np.ndarray:
        """M[i, e] is the vertex count of the best path from i to e."""
        return _unskew(self.verts, 0)

    def backtrack(self, start: int = 0, end: int | None = None) -> tuple[int, ...]:
        """Follow the successors from start to end (default: the last point)."""
        if end is None:
            end = self.best.shape[0] - 1
        path = [start]
        while path[-1] != end:
            path.append(int(self.succ[end, end - path[-1]]))
        return tuple(path)


def _unband(band: np.ndarray, fill: float) -> np.ndarray:
    count, width = band.shape
    dense = np.full((count, count), fill, dtype=np.float64)
    start, gap = np.nonzero(np.add.outer(np.arange(count), np.arange(1, width + 1)) < count)
    dense[start, start + gap + 1] = band[start, gap]
    return dense


def _unskew(table: np.ndarray, fill: float) -> np.ndarray:
    end, back = np.tril_indices(table.shape[0])
    dense = np.full(table.shape, fill, dtype=table.dtype)
    dense[end - back, end] = table[end, back]
    return dense


def _tie_tolerance(cost: np.ndarray | float) -> np.ndarray | float:
    # costs are never negative; this close counts as equal, so both solvers fall through to m and indices
    return TIE_RTOL * np.maximum(cost, 1.0)


def check_indices(line: Polyline, indices: Sequence[int]) -> tuple[int, ...]:
    """Validate a selection against a polyline.

    Raises:
        SimplifyError: If the indices are out of range, not strictly increasing
            or miss one of the endpoints
    """
    idx = tuple(int(i) for i in indices)
    count = len(line)
    if len(idx) < 2:
        raise SimplifyError("A selection keeps at least the two endpoints")
    if any(i < 0 or i >= count for i in idx):
        raise SimplifyError(f"Selection index out of range for a {count}-point polyline: {idx}")
    if any(b <= a for a, b in itertools.pairwise(idx)):
        raise SimplifyError(f"Selection indices must be strictly increasing: {idx}")
    if idx[0] != 0 or idx[-1] != count - 1:
        raise SimplifyError(f"Selection must start at 0 and end at {count - 1}: {idx}")
    return idx


def deviation_sum(line: Polyline, indices: Sequence[int]) -> float:
    """Distance term of the objective, recomputed point by point."""
    idx = check_indices(line, indices)
    total = 0.0
    for a, b in itertools.pairwise(idx):
        pa, pb = line.point(a), line.point(b)
        for skipped in range(a + 1, b):
            total += point_to_line(line.point(skipped), pa, pb)
    return total


def objective_value(line: Polyline, selection: Selection | Sequence[int], lam: float) -> tuple[float, int, float]:
    """Score a selection from scratch.

    Args:
        line: The source polyline
        selection: A Selection or a plain index sequence
        lam: Weight per kept vertex

    Returns:
        Tuple of (distance_sum, vertex_count, total)

    Raises:
        SimplifyError: On invalid indices
    """
    indices = selection.indices if isinstance(selection, Selection) else selection
    dist = deviation_sum(line, indices)
    m = len(indices)
    return dist, m, dist + lam * m


def _distance_band(points: np.ndarray, k_max: int) -> np.ndarray:
    count = len(points)
    width = max(1, min(k_max, count - 1))
    band = np.zeros((count, width), dtype=np.float64)
    xs = points[:, 0]
    ys = points[:, 1]
    # one gap at a time for every start index; entries never depend on k_max
    for gap in range(2, width + 1):
        n = count - gap
        ax, ay = xs[:n, None], ys[:n, None]
        dx = xs[gap:] - xs[:n]
        dy = ys[gap:] - ys[:n]
        # the skipped points of edge (i, i + gap) are row i of the window view
        wx = sliding_window_view(xs[1:], gap - 1)[:n] - ax
        wy = sliding_window_view(ys[1:], gap - 1)[:n] - ay
        cross = np.abs(dx[:, None] * wy - dy[:, None] * wx).sum(axis=1)
        norm = np.hypot(dx, dy)
        column = np.divide(cross, norm, out=np.zeros(n), where=norm > 0.0)
        degenerate = norm == 0.0
        if np.any(degenerate):
            column[degenerate] = np.hypot(wx[degenerate], wy[degenerate]).sum(axis=1)
        band[:n, gap - 1] = column
    return band


def build_distance_matrix(line: Polyline, k_max: int) -> np.ndarray:
    """Deviation sums D[i, j] of every edge skipping fewer than k_max points.

    D[i, i + 1] is 0 and entries with j - i > k_max (or j <= i) stay 0.
    """
    if k_max < 1:
        raise SimplifyError(f"k_max must be positive, got {k_max}")
    return _unband(_distance_band(line.points, k_max), 0.0)


def solve_dp(line: Polyline, params: SimplifyParams, perturb: bool = False) -> DpWorkspace:
    """Fill the dynamic-programming tables for one polyline.

    L[i, e] = min over 1 <= g <= min(e - i, k_max) of C[i, i + g] + L[i + g, e]
    with L[e, e] = 0, so L charges lam once per kept edge. Costs within
    TIE_RTOL of the minimum are ties; they go to the path with fewer
    vertices, then to the nearest successor.

    Args:
        line: Polyline to simplify; a closed ring is solved over its full
            sequence so the closing point is the fixed end
        params: Vertex weight and gap bound
        perturb: Ignore the deviation term (only for exercising the oracle)

    Returns:
        The filled workspace
    """
    params.check()
    count = len(line)
    k_max = min(params.k_max, count - 1)
    band = _distance_band(line.points, k_max)
    cost = np.full_like(band, params.lam) if perturb else band + params.lam
    if perturb:
        logger.debug("Dynamic program running with the deviation term disabled")

    best = np.full((count, count), np.inf)
    best[:, 0] = 0.0
    succ = np.full((count, count), -1, dtype=np.intp)
    verts = np.zeros((count, count), dtype=np.intp)
    verts[:, 0] = 1
    too_many = np.iinfo(np.intp).max
    rows = np.arange(count)

    for span in range(1, count):
        n = count - span
        back = slice(span - min(span, k_max), span)
        # [i, h] holds the path from i + h + 1 to i + span
        cand = cost[:n, : back.stop - back.start] + best[span:, back][:, ::-1]
        low = cand.min(axis=1)
        tied = cand <= (low + _tie_tolerance(low))[:, None]
        kept = np.where(tied, verts[span:, back][:, ::-1], too_many)
        pick = kept.argmin(axis=1)
        best[span:, span] = cand[rows[:n], pick]
        succ[span:, span] = rows[1 : n + 1] + pick
        verts[span:, span] = kept[rows[:n], pick] + 1

    return DpWorkspace(band=band, cost_band=cost, best=best, succ=succ, verts=verts)


def _right_fold(band: np.ndarray, indices: tuple[int, ...], lam: float = 0.0) -> float:
    # same summation order as the table recurrence
    acc = 0.0
    for a, b in reversed(list(itertools.pairwise(indices))):
        acc = (band[a, b - a - 1] + lam) + acc
    return float(acc)


def gcp_simplify(line: Polyline, params: SimplifyParams, perturb: bool = False) -> Selection:
    """Globally optimal simplification of one polyline.

    Returns the selection minimising distance_sum + lam * m among all index
    subsequences that keep both endpoints and respect k_max. Ties are broken
    by fewer vertices, then by the lexicographically smallest indices.
    """
    work = solve_dp(line, params, perturb=perturb)
    indices = work.backtrack()
    dist = _right_fold(work.band, indices)
    logger.debug("gcp kept %d of %d points (distance %.6g)", len(indices), len(line), dist)
    return Selection(indices=indices, distance_sum=dist, total_cost=dist + params.lam * len(indices))


def brute_force_simplify(line: Polyline, params: SimplifyParams) -> Selection:
    """Exhaustive optimum over every endpoint-keeping subsequence.

    Uses the same tie-breaking as gcp_simplify. Only meant for checking it.

    Raises:
        SimplifyError: If the polyline has more than BRUTE_FORCE_LIMIT points
    """
    params.check()
    count = len(line)
    if count > BRUTE_FORCE_LIMIT:
        raise SimplifyError(f"brute_force_simplify handles at most {BRUTE_FORCE_LIMIT} points, got {count}")
    band = _distance_band(line.points, count - 1)

    best_cost = np.inf
    best: tuple[int, ...] | None = None
    # sizes ascending and combinations in lexicographic order, so a larger
    # selection only wins by more than the tie tolerance
    for size in range(count - 1):
        combos = list(itertools.combinations(range(1, count - 1), size))
        inner = np.array(combos, dtype=np.intp).reshape(len(combos), size)
        paths = np.hstack(
            [np.zeros((len(inner), 1), dtype=np.intp), inner, np.full((len(inner), 1), count - 1, dtype=np.intp)]
        )
        paths = paths[np.all(np.diff(paths, axis=1) <= params.k_max, axis=1)]
        if len(paths) == 0:
            continue
        acc = np.zeros(len(paths))
        for col in range(paths.shape[1] - 2, -1, -1):
            a, b = paths[:, col], paths[:, col + 1]
            acc = (band[a, b - a - 1] + params.lam) + acc
        low = acc.min()
        k = int(np.flatnonzero(acc <= low + _tie_tolerance(low))[0])
        if best is None or acc[k] < best_cost - _tie_tolerance(best_cost):
            best_cost = acc[k]
            best = tuple(int(i) for i in paths[k])

    assert best is not None
    distance = _right_fold(band, best)
    return Selection(indices=best, distance_sum=distance, total_cost=distance + params.lam * len(best))


def douglas_peucker(line: Polyline, tolerance: float, lam: float = 0.0) -> Selection:
    """Douglas-Peucker simplification.

    Splits at the point farthest from the current chord (segment distance)
    while that distance exceeds the tolerance. The returned selection is
    scored with the same objective as gcp_simplify using `lam`.

    Raises:
        SimplifyError: If tolerance is negative
    """
    if not tolerance >= 0:
        raise SimplifyError(f"Douglas-Peucker tolerance must be non-negative, got {tolerance}")
    points = line.points
    count = len(points)
    keep = np.zeros(count, dtype=bool)
    keep[[0, -1]] = True
    stack = [(0, count - 1)]
    while stack:
        first, last = stack.pop()
        if last - first < 2:
            continue
        dists = point_to_segment_many(points[first + 1 : last], points[first], points[last])
        k = int(np.argmax(dists))
        if dists[k] > tolerance:
            split = first + 1 + k
            keep[split] = True
            stack.append((first, split))
            stack.append((split, last))

    indices = tuple(int(i) for i in np.flatnonzero(keep))
    dist, m, total = objective_value(line, indices, lam)
    return Selection(indices=indices, distance_sum=dist, total_cost=total)


def full_selection(line: Polyline, lam: float) -> Selection:
    """The selection that keeps every point."""
    return Selection(indices=tuple(range(len(line))), distance_sum=0.0, total_cost=lam * len(line))


def simplify_polyline(
    line: Polyline,
    params: SimplifyParams,
    algorithm: str = "gcp",
    tolerance: float = 1.0,
    perturb: bool = False,
) -> Selection:
    """Simplify one polyline with the named algorithm ("gcp" or "douglas_peucker")."""
    if algorithm == "gcp":
        return gcp_simplify(line, params, perturb=perturb)
    if algorithm == "douglas_peucker":
        return douglas_peucker(line, tolerance, lam=params.lam)
    raise SimplifyError(f"Unknown algorithm: {algorithm} (expected one of {', '.join(ALGORITHMS)})")


def simplify_polygon(
    polygon: Polygon,
    params: SimplifyParams,
    algorithm: str = "gcp",
    tolerance: float = 1.0,
) -> tuple[Polygon, list[Selection]]:
    """Simplify every ring of a polygon.

    A ring that would drop below three distinct vertices, or whose exterior
    would lose its orientation, is kept as it was. An interior ring whose
    orientation flips is dropped.

    Returns:
        Tuple of (simplified polygon, one selection per output ring)
    """
    selections: list[Selection] = []

    def simplify_ring(ring: Polyline, ccw: bool) -> Polyline | None:
        sel = simplify_polyline(ring, params, algorithm, tolerance)
        if sel.vertex_count < 4:
            logger.info("Ring of %d points collapses when simplified; keeping it as is", len(ring))
            selections.append(full_selection(ring, params.lam))
            return ring
        simplified = sel.apply(ring)
        area = signed_area(simplified)
        if (area > 0) != ccw or area == 0:
            if ccw:
                logger.info("Exterior loses its orientation when simplified; keeping it as is")
                selections.append(full_selection(ring, params.lam))
                return ring
            logger.warning("Dropping interior ring whose orientation flips when simplified")
            return None
        selections.append(sel)
        return simplified

    exterior = simplify_ring(polygon.exterior, ccw=True)
    interiors = [r for r in (simplify_ring(ring, ccw=False) for ring in polygon.interiors) if r is not None]
    return Polygon(exterior, tuple(interiors)), selections


def simplify_batch(
    lines: Sequence[Polyline],
    params: SimplifyParams,
    workers: int = 1,
    algorithm: str = "gcp",
    tolerance: float = 1.0,
) -> list[Selection]:
    """Simplify many polylines, in a process pool when workers > 1.

    Results come back in input order.
    """
    params.check()
    func = partial(simplify_polyline, params=params, algorithm=algorithm, tolerance=tolerance)
    if workers <= 1 or len(lines) < 2:
        return [func(line) for line in lines]
    logger.info("Simplifying %d polylines with %d workers", len(lines), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, lines))
