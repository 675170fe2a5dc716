"""Contour alignment losses for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Plain numpy versions of the losses used to train a polyline regressor:
vertex matching, smooth-L1 vertex loss, angular loss and the collinearity
loss with its analytic gradient. Nothing here needs an autodiff framework.
"""

import itertools
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from gcpoly.errors import LossError
from gcpoly.geometry import Polyline
from gcpoly.simplify import Selection, check_indices, deviation_sum

DEFAULT_MATCH_THRESHOLD = 15.0
DEFAULT_BETA = 1.0

# Summands at or below this distance contribute no gradient.
ZERO_DISTANCE = 1e-9


@dataclass(frozen=True)
class Matching:
    """One-to-one (pred index, gt index) pairs, sorted by pred index."""

    pairs: tuple[tuple[int, int], ...]
    threshold: float

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def pred_indices(self) -> list[int]:
        return [p for p, _ in self.pairs]

    @property
    def gt_indices(self) -> list[int]:
        return [g for _, g in self.pairs]


@dataclass(frozen=True)
class LossReport:
    """Matching plus the vertex and angular losses computed on it."""

    matching: Matching
    vertex: float
    angular: float


def _match_points(shape: Polyline | np.ndarray) -> np.ndarray:
    if isinstance(shape, Polyline):
        return shape.open_points()
    return np.asarray(shape, dtype=np.float64).reshape(-1, 2)


def hungarian_match(
    pred: Polyline | np.ndarray, gt: Polyline | np.ndarray, threshold: float = DEFAULT_MATCH_THRESHOLD
) -> Matching:
    """Match predicted to ground-truth vertices by minimum total distance.

    The assignment is computed over all points (the larger side keeps some
    unmatched), then pairs at distance >= threshold are discarded. Either side
    may be a polyline, whose closing duplicate takes no part, or an (N, 2)
    point array.

    Raises:
        LossError: If threshold is not positive
    """
    if not threshold > 0:
        raise LossError(f"Match threshold must be positive, got {threshold}")
    p = _match_points(pred)
    g = _match_points(gt)
    diff = p[:, None, :] - g[None, :, :]
    cost = np.hypot(diff[..., 0], diff[..., 1])
    rows, cols = linear_sum_assignment(cost)
    pairs = tuple((int(r), int(c)) for r, c in zip(rows, cols, strict=True) if cost[r, c] < threshold)
    return Matching(pairs=tuple(sorted(pairs)), threshold=float(threshold))


def _check_pair(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=np.float64).reshape(-1, 2)
    g = np.asarray(gt, dtype=np.float64).reshape(-1, 2)
    if p.shape != g.shape:
        raise LossError(f"Matched sequences differ in length: {len(p)} vs {len(g)}")
    return p, g


def vertex_loss(pred_matched: np.ndarray, gt_matched: np.ndarray, beta: float = DEFAULT_BETA) -> float:
    """Smooth-L1 distance between matched vertices, averaged per coordinate.

    Returns 0 for an empty matching.

    Raises:
        LossError: On a length mismatch or non-positive beta
    """
    if not beta > 0:
        raise LossError(f"Smooth-L1 beta must be positive, got {beta}")
    p, g = _check_pair(pred_matched, gt_matched)
    if len(p) == 0:
        return 0.0
    d = np.abs(p - g)
    per_coord = np.where(d < beta, 0.5 * d * d / beta, d - 0.5 * beta)
    return float(per_coord.mean())


def _turn_angles(points: np.ndarray) -> np.ndarray:
    """Signed angle at every middle point of consecutive triples, in (-pi, pi]."""
    u = points[:-2] - points[1:-1]
    w = points[2:] - points[1:-1]
    cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    dot = u[:, 0] * w[:, 0] + u[:, 1] * w[:, 1]
    return np.arctan2(cross, dot)


def angular_loss(pred_matched: np.ndarray, gt_matched: np.ndarray) -> float:
    """Largest angle difference over consecutive matched triples, in radians.

    Returns 0 when fewer than three points are matched.

    Raises:
        LossError: On a length mismatch
    """
    p, g = _check_pair(pred_matched, gt_matched)
    if len(p) < 3:
        return 0.0
    diff = np.abs(_turn_angles(p) - _turn_angles(g)) % (2 * math.pi)
    return float(np.max(np.minimum(diff, 2 * math.pi - diff)))


def polyline_losses(
    pred: Polyline,
    gt: Polyline,
    threshold: float = DEFAULT_MATCH_THRESHOLD,
    beta: float = DEFAULT_BETA,
) -> LossReport:
    """Match two polylines and compute the vertex and angular losses."""
    matching = hungarian_match(pred, gt, threshold)
    p = pred.open_points()[matching.pred_indices]
    g = gt.open_points()[matching.gt_indices]
    return LossReport(matching=matching, vertex=vertex_loss(p, g, beta), angular=angular_loss(p, g))


def collinearity_loss(line: Polyline, selection: Selection) -> float:
    """Deviation of the skipped points from the kept edges of a selection."""
    return deviation_sum(line, selection.indices)


def collinearity_loss_grad(line: Polyline, selection: Selection) -> np.ndarray:
    """Analytic gradient of collinearity_loss with respect to every point.

    Returns:
        (T, 2) array of (d/dx, d/dy); a closed ring's shared start vertex gets
        two rows, one per index
    """
    idx = check_indices(line, selection.indices)
    pts = line.points
    grad = np.zeros_like(pts)

    for first, last in itertools.pairwise(idx):
        if last - first < 2:
            continue
        a = pts[first]
        b = pts[last]
        q = pts[first + 1 : last]
        skipped = np.arange(first + 1, last)
        u = b - a
        w = q - a
        norm = math.hypot(u[0], u[1])

        if norm == 0.0:
            dist = np.hypot(w[:, 0], w[:, 1])
            active = dist > ZERO_DISTANCE
            dq = np.zeros_like(w)
            dq[active] = w[active] / dist[active, None]
            db = np.zeros_like(w)
        else:
            cross = u[0] * w[:, 1] - u[1] * w[:, 0]
            dist = np.abs(cross) / norm
            active = dist > ZERO_DISTANCE
            sign = np.where(active, np.sign(cross), 0.0)[:, None]
            dq = sign * np.array([-u[1], u[0]]) / norm
            db = sign * np.column_stack([w[:, 1], -w[:, 0]]) / norm
            db -= np.where(active, np.abs(cross), 0.0)[:, None] * u / norm**3

        np.add.at(grad, skipped, dq)
        grad[last] += db.sum(axis=0)
        grad[first] -= (dq + db).sum(axis=0)

    return grad


def finite_difference_grad(func: Callable[[np.ndarray], float], coords: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function of an (N, 2) array."""
    base = np.array(coords, dtype=np.float64)
    grad = np.zeros_like(base)
    for index in np.ndindex(base.shape):
        up = base.copy()
        down = base.copy()
        up[index] += h
        down[index] -= h
        grad[index] = (func(up) - func(down)) / (2 * h)
    return grad
