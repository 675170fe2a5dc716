"""Polygon evaluation metrics for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Raster IoU, complexity-aware IoU (C-IoU), vertex-count ratio (N-ratio) and
max tangent angle error (MTA), per image and aggregated over a set.
"""

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.optimize import linear_sum_assignment

from gcpoly.contour import RasterMask
from gcpoly.errors import MetricError
from gcpoly.geometry import Polygon, Polyline

logger = logging.getLogger(__name__)

MTA_STEP = 0.1
# Projected steps shorter than this fraction of their sample step have no direction.
MTA_MIN_PROJECTED = 1e-6
MATCH_IOU = 0.5


@dataclass(frozen=True)
class EvalCanvas:
    """Raster grid the IoU metrics are computed on."""

    width: int = 300
    height: int = 300
    supersample: int = 1
    max_pixels: int = 1 << 26

    def validate(self) -> list[str]:
        """Validate parameters and return list of errors."""
        errors = []
        if self.width < 1 or self.height < 1:
            errors.append(f"Canvas size must be positive, got {self.width}x{self.height}")
        if self.supersample < 1:
            errors.append(f"Supersample factor must be at least 1, got {self.supersample}")
        elif self.width * self.height * self.supersample**2 > self.max_pixels:
            errors.append(
                f"Canvas of {self.width}x{self.height} at supersample {self.supersample} "
                f"exceeds {self.max_pixels} pixels"
            )
        return errors


@dataclass(frozen=True)
class ImageMetrics:
    """Metrics of one image; n_ratio and c_iou are None without ground truth."""

    image_id: str
    iou: float
    c_iou: float | None
    n_ratio: float | None
    mta: float | None
    pred_vertices: int
    gt_vertices: int
    matched_pairs: int

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "iou": self.iou,
            "c_iou": self.c_iou,
            "n_ratio": self.n_ratio,
            "mta": self.mta,
            "pred_vertices": self.pred_vertices,
            "gt_vertices": self.gt_vertices,
            "matched_pairs": self.matched_pairs,
        }


@dataclass(frozen=True)
class MetricReport:
    """Dataset means plus the per-image rows they came from.

    Attributes:
        iou: Mean IoU over all images
        c_iou: Mean C-IoU over images with ground truth
        n_ratio: Mean N-ratio over images with ground truth
        mta: Mean MTA (degrees) over matched contour pairs, None if no pair matched
        skipped: Ids of images left out of the c_iou and n_ratio means
    """

    iou: float
    c_iou: float | None
    n_ratio: float | None
    mta: float | None
    pred_vertices: int
    gt_vertices: int
    matched_pairs: int
    images: tuple[ImageMetrics, ...] = field(default_factory=tuple)
    skipped: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "iou": self.iou,
            "c_iou": self.c_iou,
            "n_ratio": self.n_ratio,
            "mta": self.mta,
            "counts": {
                "pred_vertices": self.pred_vertices,
                "gt_vertices": self.gt_vertices,
                "matched_pairs": self.matched_pairs,
            },
            "skipped": list(self.skipped),
            "images": [image.to_dict() for image in self.images],
        }


def _ring_toggles(ring: Polyline, scale: int, height: int, width: int, toggles: np.ndarray) -> None:
    pts = ring.points * scale
    x0, y0 = pts[:-1, 0], pts[:-1, 1]
    x1, y1 = pts[1:, 0], pts[1:, 1]
    slanted = y0 != y1
    x0, y0, x1, y1 = x0[slanted], y0[slanted], x1[slanted], y1[slanted]

    # pixel centre rows with ymin <= row + 0.5 < ymax
    lo = np.clip(np.ceil(np.minimum(y0, y1) - 0.5), 0, height).astype(np.intp)
    hi = np.clip(np.ceil(np.maximum(y0, y1) - 0.5), 0, height).astype(np.intp)
    counts = np.maximum(hi - lo, 0)
    if counts.sum() == 0:
        return
    edge = np.repeat(np.arange(len(counts)), counts)
    offsets = np.cumsum(counts) - counts
    rows = lo[edge] + np.arange(len(edge)) - offsets[edge]

    yc = rows + 0.5
    x_hit = x0[edge] + (yc - y0[edge]) * (x1[edge] - x0[edge]) / (y1[edge] - y0[edge])
    # first column whose centre lies right of the crossing
    cols = np.clip(np.floor(x_hit - 0.5).astype(np.intp) + 1, 0, width)
    np.add.at(toggles, (rows, cols), 1)


def rasterize(polygons: Sequence[Polygon], canvas: EvalCanvas) -> RasterMask:
    """Even-odd fill of polygons sampled at pixel centres.

    Each polygon is filled on a grid `supersample` times finer than the canvas
    (holes cut out), the polygons are merged and every canvas pixel takes the
    majority value of its sub-pixels. Geometry outside the canvas is clipped.
    """
    errors = canvas.validate()
    if errors:
        raise MetricError("; ".join(errors))
    s = canvas.supersample
    height, width = canvas.height * s, canvas.width * s
    fine = np.zeros((height, width), dtype=bool)
    for polygon in polygons:
        toggles = np.zeros((height, width + 1), dtype=np.int32)
        for ring in polygon.rings():
            _ring_toggles(ring, s, height, width, toggles)
        fine |= (np.cumsum(toggles, axis=1)[:, :width] % 2).astype(bool)

    if s == 1:
        return RasterMask(fine)
    votes = fine.reshape(canvas.height, s, canvas.width, s).sum(axis=(1, 3))
    return RasterMask(votes * 2 > s * s)


def _mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    union = int(np.logical_or(a, b).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(a, b).sum()) / union


def iou(pred: Sequence[Polygon], gt: Sequence[Polygon], canvas: EvalCanvas) -> float:
    """Intersection over union of the rasterised polygon sets.

    Two empty masks give 1.0, exactly one empty mask gives 0.0.
    """
    return _mask_iou(rasterize(pred, canvas).values, rasterize(gt, canvas).values)


def _vertex_total(polygons: Sequence[Polygon]) -> int:
    return sum(polygon.vertex_count() for polygon in polygons)


def n_ratio(pred: Sequence[Polygon], gt: Sequence[Polygon]) -> float:
    """Predicted vertex count over ground-truth vertex count, all rings included.

    Raises:
        MetricError: If the ground truth has no vertex
    """
    n_gt = _vertex_total(gt)
    if n_gt == 0:
        raise MetricError("N-ratio is undefined without ground-truth vertices")
    return _vertex_total(pred) / n_gt


def _complexity_scale(n_pred: int, n_gt: int) -> float:
    total = n_pred + n_gt
    if total == 0:
        return 0.0
    return 1.0 - abs(n_pred - n_gt) / total


def c_iou(pred: Sequence[Polygon], gt: Sequence[Polygon], canvas: EvalCanvas) -> float:
    """IoU scaled down by the relative difference in vertex counts."""
    return iou(pred, gt, canvas) * _complexity_scale(_vertex_total(pred), _vertex_total(gt))


def _tangent_angles(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    steps = np.diff(points, axis=0)
    return np.degrees(np.arctan2(steps[:, 1], steps[:, 0])), np.hypot(steps[:, 0], steps[:, 1])


def _edge_samples(ring: Polyline, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Points at most `step` apart along every edge of a ring.

    Returns:
        (samples, pair_edge) where pair_edge[k] is the edge holding samples
        k and k + 1, or -1 where the pair spans two edges
    """
    pieces = []
    for a, b in itertools.pairwise(ring.points):
        count = max(1, math.ceil(math.hypot(*(b - a)) / step))
        t = np.linspace(0.0, 1.0, count + 1)[:, None]
        pieces.append(a + t * (b - a))
    samples = np.concatenate(pieces)
    pair_edge = np.repeat(np.arange(len(pieces)), [len(p) for p in pieces])[:-1]
    pair_edge[np.cumsum([len(p) for p in pieces])[:-1] - 1] = -1
    return samples, pair_edge


def mta(pred: Polygon, gt: Polygon, step: float = MTA_STEP) -> float:
    """Max tangent angle error between two exteriors, in degrees.

    Every edge of the predicted exterior is sampled every `step` pixels and
    each sample is projected onto the closest point of the ground-truth
    exterior. A predicted edge is compared with the ground-truth edge that
    most of it projects onto: for every pair of consecutive samples whose
    projections both lie on that edge, the direction of the sample step is
    checked against the direction of the projected step. Pairs that project
    onto a single point carry no direction and are skipped. The largest
    difference wins.

    Raises:
        MetricError: If an exterior is degenerate or no pair remains
    """
    if not step > 0:
        raise MetricError(f"MTA step must be positive, got {step}")
    target = shapely.LineString(gt.exterior.points)
    if target.length == 0:
        raise MetricError("Ground-truth exterior has zero length")
    edges = np.diff(gt.exterior.points, axis=0)
    vertex_arc = np.concatenate(([0.0], np.cumsum(np.hypot(edges[:, 0], edges[:, 1]))))
    n_gt = len(edges)

    samples, pair_edge = _edge_samples(pred.exterior, step)
    along = shapely.line_locate_point(target, shapely.points(samples))
    projected = shapely.get_coordinates(shapely.line_interpolate_point(target, along))
    sample_angle, sample_len = _tangent_angles(samples)
    proj_angle, proj_len = _tangent_angles(projected)

    gt_edge = np.clip(np.searchsorted(vertex_arc, along, side="right") - 1, 0, n_gt - 1)
    # -1 where the projected step turns a ground-truth corner
    pair_gt = np.where(gt_edge[:-1] == gt_edge[1:], gt_edge[:-1], -1)
    usable = (pair_edge >= 0) & (pair_gt >= 0) & (proj_len > MTA_MIN_PROJECTED * sample_len)
    if not np.any(usable):
        raise MetricError("No sample pair projects cleanly onto the ground truth")

    n_pred = len(pred.exterior) - 1
    cover = np.bincount(
        pair_edge[usable] * n_gt + pair_gt[usable], weights=sample_len[usable], minlength=n_pred * n_gt
    ).reshape(n_pred, n_gt)
    valid = usable & (pair_gt == cover.argmax(axis=1)[np.maximum(pair_edge, 0)])

    diff = np.abs(sample_angle[valid] - proj_angle[valid]) % 360.0
    return float(np.max(np.minimum(diff, 360.0 - diff)))


def match_contours(
    preds: Sequence[Polygon], gts: Sequence[Polygon], canvas: EvalCanvas, threshold: float = MATCH_IOU
) -> list[tuple[int, int, float]]:
    """Pair predicted and ground-truth polygons one-to-one by maximal IoU.

    Returns:
        (pred index, gt index, iou) triples with iou > threshold, by pred index
    """
    if not preds or not gts:
        return []
    pred_masks = [rasterize([p], canvas).values for p in preds]
    gt_masks = [rasterize([g], canvas).values for g in gts]
    scores = np.array([[_mask_iou(p, g) if p.any() or g.any() else 0.0 for g in gt_masks] for p in pred_masks])
    rows, cols = linear_sum_assignment(-scores)
    return [(int(r), int(c), float(scores[r, c])) for r, c in zip(rows, cols, strict=True) if scores[r, c] > threshold]


def _mean(values: list[float]) -> float | None:
    return float(np.mean(values)) if values else None


def evaluate_image(
    pred: Sequence[Polygon], gt: Sequence[Polygon], canvas: EvalCanvas, image_id: str = ""
) -> tuple[ImageMetrics, list[float]]:
    """Metrics of one image plus the MTA of each matched contour pair."""
    n_pred = _vertex_total(pred)
    n_gt = _vertex_total(gt)
    overlap = iou(pred, gt, canvas)
    pair_mta = []
    pairs = match_contours(pred, gt, canvas)
    for p_idx, g_idx, _ in pairs:
        try:
            pair_mta.append(mta(pred[p_idx], gt[g_idx]))
        except MetricError as e:
            logger.warning("Image %s: skipping MTA of pair (%d, %d): %s", image_id, p_idx, g_idx, e)
    has_gt = n_gt > 0
    metrics = ImageMetrics(
        image_id=image_id,
        iou=overlap,
        c_iou=overlap * _complexity_scale(n_pred, n_gt) if has_gt else None,
        n_ratio=n_pred / n_gt if has_gt else None,
        mta=max(pair_mta) if pair_mta else None,
        pred_vertices=n_pred,
        gt_vertices=n_gt,
        matched_pairs=len(pairs),
    )
    return metrics, pair_mta


def evaluate_set(
    preds: Sequence[Sequence[Polygon]],
    gts: Sequence[Sequence[Polygon]],
    canvas: EvalCanvas,
    image_ids: Sequence[str] | None = None,
) -> MetricReport:
    """Evaluate parallel per-image polygon sets.

    IoU is averaged over every image, C-IoU and N-ratio over images that have
    ground truth (the others are listed in `skipped`) and MTA over all matched
    contour pairs.

    Raises:
        MetricError: If the two lists differ in length
    """
    if len(preds) != len(gts):
        raise MetricError(f"Got {len(preds)} predicted images but {len(gts)} ground-truth images")
    if image_ids is None:
        image_ids = [str(i) for i in range(len(preds))]

    rows: list[ImageMetrics] = []
    all_mta: list[float] = []
    for image_id, pred, gt in zip(image_ids, preds, gts, strict=True):
        metrics, pair_mta = evaluate_image(pred, gt, canvas, image_id)
        rows.append(metrics)
        all_mta.extend(pair_mta)
    skipped = tuple(r.image_id for r in rows if r.n_ratio is None)
    if skipped:
        logger.info("No ground truth in %d image(s); left out of C-IoU and N-ratio", len(skipped))

    return MetricReport(
        iou=_mean([r.iou for r in rows]) or 0.0,
        c_iou=_mean([r.c_iou for r in rows if r.c_iou is not None]),
        n_ratio=_mean([r.n_ratio for r in rows if r.n_ratio is not None]),
        mta=_mean(all_mta),
        pred_vertices=sum(r.pred_vertices for r in rows),
        gt_vertices=sum(r.gt_vertices for r in rows),
        matched_pairs=sum(r.matched_pairs for r in rows),
        images=tuple(rows),
        skipped=skipped,
    )
