"""AP по соглашениям COCO: пороги IoU 0.50:0.05:0.95, 101 точка
полноты, диапазоны площади small/medium/large.

Срезы без эталонов получают -1 и не входят в средние.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings

from core.parallel import map_ordered
from mask_io.grids import Detection, InstanceAnnotation

from .iou import iou_matrix
from .matching import greedy_match, score_order

logger = logging.getLogger(__name__)

MISSING = -1.0
ALL_AREAS = (0, float('inf'))
AREA_FIELDS = (('ap_s', 'small'), ('ap_m', 'medium'), ('ap_l', 'large'))


def recall_grid() -> np.ndarray:
    points = settings.EVAL_RECALL_POINTS
    return np.linspace(0.0, 1.0, points)


@dataclass(frozen=True)
class PrCurve:
    threshold: float
    recall: Tuple[float, ...]
    precision: Tuple[float, ...]

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.recall, self.precision))

    @property
    def ap(self) -> float:
        return float(np.mean(self.precision))


@dataclass
class ApSummary:
    map: float
    ap50: float
    ap75: float
    ap_s: float
    ap_m: float
    ap_l: float

    JSON_KEYS = {
        'map': 'mAP', 'ap50': 'AP50', 'ap75': 'AP75',
        'ap_s': 'AP_S', 'ap_m': 'AP_M', 'ap_l': 'AP_L',
    }

    def metrics(self) -> Dict[str, float]:
        return {
            self.JSON_KEYS[item.name]: getattr(self, item.name)
            for item in fields(ApSummary)
        }

    @classmethod
    def metric_names(cls) -> Iterable[Tuple[str, str]]:
        return cls.JSON_KEYS.items()


@dataclass
class EvalResult(ApSummary):
    per_category: Dict[int, ApSummary] = field(default_factory=dict)
    pr_curves: Dict[int, Dict[float, PrCurve]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        payload = self.metrics()
        payload['per_category'] = {
            str(category): summary.metrics()
            for category, summary in sorted(self.per_category.items())
        }
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> 'EvalResult':
        def summary(data, kind):
            return kind(**{name: float(data[key])
                           for name, key in ApSummary.metric_names()})

        result = summary(payload, cls)
        result.per_category = {
            int(category): summary(data, ApSummary)
            for category, data in payload.get('per_category', {}).items()
        }
        return result


def _as_images(items) -> Dict[int, list]:
    """Записи по изображениям; плоский список считается одним изображением."""
    items = list(items)
    if not items:
        return {}
    if isinstance(items[0], (Detection, InstanceAnnotation)):
        return {0: items}
    images = defaultdict(list)
    for image_id, records in items:
        images[image_id].extend(records)
    return dict(images)


def _in_range(areas: np.ndarray, area_range) -> np.ndarray:
    low, high = area_range
    return (areas >= low) & (areas < high)


@dataclass
class _ImageEval:
    """Детекции и эталоны одного изображения и одной категории."""

    scores: np.ndarray
    det_areas: np.ndarray
    gt_areas: np.ndarray
    ious: np.ndarray

    def evaluate(self, iou_thr: float, area_range):
        """Score, флаги TP и игнорирования детекций, число эталонов."""
        gt_ignore = ~_in_range(self.gt_areas, area_range)
        matches = greedy_match(self.ious, range(self.scores.size), iou_thr,
                               gt_ignore)
        matched = np.zeros(self.scores.size, dtype=bool)
        det_ignore = np.zeros(self.scores.size, dtype=bool)
        for det, gt in matches:
            if gt is None:
                continue
            matched[det] = True
            det_ignore[det] = gt_ignore[gt]
        outside = ~_in_range(self.det_areas, area_range)
        det_ignore |= ~matched & outside
        return matched, det_ignore, int(np.count_nonzero(~gt_ignore))


def _prepare(dets: Sequence, gts: Sequence,
             max_detections: int) -> _ImageEval:
    order = score_order([det.score for det in dets])[:max_detections]
    dets = [dets[index] for index in order]
    return _ImageEval(
        scores=np.array([det.score for det in dets], dtype=np.float64),
        det_areas=np.array([det.area for det in dets], dtype=np.float64),
        gt_areas=np.array([gt.area for gt in gts], dtype=np.float64),
        ious=iou_matrix(dets, gts),
    )


def interpolated_precision(scores: np.ndarray, tp: np.ndarray,
                           n_gt: int) -> np.ndarray:
    """Точность на сетке полноты, справа-максимум, 0 за пределами."""
    grid = recall_grid()
    q = np.zeros(grid.size)
    if not scores.size:
        return q
    order = np.argsort(-scores, kind='stable')
    tp = tp[order]
    tp_sum = np.cumsum(tp)
    fp_sum = np.cumsum(~tp)
    recall = tp_sum / n_gt
    precision = tp_sum / (tp_sum + fp_sum)
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    positions = np.searchsorted(recall, grid, side='left')
    inside = positions < recall.size
    q[inside] = precision[positions[inside]]
    return q


def _precision(images: List[_ImageEval], iou_thr: float,
               area_range) -> Optional[np.ndarray]:
    scores, flags = [], []
    n_gt = 0
    for image in images:
        matched, ignored, count = image.evaluate(iou_thr, area_range)
        n_gt += count
        scores.append(image.scores[~ignored])
        flags.append(matched[~ignored])
    if n_gt == 0:
        return None
    return interpolated_precision(np.concatenate(scores),
                                  np.concatenate(flags), n_gt)


def _category_images(dets: Dict[int, list], gts: Dict[int, list],
                     max_detections: int) -> List[_ImageEval]:
    return [
        _prepare(dets.get(image_id, []), gts.get(image_id, []),
                 max_detections)
        for image_id in sorted(set(dets) | set(gts))
    ]


def _max_detections(value: Optional[int]) -> int:
    return settings.EVAL_MAX_DETECTIONS if value is None else int(value)


def pr_curve(dets, gts, iou_thr: float,
             max_detections: Optional[int] = None) -> PrCurve:
    """PR-кривая одной категории на 101 точке полноты."""
    images = _category_images(_as_images(dets), _as_images(gts),
                              _max_detections(max_detections))
    q = _precision(images, iou_thr, ALL_AREAS)
    if q is None:
        q = np.zeros(recall_grid().size)
    return PrCurve(float(iou_thr), tuple(recall_grid().tolist()),
                   tuple(q.tolist()))


def average_precision(dets, gts, iou_thr: float,
                      max_detections: Optional[int] = None) -> float:
    """AP одной категории; без эталонов -1."""
    images = _category_images(_as_images(dets), _as_images(gts),
                              _max_detections(max_detections))
    q = _precision(images, iou_thr, ALL_AREAS)
    return MISSING if q is None else float(np.mean(q))


def _mean_defined(values: Iterable[float]) -> float:
    defined = [value for value in values if value != MISSING]
    return float(np.mean(defined)) if defined else MISSING


def _split_by_category(images: Dict[int, list]) -> Dict[int, Dict[int, list]]:
    split = defaultdict(lambda: defaultdict(list))
    for image_id, records in images.items():
        for record in records:
            split[int(record.category_id)][image_id].append(record)
    return split


def coco_map(dets, gts, max_detections: Optional[int] = None,
             iou_thresholds: Optional[Sequence[float]] = None,
             workers: Optional[int] = None) -> EvalResult:
    """mAP, AP50, AP75, AP_S/M/L по категориям и в среднем."""
    if iou_thresholds is None:
        iou_thresholds = settings.EVAL_IOU_THRESHOLDS
    thresholds = sorted({float(t) for t in iou_thresholds} | {0.5, 0.75})
    max_detections = _max_detections(max_detections)
    area_ranges = settings.EVAL_AREA_RANGES
    det_split = _split_by_category(_as_images(dets))
    gt_split = _split_by_category(_as_images(gts))
    categories = sorted(set(det_split) | set(gt_split))

    def evaluate(category):
        images = _category_images(det_split.get(category, {}),
                                  gt_split.get(category, {}),
                                  max_detections)

        def ap_over(area_range):
            curves = {t: _precision(images, t, area_range)
                      for t in thresholds}
            return {t: (MISSING if q is None else float(np.mean(q)))
                    for t, q in curves.items()}, curves

        overall, curves = ap_over(ALL_AREAS)
        values = {
            'map': _mean_defined_all(overall, iou_thresholds),
            'ap50': overall[0.5],
            'ap75': overall[0.75],
        }
        for name, label in AREA_FIELDS:
            banded, _ = ap_over(area_ranges[label])
            values[name] = _mean_defined_all(banded, iou_thresholds)
        pr = {
            t: PrCurve(t, tuple(recall_grid().tolist()), tuple(q.tolist()))
            for t, q in curves.items() if q is not None
        }
        return ApSummary(**values), pr

    outcomes = map_ordered(evaluate, categories, workers)
    per_category = {}
    pr_curves = {}
    for category, (summary, curves) in zip(categories, outcomes):
        if summary.map == MISSING:
            continue
        per_category[category] = summary
        pr_curves[category] = curves
    summaries = list(per_category.values())
    result = EvalResult(
        **{item.name: _mean_defined(getattr(s, item.name) for s in summaries)
           for item in fields(ApSummary)},
        per_category=per_category,
        pr_curves=pr_curves,
    )
    logger.debug('evaluated %d categories, mAP=%g',
                 len(per_category), result.map)
    return result


def _mean_defined_all(per_threshold: Dict[float, float],
                      iou_thresholds: Sequence[float]) -> float:
    """Среднее по порогам; срез без эталонов даёт -1."""
    values = [per_threshold[float(t)] for t in iou_thresholds]
    if any(value == MISSING for value in values):
        return MISSING
    return float(np.mean(values))


def compare_results(candidate: EvalResult,
                    baseline: EvalResult) -> Dict[str, Optional[float]]:
    """Разность метрик candidate - baseline; null, если срез пуст."""
    deltas = {}
    for name, key in ApSummary.metric_names():
        a, b = getattr(candidate, name), getattr(baseline, name)
        deltas[key] = None if MISSING in (a, b) else a - b
    return deltas
