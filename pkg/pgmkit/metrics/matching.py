"""Жадное сопоставление детекций с эталонами одного изображения."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .iou import iou_matrix

Match = Tuple[int, Optional[int]]

# порог чуть ниже 1, чтобы IoU = 1.0 проходил порог 1.0
IOU_CEILING = 1 - 1e-10


def score_order(scores: Sequence[float]) -> np.ndarray:
    """Индексы по убыванию score, равные по возрастанию индекса."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind='stable')


def greedy_match(ious: np.ndarray, order: Sequence[int], iou_thr: float,
                 gt_ignore: Optional[np.ndarray] = None) -> List[Match]:
    """Сопоставление в порядке order.

    Детекция берёт свободный эталон с наибольшим IoU >= iou_thr, при
    равенстве с меньшим индексом. Игнорируемый эталон выбирается,
    только если не подошёл ни один обычный.
    """
    n_gt = ious.shape[1]
    if gt_ignore is None:
        gt_ignore = np.zeros(n_gt, dtype=bool)
    taken = np.zeros(n_gt, dtype=bool)
    threshold = min(iou_thr, IOU_CEILING)
    matches = []
    for det in order:
        best = None
        for ignored in (False, True):
            candidates = np.flatnonzero(
                ~taken & (gt_ignore == ignored)
                & (ious[det] >= threshold)
            )
            if candidates.size:
                best = int(candidates[np.argmax(ious[det, candidates])])
                break
        if best is not None:
            taken[best] = True
        matches.append((int(det), best))
    return matches


def match_instances(dets: Sequence, gts: Sequence,
                    iou_thr: float) -> List[Match]:
    """Пары (индекс детекции, индекс эталона или None) по убыванию score."""
    ious = iou_matrix(dets, gts)
    order = score_order([det.score for det in dets])
    return greedy_match(ious, order, iou_thr)
