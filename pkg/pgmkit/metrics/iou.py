from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.exceptions import DomainError
from mask_io.grids import BinaryMask


@dataclass(frozen=True)
class IouResult:
    iou: float
    empty_pair: bool = False


def mask_iou_result(a: BinaryMask, b: BinaryMask) -> IouResult:
    """IoU с флагом пары пустых масок."""
    if a.shape != b.shape:
        raise DomainError(f'mask shapes differ: {a.shape} vs {b.shape}')
    union = np.count_nonzero(a.bits | b.bits)
    if union == 0:
        return IouResult(0.0, empty_pair=True)
    inter = np.count_nonzero(a.bits & b.bits)
    return IouResult(inter / union)


def mask_iou(a: BinaryMask, b: BinaryMask) -> float:
    """|a ∩ b| / |a ∪ b|; две пустые маски дают 0."""
    return mask_iou_result(a, b).iou


def iou_matrix(dets: Sequence, gts: Sequence) -> np.ndarray:
    """Матрица IoU детекций (строки) и эталонов (столбцы)."""
    if not dets or not gts:
        return np.zeros((len(dets), len(gts)))
    shapes = {item.mask.shape for item in list(dets) + list(gts)}
    if len(shapes) > 1:
        raise DomainError(f'masks of one image differ in shape: {shapes}')
    d = np.stack([item.mask.bits.ravel() for item in dets]).astype(np.int64)
    g = np.stack([item.mask.bits.ravel() for item in gts]).astype(np.int64)
    inter = d @ g.T
    union = d.sum(axis=1)[:, None] + g.sum(axis=1)[None, :] - inter
    out = np.zeros(inter.shape)
    np.divide(inter, union, out=out, where=union > 0)
    return out
