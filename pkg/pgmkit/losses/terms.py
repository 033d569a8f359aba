"""Слагаемые функции потерь и их взвешенная сумма.

L = w_cls·L_cls + w_obj·L_obj + w_mask·L_mask + w_dice·L_dice + w_gh·L_gh
"""
import math
from dataclasses import asdict, dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from django.conf import settings
from scipy.special import log_softmax

from core.exceptions import DomainError
from pgm_core.heatmaps import HeatmapStack, downsample_heatmap

TERMS = ('cls', 'obj', 'mask', 'dice', 'gh')


def _clamp_eps() -> float:
    return settings.LOSS_CLAMP_EPS


def _probabilities(pred) -> np.ndarray:
    values = np.asarray(getattr(pred, 'values', pred), dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DomainError('predictions must be finite')
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise DomainError('predictions must be probabilities in [0, 1]')
    return values


def _labels(gt) -> np.ndarray:
    return np.asarray(getattr(gt, 'bits', gt), dtype=np.float64)


def _same_shape(pred: np.ndarray, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise DomainError(
            f'prediction {pred.shape} and target {gt.shape} differ in shape'
        )


def bce_pixel(pred, gt) -> float:
    """Средняя по пикселям бинарная кросс-энтропия."""
    p = _probabilities(pred)
    y = _labels(gt)
    _same_shape(p, y)
    eps = _clamp_eps()
    p = np.clip(p, eps, 1.0 - eps)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def bce_scalar(pred_score: float, gt_label: int) -> float:
    """Бинарная кросс-энтропия объектности."""
    if gt_label not in (0, 1):
        raise DomainError(f'label must be 0 or 1, got {gt_label}')
    if not math.isfinite(pred_score):
        raise DomainError('score must be finite')
    eps = _clamp_eps()
    p = min(max(float(pred_score), eps), 1.0 - eps)
    return -math.log(p) if gt_label else -math.log1p(-p)


def cross_entropy(logits: Sequence[float], label: int) -> float:
    """-ln softmax(logits)[label]."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1 or not logits.size:
        raise DomainError('logits must be a non-empty vector')
    if not np.all(np.isfinite(logits)):
        raise DomainError('logits must be finite')
    if int(label) != label or not 0 <= label < logits.size:
        raise DomainError(
            f'label {label} out of range for {logits.size} classes'
        )
    # log_softmax вычитает максимум перед экспонентой
    return float(-log_softmax(logits)[int(label)])


def dice_loss(pred, gt) -> float:
    """1 - (2·Σpy + ε) / (Σp + Σy + ε)."""
    p = _probabilities(pred)
    y = _labels(gt)
    _same_shape(p, y)
    smooth = settings.DICE_SMOOTH
    overlap = (2.0 * np.sum(p * y) + smooth) / (p.sum() + y.sum() + smooth)
    return float(min(1.0, max(0.0, 1.0 - overlap)))


def gh_loss(pred_maps: Sequence, target: HeatmapStack,
            stride_pairs: Sequence[int]) -> float:
    """Среднее по масштабам MSE между картой и уменьшенной целью."""
    if not (len(pred_maps) == len(target.maps) == len(stride_pairs)):
        raise DomainError(
            f'{len(pred_maps)} predictions, {len(target.maps)} targets and '
            f'{len(stride_pairs)} strides do not match'
        )
    if not pred_maps:
        raise DomainError('at least one scale is required')
    if target.maps[0].normalization != 'max_one':
        raise DomainError('heatmap targets must be max_one normalized')
    errors = []
    for pred, heatmap, stride in zip(pred_maps, target.maps, stride_pairs):
        values = np.asarray(getattr(pred, 'values', pred), dtype=np.float64)
        expected = downsample_heatmap(heatmap, stride).values
        _same_shape(values, expected)
        if not np.all(np.isfinite(values)):
            raise DomainError('predicted heatmap must be finite')
        errors.append(np.mean((values - expected) ** 2))
    return float(np.mean(errors))


@dataclass(frozen=True)
class LossWeights:
    w_cls: float = 0.2
    w_obj: float = 0.2
    w_mask: float = 0.2
    w_dice: float = 0.2
    w_gh: float = 0.2

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not (math.isfinite(value) and value >= 0.0):
                raise DomainError(f'{name} must be finite and >= 0')

    @classmethod
    def from_settings(cls) -> 'LossWeights':
        return cls(**{f'w_{term}': float(settings.LOSS_WEIGHTS[term])
                      for term in TERMS})

    def scaled(self, factor: float) -> 'LossWeights':
        return LossWeights(**{name: value * factor
                              for name, value in asdict(self).items()})

    def as_tuple(self):
        return tuple(getattr(self, f'w_{term}') for term in TERMS)


@dataclass(frozen=True)
class LossBreakdown:
    cls: float
    obj: float
    mask: float
    dice: float
    gh: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


Parts = Union[Mapping[str, float], Sequence[float]]


def total_loss(parts: Parts,
               w: Optional[LossWeights] = None) -> LossBreakdown:
    """Взвешенная сумма пяти слагаемых."""
    if w is None:
        w = LossWeights.from_settings()
    if isinstance(parts, Mapping):
        missing = set(TERMS) - set(parts)
        if missing:
            raise DomainError(f'missing loss terms: {sorted(missing)}')
        values = [float(parts[term]) for term in TERMS]
    else:
        values = [float(part) for part in parts]
        if len(values) != len(TERMS):
            raise DomainError(f'expected {len(TERMS)} loss terms')
    for term, value in zip(TERMS, values):
        if not (math.isfinite(value) and value >= 0.0):
            raise DomainError(f'loss term {term} must be finite and >= 0')
    total = math.fsum(
        weight * value for weight, value in zip(w.as_tuple(), values)
    )
    return LossBreakdown(*values, total=total)
