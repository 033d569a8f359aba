from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.exceptions import DomainError
from mask_io.grids import frozen_array, require_2d

from .gaussian import check_lambda

NORMALIZATIONS = ('raw', 'max_one')


def check_normalization(mode: str) -> str:
    if mode not in NORMALIZATIONS:
        raise DomainError(
            f'normalization must be one of {NORMALIZATIONS}, got {mode!r}'
        )
    return mode


@dataclass(frozen=True, eq=False)
class Heatmap:
    """Отклик G(I;λ) на сетке, строки сверху вниз."""

    values: np.ndarray
    lam: float
    normalization: str = 'raw'

    def __post_init__(self) -> None:
        values = frozen_array(self.values, np.float64)
        require_2d(values, 'heatmap')
        if not np.all(np.isfinite(values)):
            raise DomainError('heatmap values must be finite')
        if values.size and values.min() < 0.0:
            raise DomainError('heatmap values must be non-negative')
        check_normalization(self.normalization)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'lam', check_lambda(self.lam))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class HeatmapStack:
    """Карты для возрастающих λ одного размера и режима нормировки."""

    lambdas: Tuple[float, ...]
    maps: Tuple[Heatmap, ...]

    def __post_init__(self) -> None:
        lambdas = tuple(float(lam) for lam in self.lambdas)
        maps = tuple(self.maps)
        if len(lambdas) != len(maps):
            raise DomainError('one heatmap per lambda is required')
        if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
            raise DomainError('lambdas must be strictly increasing')
        if any(heatmap.lam != lam for heatmap, lam in zip(maps, lambdas)):
            raise DomainError('heatmap lambda does not match the stack')
        if len({heatmap.shape for heatmap in maps}) > 1:
            raise DomainError('stack heatmaps must share one shape')
        if len({heatmap.normalization for heatmap in maps}) > 1:
            raise DomainError('stack heatmaps must share one normalization')
        object.__setattr__(self, 'lambdas', lambdas)
        object.__setattr__(self, 'maps', maps)

    def __len__(self) -> int:
        return len(self.maps)


def normalize_heatmap(h: Heatmap, mode: str = 'max_one') -> Heatmap:
    """raw: тождество; max_one: деление на максимум, если он > 0."""
    check_normalization(mode)
    if mode == 'raw':
        return h
    peak = h.values.max(initial=0.0)
    values = h.values / peak if peak > 0.0 else h.values
    return Heatmap(values, h.lam, 'max_one')


def downsample_heatmap(h: Heatmap, stride: int) -> Heatmap:
    """Среднее по блокам stride x stride.

    Края, не кратные stride, дополняются нулями до полного блока.
    """
    if int(stride) != stride or stride < 1:
        raise DomainError(f'stride must be a positive integer, got {stride}')
    stride = int(stride)
    if stride == 1:
        return h
    height, width = h.shape
    out_h = -(-height // stride)
    out_w = -(-width // stride)
    padded = np.zeros((out_h * stride, out_w * stride))
    padded[:height, :width] = h.values
    blocks = padded.reshape(out_h, stride, out_w, stride)
    return Heatmap(blocks.mean(axis=(1, 3)), h.lam, h.normalization)
