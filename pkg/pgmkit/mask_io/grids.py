from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from core.exceptions import DomainError, RangeError

EMPTY_BBOX = (0, 0, 0, 0)


def frozen_array(values, dtype) -> np.ndarray:
    """Копия массива, защищённая от записи."""
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


def require_2d(array: np.ndarray, what: str) -> None:
    if array.ndim != 2:
        raise DomainError(f'{what} must be two-dimensional, got {array.shape}')


@dataclass(frozen=True, eq=False)
class LuminanceGrid:
    """Сетка яркостей I(u) в [0, 1], строки сверху вниз."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = frozen_array(self.values, np.float64)
        require_2d(values, 'luminance grid')
        if not np.all(np.isfinite(values)):
            raise RangeError('luminance grid contains non-finite values')
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise RangeError(
                'luminance values must lie in [0, 1], got '
                f'[{values.min():g}, {values.max():g}]'
            )
        object.__setattr__(self, 'values', values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_mask(cls, mask: 'BinaryMask') -> 'LuminanceGrid':
        return cls(mask.bits.astype(np.float64))

    def to_mask(self) -> 'BinaryMask':
        """Обратное преобразование, только для сеток из 0 и 1."""
        if not np.all((self.values == 0.0) | (self.values == 1.0)):
            raise RangeError('grid is not binary, conversion would be lossy')
        return BinaryMask(self.values == 1.0)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = frozen_array(self.bits, np.bool_)
        require_2d(bits, 'mask')
        object.__setattr__(self, 'bits', bits)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bits.shape

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def bbox(self) -> Tuple[int, int, int, int]:
        """Минимальный прямоугольник (x_min, y_min, w, h)."""
        rows = np.flatnonzero(self.bits.any(axis=1))
        cols = np.flatnonzero(self.bits.any(axis=0))
        if not rows.size:
            return EMPTY_BBOX
        return (
            int(cols[0]),
            int(rows[0]),
            int(cols[-1] - cols[0] + 1),
            int(rows[-1] - rows[0] + 1),
        )

    def to_grid(self) -> LuminanceGrid:
        return LuminanceGrid.from_mask(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return (self.shape == other.shape
                and bool(np.array_equal(self.bits, other.bits)))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class InstanceAnnotation:
    """Эталонный экземпляр: категория и маска."""

    category_id: int
    mask: BinaryMask
    area: int = field(init=False)
    bbox: Tuple[int, int, int, int] = field(init=False)

    def __post_init__(self) -> None:
        if int(self.category_id) < 0:
            raise DomainError('category_id must be non-negative')
        object.__setattr__(self, 'area', self.mask.area)
        object.__setattr__(self, 'bbox', self.mask.bbox)


@dataclass(frozen=True, eq=False)
class Detection:
    """Предсказанный экземпляр с уверенностью."""

    category_id: int
    score: float
    mask: BinaryMask
    area: int = field(init=False)
    bbox: Tuple[int, int, int, int] = field(init=False)

    def __post_init__(self) -> None:
        if int(self.category_id) < 0:
            raise DomainError('category_id must be non-negative')
        if not np.isfinite(self.score) or not 0.0 <= self.score <= 1.0:
            raise RangeError(f'score must lie in [0, 1], got {self.score}')
        object.__setattr__(self, 'area', self.mask.area)
        object.__setattr__(self, 'bbox', self.mask.bbox)
