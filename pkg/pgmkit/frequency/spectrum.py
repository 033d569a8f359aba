from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from core.exceptions import DomainError
from mask_io.grids import frozen_array, require_2d


def as_real_grid(grid) -> np.ndarray:
    """Вещественная 2D сетка из массива, LuminanceGrid или Heatmap."""
    values = np.asarray(getattr(grid, 'values', grid), dtype=np.float64)
    require_2d(values, 'grid')
    if not values.size:
        raise DomainError('grid is empty')
    if not np.all(np.isfinite(values)):
        raise DomainError('grid contains non-finite values')
    return values


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    """Комплексный спектр, бины в порядке fft (DC в [0, 0])."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = frozen_array(self.values, np.complex128)
        require_2d(values, 'spectrum')
        object.__setattr__(self, 'values', values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def dc(self) -> complex:
        return complex(self.values[0, 0])

    def is_conjugate_symmetric(self, tol: float = 1e-9) -> bool:
        """S(-k) == conj(S(k)) с индексами по модулю размера."""
        mirrored = np.roll(self.values[::-1, ::-1], 1, axis=(0, 1))
        scale = max(1.0, float(np.abs(self.values).max(initial=0.0)))
        error = np.abs(mirrored - np.conj(self.values)).max()
        return bool(error <= tol * scale)


def dft2(grid, workers: Optional[int] = None) -> SpectrumGrid:
    """Двумерное ДПФ без нормировки: DC равен сумме отсчётов."""
    return SpectrumGrid(sp_fft.fft2(as_real_grid(grid), workers=workers))


def idft2(spectrum: SpectrumGrid, workers: Optional[int] = None) -> np.ndarray:
    """Обратное ДПФ, вещественная часть."""
    if not spectrum.values.size:
        raise DomainError('spectrum is empty')
    return sp_fft.ifft2(spectrum.values, workers=workers).real
