"""Три способа вычислить G(I;λ)(x) = Σ_u I(u) exp(-|x-u|^2 / 2λ^2).

pgm_exact: прямая двойная сумма, эталон для остальных путей.
pgm_separable: две одномерные свёртки, ядро усечено до радиуса r.
pgm_fft: линейная свёртка через rfft2 с дополнением нулями.
"""
import logging
import math
from typing import Optional, Union

import numpy as np
from django.conf import settings
from scipy import fft as sp_fft
from scipy.ndimage import correlate1d

from core.exceptions import DomainError, ResourceError
from mask_io.grids import BinaryMask, LuminanceGrid

from .gaussian import check_lambda, gaussian_profile
from .heatmaps import Heatmap

logger = logging.getLogger(__name__)

FULL = 'full'
PATHS = ('exact', 'separable', 'fft')

# пар (пиксель, источник) на один блок в pgm_exact
EXACT_BLOCK = 1 << 22

GridLike = Union[LuminanceGrid, BinaryMask, np.ndarray]


def as_luminance(grid: GridLike) -> LuminanceGrid:
    """Маска превращается в яркость {0, 1}, массив проверяется."""
    if isinstance(grid, LuminanceGrid):
        return grid
    if isinstance(grid, BinaryMask):
        return grid.to_grid()
    return LuminanceGrid(grid)


def truncation_radius(lam: float, factor: Optional[float] = None) -> int:
    """ceil(factor * λ), по умолчанию factor = PGM_TRUNCATION_FACTOR."""
    if factor is None:
        factor = settings.PGM_TRUNCATION_FACTOR
    return max(1, math.ceil(factor * lam))


def pgm_exact(grid: GridLike, lam: float) -> Heatmap:
    """Прямая сумма по всем парам пикселей, O((HW)^2)."""
    lam = check_lambda(lam)
    values = as_luminance(grid).values
    height, width = values.shape
    rows, cols = np.indices(values.shape)
    targets = np.stack([rows.ravel(), cols.ravel()], axis=1).astype(float)
    # нулевые пиксели ничего не добавляют в сумму
    support = np.flatnonzero(values.ravel())
    sources = targets[support]
    weights = values.ravel()[support]
    out = np.zeros(height * width)
    if support.size:
        step = max(1, EXACT_BLOCK // support.size)
        for start in range(0, targets.shape[0], step):
            chunk = targets[start:start + step]
            diff = chunk[:, None, :] - sources[None, :, :]
            dist2 = np.einsum('ijk,ijk->ij', diff, diff)
            kernel = np.exp(-dist2 / (2.0 * lam ** 2))
            out[start:start + step] = kernel @ weights
    logger.debug('pgm_exact %dx%d lambda=%g sources=%d',
                 width, height, lam, support.size)
    return Heatmap(out.reshape(height, width), lam)


def pgm_separable(grid: GridLike, lam: float,
                  truncation: Union[int, str, None] = None) -> Heatmap:
    """Строки, затем столбцы: exp(-(dx^2+dy^2)/2λ^2) раскладывается."""
    lam = check_lambda(lam)
    values = as_luminance(grid).values
    height, width = values.shape
    if truncation == FULL:
        radius = max(height, width) - 1
    elif truncation is None:
        radius = truncation_radius(lam)
    else:
        if int(truncation) != truncation or truncation < 1:
            raise DomainError(
                f'truncation radius must be >= 1 or FULL, got {truncation}'
            )
        radius = int(truncation)
    radius = max(radius, 1)
    kernel = gaussian_profile(radius, lam)
    out = correlate1d(values, kernel, axis=1, mode='constant', cval=0.0)
    out = correlate1d(out, kernel, axis=0, mode='constant', cval=0.0)
    logger.debug('pgm_separable %dx%d lambda=%g radius=%d',
                 width, height, lam, radius)
    return Heatmap(np.maximum(out, 0.0), lam)


def padded_size(size: int, radius: int) -> int:
    """Степень двойки не меньше size + 2 * radius."""
    need = size + 2 * radius
    return 1 << (need - 1).bit_length()


def fft_bytes(shape) -> int:
    """Оценка памяти под rfft2 сетки и ядра."""
    rows, cols = shape
    real = rows * cols * 8
    spectrum = rows * (cols // 2 + 1) * 16
    return 2 * real + 2 * spectrum


def pgm_fft(grid: GridLike, lam: float,
            memory_budget: Optional[int] = None,
            workers: Optional[int] = None) -> Heatmap:
    """Линейная свёртка с ядром ширины 2*ceil(4λ)+1 через rfft2."""
    lam = check_lambda(lam)
    if memory_budget is None:
        memory_budget = settings.PGM_FFT_MEMORY_BUDGET
    values = as_luminance(grid).values
    height, width = values.shape
    radius = truncation_radius(lam)
    shape = (padded_size(height, radius), padded_size(width, radius))
    needed = fft_bytes(shape)
    if needed > memory_budget:
        raise ResourceError(
            f'padded transform {shape[1]}x{shape[0]} needs {needed} bytes, '
            f'budget is {memory_budget}'
        )
    profile = gaussian_profile(radius, lam)
    kernel = np.outer(profile, profile)
    spectrum = sp_fft.rfft2(values, s=shape, workers=workers)
    spectrum *= sp_fft.rfft2(kernel, s=shape, workers=workers)
    full = sp_fft.irfft2(spectrum, s=shape, workers=workers)
    out = full[radius:radius + height, radius:radius + width]
    logger.debug('pgm_fft %dx%d lambda=%g padded=%s',
                 width, height, lam, shape)
    return Heatmap(np.maximum(out, 0.0), lam)


def pgm(grid: GridLike, lam: float, path: str = 'separable') -> Heatmap:
    """Выбор пути вычисления по имени."""
    if path == 'exact':
        return pgm_exact(grid, lam)
    if path == 'separable':
        return pgm_separable(grid, lam)
    if path == 'fft':
        return pgm_fft(grid, lam)
    raise DomainError(f'path must be one of {PATHS}, got {path!r}')
