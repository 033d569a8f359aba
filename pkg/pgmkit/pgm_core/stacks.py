import logging
import math
import os
from typing import List, Optional, Sequence

import numpy as np
from django.conf import settings

from core.exceptions import DomainError
from core.parallel import map_ordered
from mask_io.netpbm import write_grid

from .heatmaps import HeatmapStack, check_normalization, normalize_heatmap
from .mixture import PATHS, GridLike, as_luminance, pgm

logger = logging.getLogger(__name__)

SEPARATOR = 2
EXTENSIONS = {'pfm_float': 'pfm', 'netpbm_gray16': 'pgm'}


def check_lambdas(lambdas: Sequence[float]) -> List[float]:
    """Непустой строго возрастающий список положительных λ."""
    lambdas = [float(lam) for lam in lambdas]
    if not lambdas:
        raise DomainError('lambda list is empty')
    if any(not math.isfinite(lam) or lam <= 0 for lam in lambdas):
        raise DomainError(f'lambdas must be positive, got {lambdas}')
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise DomainError(f'lambdas must be strictly increasing: {lambdas}')
    return lambdas


def multiscale_stack(grid: GridLike,
                     lambdas: Optional[Sequence[float]] = None,
                     path: str = 'separable',
                     normalization: Optional[str] = None,
                     workers: Optional[int] = None) -> HeatmapStack:
    """Стек карт G(I;λ) по всем λ; карты считаются параллельно."""
    if lambdas is None:
        lambdas = settings.PGM_DEFAULT_LAMBDAS
    if normalization is None:
        normalization = settings.PGM_DEFAULT_NORMALIZATION
    lambdas = check_lambdas(lambdas)
    check_normalization(normalization)
    if path not in PATHS:
        raise DomainError(f'path must be one of {PATHS}, got {path!r}')
    grid = as_luminance(grid)

    def build(lam):
        return normalize_heatmap(pgm(grid, lam, path), normalization)

    maps = map_ordered(build, lambdas, workers)
    logger.debug('stack of %d maps via %s', len(maps), path)
    return HeatmapStack(tuple(lambdas), tuple(maps))


def stack_filename(stem: str, lam: float, kind: str) -> str:
    return f'{stem}_lambda{lam:g}.{EXTENSIONS[kind]}'


def write_stack(stack: HeatmapStack, out_dir: str, stem: str = 'heatmap',
                kind: str = 'pfm_float') -> List[str]:
    """Один файл на λ с суффиксом _lambda<λ>."""
    if kind not in EXTENSIONS:
        raise DomainError(f'unknown output kind {kind!r}')
    paths = []
    for heatmap in stack.maps:
        path = os.path.join(out_dir, stack_filename(stem, heatmap.lam, kind))
        write_grid(heatmap, path, kind)
        paths.append(path)
    return paths


def tile_stack(stack: HeatmapStack) -> np.ndarray:
    """Карты рядом, каждая нормирована на максимум, между ними 2 px нуля."""
    height, width = stack.maps[0].shape
    count = len(stack)
    panel = np.zeros((height, count * width + SEPARATOR * (count - 1)))
    for index, heatmap in enumerate(stack.maps):
        left = index * (width + SEPARATOR)
        panel[:, left:left + width] = normalize_heatmap(
            heatmap, 'max_one').values
    return panel
