"""Детерминированное частотное усиление границ.

Сетка переводится в частотную область, высокие частоты выделяются
фильтром Баттерворта, обратное преобразование даёт карту усиления,
которая применяется к исходной сетке остаточно: f + α·(g ⊙ f).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings

from core.exceptions import DomainError

from .spectrum import SpectrumGrid, as_real_grid, dft2, idft2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FanConfig:
    rho0: float = 0.25
    sharpness: float = 2.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho0) and 0.0 < self.rho0 <= 0.5):
            raise DomainError(f'rho0 must lie in (0, 0.5], got {self.rho0}')
        if not (math.isfinite(self.sharpness) and self.sharpness > 0.0):
            raise DomainError(
                f'sharpness must be positive, got {self.sharpness}'
            )
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise DomainError(f'alpha must be >= 0, got {self.alpha}')

    @classmethod
    def from_settings(cls, **overrides) -> 'FanConfig':
        values = {
            'rho0': settings.FAN_RHO0,
            'sharpness': settings.FAN_SHARPNESS,
            'alpha': settings.FAN_ALPHA,
        }
        values.update(
            {key: value for key, value in overrides.items()
             if value is not None}
        )
        return cls(**values)


def radial_frequency(width: int, height: int) -> np.ndarray:
    """Нормированная радиальная частота бинов в порядке fft, до ~0.707."""
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    return np.sqrt(fx ** 2 + fy ** 2)


def highpass_weight(width: int, height: int, cfg: FanConfig) -> np.ndarray:
    """1 / (1 + (rho0/ρ)^(2s)); в DC ровно 0."""
    rho = radial_frequency(width, height)
    weight = np.zeros_like(rho)
    nonzero = rho > 0.0
    weight[nonzero] = 1.0 / (
        1.0 + (cfg.rho0 / rho[nonzero]) ** (2.0 * cfg.sharpness)
    )
    return weight


def fan_gain(f, cfg: Optional[FanConfig] = None,
             workers: Optional[int] = None) -> np.ndarray:
    """Карта усиления в [-1, 1]; постоянная сетка даёт нули."""
    if cfg is None:
        cfg = FanConfig.from_settings()
    values = as_real_grid(f)
    height, width = values.shape
    if np.ptp(values) == 0.0:
        # вся энергия в DC, а там вес 0
        return np.zeros_like(values)
    spectrum = dft2(values - values.mean(), workers)
    weighted = SpectrumGrid(
        spectrum.values * highpass_weight(width, height, cfg)
    )
    gain = idft2(weighted, workers)
    peak = np.abs(gain).max()
    logger.debug('fan_gain %dx%d rho0=%g s=%g peak=%g',
                 width, height, cfg.rho0, cfg.sharpness, peak)
    if peak == 0.0:
        return gain
    return gain / peak


def fan_apply(f, g, alpha: Optional[float] = None) -> np.ndarray:
    """Остаточное применение: f + alpha * (g * f)."""
    if alpha is None:
        alpha = settings.FAN_ALPHA
    if not (math.isfinite(alpha) and alpha >= 0.0):
        raise DomainError(f'alpha must be >= 0, got {alpha}')
    values = as_real_grid(f)
    gain = as_real_grid(g)
    if values.shape != gain.shape:
        raise DomainError(
            f'grid {values.shape} and gain {gain.shape} differ in shape'
        )
    if alpha == 0.0:
        return values.copy()
    return values + alpha * (gain * values)
