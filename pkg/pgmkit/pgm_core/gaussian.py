import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import DomainError


def check_lambda(lam: float) -> float:
    """λ должна быть положительной и конечной."""
    try:
        lam = float(lam)
    except (TypeError, ValueError):
        raise DomainError(f'lambda must be a number, got {lam!r}')
    if not math.isfinite(lam) or lam <= 0.0:
        raise DomainError(f'lambda must be positive and finite, got {lam}')
    return lam


@dataclass(frozen=True)
class GaussianParams:
    amplitude: float
    x0: float
    y0: float
    sigma_x: float
    sigma_y: float

    def __post_init__(self) -> None:
        values = (self.amplitude, self.x0, self.y0,
                  self.sigma_x, self.sigma_y)
        if not all(math.isfinite(value) for value in values):
            raise DomainError('gaussian parameters must be finite')
        if self.sigma_x <= 0 or self.sigma_y <= 0:
            raise DomainError('sigma_x and sigma_y must be positive')
        if self.amplitude < 0:
            raise DomainError('amplitude must be non-negative')


def gaussian2d(x: float, y: float, p: GaussianParams) -> float:
    """A * exp(-(x-x0)^2 / 2sx^2 - (y-y0)^2 / 2sy^2)."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f'point ({x}, {y}) is not finite')
    exponent = (
        (x - p.x0) ** 2 / (2.0 * p.sigma_x ** 2)
        + (y - p.y0) ** 2 / (2.0 * p.sigma_y ** 2)
    )
    return p.amplitude * math.exp(-exponent)


def gaussian_profile(radius: int, lam: float) -> np.ndarray:
    """Ненормированное 1D ядро exp(-d^2 / 2λ^2) для d в [-radius, radius]."""
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-offsets ** 2 / (2.0 * lam ** 2))
