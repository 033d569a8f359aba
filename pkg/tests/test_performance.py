import numpy as np
import pytest

from cli.management.commands.bench import extrapolate_exact, synthetic_mask
from core.parallel import timed
from pgm_core.mixture import pgm_fft, pgm_separable

from .utils import peak_relative

WIDTH, HEIGHT = 640, 480
LAMBDA = 10.0


@pytest.fixture
def frame_mask():
    return synthetic_mask(WIDTH, HEIGHT, seed=20240601, density=0.3)


def best_of(func, repeats=3):
    results = [timed(func) for _ in range(repeats)]
    return results[0][0], min(seconds for _, seconds in results)


class TestPerformance:

    def test_fast_paths_within_a_second(self, frame_mask):
        separable, separable_seconds = best_of(
            lambda: pgm_separable(frame_mask, LAMBDA))
        fft, fft_seconds = best_of(
            lambda: pgm_fft(frame_mask, LAMBDA, workers=1))
        assert separable_seconds < 1.0, (
            f'Раздельная свёртка 640x480 заняла {separable_seconds:.3f} с'
        )
        assert fft_seconds < 1.0, (
            f'БПФ-свёртка 640x480 заняла {fft_seconds:.3f} с'
        )
        assert peak_relative(fft.values, separable.values) < 1e-4

    def test_exact_extrapolation(self, frame_mask):
        _, separable_seconds = best_of(
            lambda: pgm_separable(frame_mask, LAMBDA))
        exact_seconds = extrapolate_exact(LAMBDA, WIDTH, HEIGHT,
                                          seed=20240601, density=0.3)
        assert exact_seconds >= 1e3 * separable_seconds, (
            'Прямая сумма на 640x480 должна быть хотя бы в 1000 раз медленнее'
        )
        assert np.isfinite(exact_seconds)
