import logging
import statistics

import numpy as np
from django.conf import settings

from core.exceptions import UsageError
from core.parallel import timed
from mask_io.grids import BinaryMask
from pgm_core.mixture import pgm_exact, pgm_fft, pgm_separable

from ...base import ToolkitCommand
from ...config import (parse_float, parse_int, parse_paths, parse_size,
                       parse_workers)

logger = logging.getLogger(__name__)

MIN_REPEATS = 5
PROBE_SIDE = 32


def synthetic_mask(width: int, height: int, seed: int,
                   density: float) -> BinaryMask:
    rng = np.random.default_rng(seed)
    return BinaryMask(rng.random((height, width)) < density)


def run_path(path: str, mask: BinaryMask, lam: float, workers: int):
    if path == 'exact':
        return pgm_exact(mask, lam)
    if path == 'separable':
        return pgm_separable(mask, lam)
    return pgm_fft(mask, lam, workers=workers)


def max_relative_deviation(maps: dict, reference: str) -> float:
    """max|a - ref| / max|ref| по всем путям, кроме эталонного."""
    base = maps[reference].values
    peak = np.abs(base).max()
    deviation = 0.0
    for name, heatmap in maps.items():
        if name == reference:
            continue
        diff = np.abs(heatmap.values - base).max()
        deviation = max(deviation, diff / peak if peak > 0 else diff)
    return float(deviation)


def extrapolate_exact(lam: float, width: int, height: int, seed: int,
                      density: float) -> float:
    """Время exact на 32x32, пересчитанное квадратично по числу пикселей."""
    probe = synthetic_mask(PROBE_SIDE, PROBE_SIDE, seed, density)
    _, seconds = timed(lambda: pgm_exact(probe, lam))
    scale = (width * height) / (PROBE_SIDE * PROBE_SIDE)
    return seconds * scale ** 2


class Command(ToolkitCommand):
    help = ('Замер путей exact, separable и fft на случайной маске; '
            'медиана времени и расхождение между путями.')

    def add_arguments(self, parser):
        parser.add_argument('--size', default=None,
                            help='WxH, по умолчанию 640x480.')
        parser.add_argument('--lambda', dest='lam', default='10')
        parser.add_argument('--paths', default='separable,fft')
        parser.add_argument('--repeats', default=None)
        parser.add_argument('--seed', default=None)
        parser.add_argument('--density', default='0.3')
        parser.add_argument(
            '--force', action='store_true',
            help='Запускать exact и выше BENCH_EXACT_PIXEL_BUDGET.'
        )
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        size = options['size']
        width, height = parse_size(
            settings.BENCH_DEFAULT_SIZE if size is None else size
        )
        lam = parse_float(options['lam'], '--lambda')
        if lam <= 0:
            raise UsageError(f'--lambda: must be positive, got {lam:g}')
        paths = parse_paths(options['paths'])
        repeats = parse_int(
            options['repeats'] or settings.BENCH_REPEATS, '--repeats',
            minimum=MIN_REPEATS,
        )
        seed = parse_int(options['seed'] or settings.BENCH_SEED, '--seed',
                         minimum=0)
        density = parse_float(options['density'], '--density')
        if not 0.0 <= density <= 1.0:
            raise UsageError(f'--density: must lie in [0, 1], got {density}')
        workers = parse_workers(options['threads'])

        refused = (
            'exact' in paths and not options['force']
            and width * height > settings.BENCH_EXACT_PIXEL_BUDGET
        )
        if refused:
            logger.warning(
                'exact path refused at %dx%d (budget %d pixels), '
                'use --force to run it', width, height,
                settings.BENCH_EXACT_PIXEL_BUDGET,
            )
            paths = tuple(path for path in paths if path != 'exact')

        mask = synthetic_mask(width, height, seed, density)
        report = {
            'seed': seed,
            'size': [width, height],
            'lambda': lam,
            'repeats': repeats,
            'threads': workers,
            'paths': {},
            'exact_refused': refused,
        }
        maps = {}
        for path in paths:
            times = []
            for _ in range(repeats):
                maps[path], seconds = timed(
                    lambda: run_path(path, mask, lam, workers)
                )
                times.append(seconds)
            report['paths'][path] = {
                'median_seconds': statistics.median(times),
                'seconds': times,
            }
            logger.info('%s: median %.6f s over %d runs',
                        path, statistics.median(times), repeats)
        if maps:
            reference = 'exact' if 'exact' in maps else next(iter(maps))
            report['reference'] = reference
            report['max_relative_deviation'] = max_relative_deviation(
                maps, reference)
        if 'exact' not in maps:
            report['exact_extrapolated_seconds'] = extrapolate_exact(
                lam, width, height, seed, density)
        self.write_json(report)
