import json
import logging
import os

from core.exceptions import IoError, UsageError
from core.parallel import map_ordered, timed
from mask_io.netpbm import GRID_KINDS, WRITE_KINDS, read_grid
from pgm_core.heatmaps import HeatmapStack, normalize_heatmap
from pgm_core.mixture import pgm
from pgm_core.stacks import write_stack

from ...base import ToolkitCommand
from ...config import RunConfig, ensure_dir

logger = logging.getLogger(__name__)


def sidecar_payload(cfg: RunConfig, stack: HeatmapStack, files, seconds):
    return {
        'mask': cfg.inputs[0],
        'lambdas': list(stack.lambdas),
        'path': cfg.path,
        'normalization': cfg.normalization,
        'width': stack.maps[0].shape[1],
        'height': stack.maps[0].shape[0],
        'files': [os.path.basename(name) for name in files],
        'seconds': seconds,
    }


class Command(ToolkitCommand):
    help = 'Карты G(I;λ) по маске: один файл на λ и JSON с параметрами.'

    def add_arguments(self, parser):
        parser.add_argument('--mask', required=True,
                            help='Маска или сетка яркости (P5 или PFM).')
        parser.add_argument('--input-kind', default='netpbm_gray',
                            choices=GRID_KINDS)
        parser.add_argument('--lambdas', default=None,
                            help='Список λ через запятую, по возрастанию.')
        parser.add_argument('--path', default='separable',
                            help='exact, separable или fft.')
        parser.add_argument('--normalize', default=None,
                            help='raw, max или max_one.')
        parser.add_argument('--format', default='pfm_float',
                            choices=WRITE_KINDS)
        parser.add_argument('--stem', default='heatmap')
        parser.add_argument('--out-dir', required=True)
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        cfg = RunConfig.from_options(
            'heatmap', options, inputs=(options['mask'],),
            output=options['out_dir'],
        )
        kind = options['format']
        if kind == 'netpbm_gray16' and cfg.normalization == 'raw':
            raise UsageError('gray16 output needs max_one normalization')
        stem = options['stem']
        if not stem or os.sep in stem:
            raise UsageError(f'--stem: invalid file stem {stem!r}')
        if os.path.exists(cfg.output) and not os.path.isdir(cfg.output):
            raise IoError(f'{cfg.output} exists and is not a directory')
        grid = read_grid(cfg.inputs[0], options['input_kind'])

        def build(lam):
            return timed(lambda: normalize_heatmap(
                pgm(grid, lam, cfg.path), cfg.normalization
            ))

        results = map_ordered(build, cfg.lambdas, cfg.workers)
        stack = HeatmapStack(cfg.lambdas, tuple(m for m, _ in results))
        seconds = [round(elapsed, 6) for _, elapsed in results]

        ensure_dir(cfg.output)
        files = write_stack(stack, cfg.output, stem, kind)
        sidecar = os.path.join(cfg.output, f'{stem}.json')
        payload = sidecar_payload(cfg, stack, files, seconds)
        try:
            with open(sidecar, 'w', encoding='utf-8') as stream:
                json.dump(payload, stream, indent=2)
        except OSError as exc:
            raise IoError(
                f'cannot write {sidecar}: {exc.strerror or exc}'
            ) from exc
        for name in files + [sidecar]:
            logger.info('wrote %s', name)
        self.stdout.write('\n'.join(files + [sidecar]))
