import logging
import os

from core.exceptions import UsageError
from mask_io.netpbm import GRID_KINDS, read_grid, write_grid
from pgm_core.stacks import multiscale_stack, tile_stack

from ...base import ToolkitCommand
from ...config import RunConfig, ensure_dir

logger = logging.getLogger(__name__)


class Command(ToolkitCommand):
    help = ('Панель карт по λ в одном gray16 P5: карты рядом, '
            'разделители 2 px.')

    def add_arguments(self, parser):
        parser.add_argument('--mask', required=True)
        parser.add_argument('--input-kind', default='netpbm_gray',
                            choices=GRID_KINDS)
        parser.add_argument('--lambdas', default=None)
        parser.add_argument('--path', default='separable')
        parser.add_argument('--out', required=True,
                            help='Файл панели (.pgm).')
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        options = dict(options, normalize='max_one')
        cfg = RunConfig.from_options('viz', options,
                                     inputs=(options['mask'],),
                                     output=options['out'])
        if os.path.isdir(cfg.output):
            raise UsageError(f'--out: {cfg.output} is a directory')
        grid = read_grid(cfg.inputs[0], options['input_kind'])
        stack = multiscale_stack(grid, cfg.lambdas, cfg.path,
                                 cfg.normalization, cfg.workers)
        panel = tile_stack(stack)
        parent = os.path.dirname(cfg.output)
        if parent:
            ensure_dir(parent)
        write_grid(panel, cfg.output, 'netpbm_gray16')
        logger.info('wrote %s panel %dx%d', cfg.output,
                    panel.shape[1], panel.shape[0])
        self.stdout.write(cfg.output)
