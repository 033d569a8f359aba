import logging
import os

from core.exceptions import IoError
from frequency.fan import fan_apply, fan_gain
from mask_io.netpbm import GRID_KINDS, read_grid, read_pfm, write_grid

from ...base import ToolkitCommand
from ...config import ensure_dir, parse_fan, parse_workers

logger = logging.getLogger(__name__)


class Command(ToolkitCommand):
    help = 'Карта усиления высоких частот и отфильтрованная сетка в PFM.'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True)
        parser.add_argument('--input-kind', default='netpbm_gray',
                            choices=GRID_KINDS)
        parser.add_argument('--rho0', default=None)
        parser.add_argument('--sharpness', default=None)
        parser.add_argument('--alpha', default=None)
        parser.add_argument('--stem', default='fan')
        parser.add_argument('--out-dir', required=True)
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        cfg = parse_fan(options['rho0'], options['sharpness'],
                        options['alpha'])
        workers = parse_workers(options['threads'])
        out_dir = options['out_dir']
        if os.path.exists(out_dir) and not os.path.isdir(out_dir):
            raise IoError(f'{out_dir} exists and is not a directory')
        if options['input_kind'] == 'pfm_float':
            values = read_pfm(options['input'])
        else:
            values = read_grid(options['input'], 'netpbm_gray').values
        gain = fan_gain(values, cfg, workers)
        filtered = fan_apply(values, gain, cfg.alpha)

        ensure_dir(out_dir)
        stem = options['stem']
        files = [os.path.join(out_dir, f'{stem}_gain.pfm'),
                 os.path.join(out_dir, f'{stem}_filtered.pfm')]
        for name, grid in zip(files, (gain, filtered)):
            write_grid(grid, name, 'pfm_float')
            logger.info('wrote %s', name)
        self.stdout.write('\n'.join(files))
