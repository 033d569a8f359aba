import logging

from core.exceptions import UsageError
from losses.terms import (bce_pixel, bce_scalar, cross_entropy, dice_loss,
                          gh_loss, total_loss)
from mask_io.netpbm import read_mask, read_pfm
from pgm_core.stacks import multiscale_stack

from ...base import ToolkitCommand
from ...config import (RunConfig, parse_float, parse_floats, parse_int,
                       parse_ints)

logger = logging.getLogger(__name__)


class Command(ToolkitCommand):
    help = ('Слагаемые функции потерь и их взвешенная сумма в JSON. '
            'Цели L_gh строятся из эталонной маски.')

    def add_arguments(self, parser):
        parser.add_argument('--pred-mask', required=True,
                            help='PFM с вероятностями маски.')
        parser.add_argument('--gt-mask', required=True,
                            help='Эталонная маска P5.')
        parser.add_argument('--pred-heatmaps', required=True,
                            help='PFM предсказанных карт через запятую.')
        parser.add_argument('--lambdas', default=None)
        parser.add_argument('--strides', default=None,
                            help='Шаг уменьшения цели для каждой карты.')
        parser.add_argument('--path', default='separable')
        parser.add_argument('--score', default='1.0',
                            help='Предсказанная объектность.')
        parser.add_argument('--obj-label', default='1')
        parser.add_argument('--logits', required=True,
                            help='Логиты классов через запятую.')
        parser.add_argument('--class-label', required=True)
        parser.add_argument('--weights', default=None,
                            help='Пять весов или пары term=value.')
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        options = dict(options, normalize='max_one')
        heatmap_files = [item.strip()
                         for item in options['pred_heatmaps'].split(',')]
        cfg = RunConfig.from_options(
            'loss', options,
            inputs=(options['pred_mask'], options['gt_mask'],
                    *heatmap_files),
        )
        if len(heatmap_files) != len(cfg.lambdas):
            raise UsageError(
                f'{len(heatmap_files)} predicted heatmaps for '
                f'{len(cfg.lambdas)} lambdas'
            )
        if options['strides'] is None:
            strides = (1,) * len(cfg.lambdas)
        else:
            strides = parse_ints(options['strides'], '--strides')
        if len(strides) != len(cfg.lambdas):
            raise UsageError('--strides: one stride per lambda is required')
        score = parse_float(options['score'], '--score')
        obj_label = parse_int(options['obj_label'], '--obj-label', minimum=0)
        if obj_label > 1:
            raise UsageError('--obj-label: expected 0 or 1')
        logits = parse_floats(options['logits'], '--logits')
        class_label = parse_int(options['class_label'], '--class-label',
                                minimum=0)

        pred_mask = read_pfm(cfg.inputs[0])
        gt_mask = read_mask(cfg.inputs[1])
        pred_maps = [read_pfm(name) for name in heatmap_files]
        target = multiscale_stack(gt_mask, cfg.lambdas, cfg.path,
                                  'max_one', cfg.workers)
        parts = {
            'cls': cross_entropy(logits, class_label),
            'obj': bce_scalar(score, obj_label),
            'mask': bce_pixel(pred_mask, gt_mask),
            'dice': dice_loss(pred_mask, gt_mask),
            'gh': gh_loss(pred_maps, target, strides),
        }
        breakdown = total_loss(parts, cfg.weights)
        logger.info('total loss %.6g', breakdown.total)
        self.write_json(breakdown.to_dict())
