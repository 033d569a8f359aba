import csv
import json
import logging
import os

from core.exceptions import IoError, ParseError, SchemaError
from mask_io.annotations import ImageInfo, dump_annotations, load_annotations
from mask_io.netpbm import write_mask
from metrics.evaluation import EvalResult, coco_map, compare_results

from ...base import ToolkitCommand
from ...config import ensure_dir, parse_int, parse_workers

logger = logging.getLogger(__name__)

CSV_THRESHOLDS = (0.5, 0.75)


def load_baseline(path: str) -> EvalResult:
    """EvalResult из JSON, напечатанного ранее командой eval."""
    try:
        with open(path, encoding='utf-8') as stream:
            payload = json.load(stream)
    except OSError as exc:
        raise IoError(f'cannot read {path}: {exc.strerror or exc}') from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f'{path}: {exc.msg}', offset=exc.pos) from exc
    try:
        return EvalResult.from_dict(payload)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaError(f'{path}: not an evaluation result ({exc})') from exc


def export_predictions(dets, export_dir: str) -> None:
    """Маски предсказаний в P5 и их JSON в RLE для внешних инструментов."""
    images = []
    for image_id, items in dets:
        height, width = items[0].mask.shape
        images.append(ImageInfo(image_id, width, height))
        for index, det in enumerate(items):
            write_mask(det.mask, os.path.join(
                export_dir, f'pred_img{image_id}_{index}.pgm'))
    dump_annotations(os.path.join(export_dir, 'predictions.json'),
                     images, dets)
    logger.info('exported %d images to %s', len(images), export_dir)


def curve_filename(category: int, threshold: float) -> str:
    return f'pr_cat{category}_iou{round(threshold * 100):d}.csv'


def write_curve(path: str, curve) -> None:
    try:
        with open(path, 'w', encoding='utf-8', newline='') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(('recall', 'precision'))
            for recall, precision in curve.points:
                writer.writerow((repr(recall), repr(precision)))
    except OSError as exc:
        raise IoError(f'cannot write {path}: {exc.strerror or exc}') from exc


class Command(ToolkitCommand):
    help = 'mAP, AP50, AP75, AP_S/M/L предсказаний относительно эталона.'

    def add_arguments(self, parser):
        parser.add_argument('--predictions', required=True)
        parser.add_argument('--ground-truth', required=True)
        parser.add_argument('--baseline', default=None,
                            help='JSON прошлого запуска eval для сравнения.')
        parser.add_argument('--pr-dir', default=None,
                            help='Каталог для CSV PR-кривых (AP50, AP75).')
        parser.add_argument('--export-dir', default=None,
                            help='Каталог для масок предсказаний (P5) и '
                                 'их JSON в RLE.')
        parser.add_argument('--max-detections', default=None)
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        max_detections = options['max_detections']
        if max_detections is not None:
            max_detections = parse_int(max_detections, '--max-detections')
        workers = parse_workers(options['threads'])
        pr_dir = options['pr_dir']
        export_dir = options['export_dir']
        for target in (pr_dir, export_dir):
            if target and os.path.exists(target) and not os.path.isdir(
                    target):
                raise IoError(f'{target} exists and is not a directory')
        dets = load_annotations(options['predictions'], predictions=True)
        gts = load_annotations(options['ground_truth'], predictions=False)
        baseline = None
        if options['baseline']:
            baseline = load_baseline(options['baseline'])

        result = coco_map(dets, gts, max_detections=max_detections,
                          workers=workers)
        payload = result.to_dict()
        if baseline is not None:
            payload['delta'] = compare_results(result, baseline)
        if pr_dir:
            ensure_dir(pr_dir)
            for category, curves in sorted(result.pr_curves.items()):
                for threshold in CSV_THRESHOLDS:
                    if threshold not in curves:
                        continue
                    name = os.path.join(
                        pr_dir, curve_filename(category, threshold))
                    write_curve(name, curves[threshold])
                    logger.info('wrote %s', name)
        if export_dir:
            ensure_dir(export_dir)
            export_predictions(dets, export_dir)
        self.write_json(payload)
