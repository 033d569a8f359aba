import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.exceptions import IoError, ParseError, SchemaError

from .forms import AnnotationRecordForm, ImageRecordForm, describe_errors
from .grids import Detection, InstanceAnnotation
from .netpbm import read_mask
from .rle import decode_rle, encode_rle

logger = logging.getLogger(__name__)

Record = Union[InstanceAnnotation, Detection]
ImageRecords = Tuple[int, List[Record]]


@dataclass(frozen=True)
class ImageInfo:
    id: int
    width: int
    height: int


def _load_json(path: Union[str, os.PathLike]):
    try:
        with open(path, 'r', encoding='utf-8') as stream:
            text = stream.read()
    except OSError as exc:
        raise IoError(f'cannot read {path}: {exc.strerror or exc}') from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f'{path}: {exc.msg}', offset=exc.pos) from exc


def _parse_images(payload) -> Dict[int, ImageInfo]:
    images = {}
    for index, raw in enumerate(payload):
        if not isinstance(raw, dict):
            raise SchemaError(f'images[{index}] must be an object')
        form = ImageRecordForm(raw)
        if not form.is_valid():
            raise SchemaError(f'images[{index}]: {describe_errors(form)}')
        info = ImageInfo(**form.cleaned_data)
        if info.id in images:
            raise SchemaError(f'images[{index}]: duplicate id {info.id}')
        images[info.id] = info
    return images


def _mask_for(raw: dict, cleaned: dict, image: ImageInfo, base_dir: str,
              index: int):
    if 'rle' in raw:
        return decode_rle(cleaned['rle'] or [], image.height, image.width)
    if 'mask_file' in raw:
        mask = read_mask(os.path.join(base_dir, cleaned['mask_file']))
        if mask.shape != (image.height, image.width):
            raise SchemaError(
                f'annotations[{index}]: mask is {mask.width}x{mask.height}, '
                f'image is {image.width}x{image.height}'
            )
        return mask
    raise ParseError(f'annotations[{index}]: unknown mask encoding')


def load_annotations(path: Union[str, os.PathLike],
                     predictions: Optional[bool] = None
                     ) -> List[ImageRecords]:
    """Читает JSON аннотаций.

    predictions=None определяет вид файла по наличию поля score;
    в файле предсказаний score обязателен у каждой записи.
    """
    payload = _load_json(path)
    if not isinstance(payload, dict):
        raise SchemaError(f'{path}: top level must be an object')
    raw_images = payload.get('images', [])
    raw_annotations = payload.get('annotations', [])
    if not isinstance(raw_images, list) or not isinstance(
            raw_annotations, list):
        raise SchemaError(f'{path}: images and annotations must be lists')
    images = _parse_images(raw_images)
    if predictions is None:
        predictions = any(
            isinstance(raw, dict) and 'score' in raw
            for raw in raw_annotations
        )
    base_dir = os.path.dirname(os.path.abspath(path))
    grouped: Dict[int, List[Record]] = {image_id: [] for image_id in images}
    for index, raw in enumerate(raw_annotations):
        if not isinstance(raw, dict):
            raise SchemaError(f'annotations[{index}] must be an object')
        if isinstance(raw.get('rle'), str):
            raise ParseError(
                f'annotations[{index}]: compressed RLE strings '
                'are not supported'
            )
        form = AnnotationRecordForm(raw)
        if not form.is_valid():
            raise SchemaError(
                f'annotations[{index}]: {describe_errors(form)}'
            )
        cleaned = form.cleaned_data
        image = images.get(cleaned['image_id'])
        if image is None:
            raise SchemaError(
                f'annotations[{index}]: unknown image_id '
                f'{cleaned["image_id"]}'
            )
        mask = _mask_for(raw, cleaned, image, base_dir, index)
        if predictions:
            if cleaned['score'] is None:
                raise SchemaError(
                    f'annotations[{index}]: prediction without score'
                )
            record = Detection(cleaned['category_id'], cleaned['score'], mask)
        else:
            record = InstanceAnnotation(cleaned['category_id'], mask)
        grouped[image.id].append(record)
    logger.debug('loaded %d records over %d images from %s',
                 len(raw_annotations), len(images), path)
    return [(image_id, items) for image_id, items in grouped.items() if items]


def dump_annotations(path: Union[str, os.PathLike],
                     images: Sequence[ImageInfo],
                     records: Sequence[ImageRecords]) -> None:
    """Пишет JSON аннотаций с масками в RLE."""
    annotations = []
    for image_id, items in records:
        for item in items:
            entry = {
                'image_id': image_id,
                'category_id': int(item.category_id),
                'rle': encode_rle(item.mask),
            }
            if isinstance(item, Detection):
                entry['score'] = float(item.score)
            annotations.append(entry)
    payload = {
        'images': [
            {'id': info.id, 'width': info.width, 'height': info.height}
            for info in images
        ],
        'annotations': annotations,
    }
    try:
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump(payload, stream, indent=2)
    except OSError as exc:
        raise IoError(f'cannot write {path}: {exc.strerror or exc}') from exc
