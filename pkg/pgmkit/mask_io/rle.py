"""Несжатый RLE в соглашении COCO.

Пиксели обходятся по столбцам (column-major), счётчики чередуются
начиная с фона: [фон, объект, фон, ...].
"""
from typing import List, Sequence

import numpy as np

from core.exceptions import ParseError

from .grids import BinaryMask


def decode_rle(counts: Sequence[int], height: int, width: int) -> BinaryMask:
    """Маска из счётчиков RLE."""
    counts = np.asarray(list(counts), dtype=np.int64)
    if counts.size and counts.min() < 0:
        raise ParseError('RLE counts must be non-negative')
    total = int(counts.sum())
    if total != height * width:
        raise ParseError(
            f'RLE counts sum to {total}, expected {height}x{width}'
            f'={height * width}'
        )
    # нечётные серии: передний план
    labels = np.arange(counts.size) % 2 == 1
    flat = np.repeat(labels, counts)
    return BinaryMask(flat.reshape((height, width), order='F'))


def encode_rle(mask: BinaryMask) -> List[int]:
    """Счётчики RLE для маски, обратное к decode_rle."""
    flat = mask.bits.ravel(order='F')
    if not flat.size:
        return []
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return [int(count) for count in counts]
