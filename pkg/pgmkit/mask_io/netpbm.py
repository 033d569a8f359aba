"""Чтение и запись сеток в форматах Netpbm P5 и PFM.

P5: заголовок ``P5 <w> <h> <maxval>``, один пробельный символ, затем
отсчёты по 1 байту (maxval < 256) или по 2 байта big-endian.
PFM: ``Pf\\n<w> <h>\\n<scale>\\n`` и float32, строки снизу вверх;
отрицательный scale означает little-endian.
"""
import logging
import os
from typing import List, Tuple, Union

import numpy as np

from core.exceptions import IoError, ParseError, RangeError

from .grids import BinaryMask, LuminanceGrid

logger = logging.getLogger(__name__)

GRID_KINDS = ('netpbm_gray', 'pfm_float')
WRITE_KINDS = ('netpbm_gray16', 'pfm_float')

WHITESPACE = b' \t\n\r\v\f'
GRAY16_MAX = 65535


def _read_bytes(path: Union[str, os.PathLike]) -> bytes:
    try:
        with open(path, 'rb') as stream:
            return stream.read()
    except OSError as exc:
        raise IoError(f'cannot read {path}: {exc.strerror or exc}') from exc


def _write_bytes(path: Union[str, os.PathLike], payload: bytes) -> None:
    try:
        with open(path, 'wb') as stream:
            stream.write(payload)
    except OSError as exc:
        raise IoError(f'cannot write {path}: {exc.strerror or exc}') from exc
    logger.debug('wrote %d bytes to %s', len(payload), path)


def _header_tokens(data: bytes, magic: bytes, count: int,
                   comments: bool) -> Tuple[List[Tuple[bytes, int]], int]:
    """Токены заголовка после magic со смещениями и начало данных."""
    if data[:2] != magic:
        raise ParseError(f'missing {magic.decode()} magic number', offset=0)
    if len(data) < 3 or data[2] not in WHITESPACE:
        raise ParseError('magic number must be followed by whitespace', 2)
    tokens = []
    pos = 2
    while len(tokens) < count:
        while pos < len(data) and data[pos] in WHITESPACE:
            pos += 1
        if comments and pos < len(data) and data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] not in b'\r\n':
                pos += 1
            continue
        if pos >= len(data):
            raise ParseError('truncated header', offset=pos)
        start = pos
        while pos < len(data) and data[pos] not in WHITESPACE:
            pos += 1
        tokens.append((data[start:pos], start))
    # ровно один пробельный символ отделяет заголовок от данных
    if pos >= len(data) or data[pos] not in WHITESPACE:
        raise ParseError('header must end with a whitespace byte', offset=pos)
    return tokens, pos + 1


def _positive_int(token: Tuple[bytes, int], what: str) -> int:
    text, offset = token
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f'{what} is not an integer: {text!r}', offset)
    if value <= 0:
        raise ParseError(f'{what} must be positive, got {value}', offset)
    return value


def parse_p5(data: bytes) -> Tuple[np.ndarray, int]:
    """Отсчёты P5 как целые и maxval."""
    tokens, start = _header_tokens(data, b'P5', 3, comments=True)
    width = _positive_int(tokens[0], 'width')
    height = _positive_int(tokens[1], 'height')
    maxval = _positive_int(tokens[2], 'maxval')
    if maxval > GRAY16_MAX:
        raise ParseError(f'maxval {maxval} exceeds 65535', tokens[2][1])
    dtype = np.dtype('u1') if maxval < 256 else np.dtype('>u2')
    expected = width * height * dtype.itemsize
    payload = data[start:start + expected]
    if len(payload) < expected:
        raise ParseError(
            f'expected {expected} sample bytes, found {len(payload)}',
            offset=start + len(payload)
        )
    samples = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    if samples.max(initial=0) > maxval:
        raise ParseError('sample exceeds maxval', offset=start)
    return samples.astype(np.int64), maxval


def parse_pfm(data: bytes) -> np.ndarray:
    """Значения PFM как float64, строки сверху вниз."""
    tokens, start = _header_tokens(data, b'Pf', 3, comments=False)
    width = _positive_int(tokens[0], 'width')
    height = _positive_int(tokens[1], 'height')
    text, offset = tokens[2]
    try:
        scale = float(text)
    except ValueError:
        raise ParseError(f'scale is not a number: {text!r}', offset)
    if scale == 0.0 or not np.isfinite(scale):
        raise ParseError('scale must be a non-zero finite number', offset)
    dtype = np.dtype('<f4') if scale < 0 else np.dtype('>f4')
    expected = width * height * 4
    payload = data[start:start + expected]
    if len(payload) < expected:
        raise ParseError(
            f'expected {expected} sample bytes, found {len(payload)}',
            offset=start + len(payload)
        )
    values = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return np.flipud(values).astype(np.float64)


def read_pfm(path: Union[str, os.PathLike]) -> np.ndarray:
    """Вещественная сетка из PFM без ограничения диапазона."""
    values = parse_pfm(_read_bytes(path))
    if not np.all(np.isfinite(values)):
        raise RangeError(f'{path}: PFM contains non-finite values')
    return values


def read_grid(path: Union[str, os.PathLike],
              kind: str = 'netpbm_gray') -> LuminanceGrid:
    """Читает сетку яркостей из P5 или PFM."""
    if kind == 'netpbm_gray':
        samples, maxval = parse_p5(_read_bytes(path))
        grid = LuminanceGrid(samples / maxval)
    elif kind == 'pfm_float':
        values = parse_pfm(_read_bytes(path))
        if not np.all(np.isfinite(values)):
            raise RangeError(f'{path}: PFM contains non-finite values')
        grid = LuminanceGrid(values)
    else:
        raise ParseError(f'unknown grid kind {kind!r}')
    logger.debug('read %s grid %dx%d from %s',
                 kind, grid.width, grid.height, path)
    return grid


def _as_values(grid) -> np.ndarray:
    values = getattr(grid, 'values', grid)
    return np.asarray(values, dtype=np.float64)


def encode_gray16(values: np.ndarray) -> bytes:
    if not np.all(np.isfinite(values)):
        raise RangeError('cannot store non-finite values as gray16')
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise RangeError(
            'gray16 output needs values in [0, 1]; normalize first'
        )
    height, width = values.shape
    samples = np.rint(values * GRAY16_MAX).astype('>u2')
    header = b'P5\n%d %d\n%d\n' % (width, height, GRAY16_MAX)
    return header + samples.tobytes()


def encode_pfm(values: np.ndarray) -> bytes:
    height, width = values.shape
    header = b'Pf\n%d %d\n-1.0\n' % (width, height)
    return header + np.flipud(values).astype('<f4').tobytes()


def write_grid(grid, path: Union[str, os.PathLike],
               kind: str = 'pfm_float') -> None:
    """Пишет Heatmap, LuminanceGrid или массив в gray16 или PFM."""
    values = _as_values(grid)
    if values.ndim != 2:
        raise RangeError(f'grid must be two-dimensional, got {values.shape}')
    if kind == 'netpbm_gray16':
        payload = encode_gray16(values)
    elif kind == 'pfm_float':
        payload = encode_pfm(values)
    else:
        raise ParseError(f'unknown output kind {kind!r}')
    _write_bytes(path, payload)


def read_mask(path: Union[str, os.PathLike]) -> BinaryMask:
    """Бинарная маска из P5: ненулевой отсчёт означает передний план."""
    samples, _ = parse_p5(_read_bytes(path))
    return BinaryMask(samples > 0)


def write_mask(mask: BinaryMask, path: Union[str, os.PathLike]) -> None:
    """Маска в P5 с maxval 255 (0 и 255)."""
    header = b'P5\n%d %d\n255\n' % (mask.width, mask.height)
    samples = np.where(mask.bits, 255, 0).astype(np.uint8)
    _write_bytes(path, header + samples.tobytes())
