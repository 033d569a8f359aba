"""Разбор значений командной строки в RunConfig.

Все значения проверяются до начала вычислений; ошибка разбора:
UsageError с кодом выхода 2.
"""
import math
import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

from django.conf import settings

from core.exceptions import DomainError, IoError, UsageError
from core.parallel import resolve_workers
from frequency.fan import FanConfig
from losses.terms import TERMS, LossWeights
from pgm_core.heatmaps import NORMALIZATIONS
from pgm_core.mixture import PATHS
from pgm_core.stacks import check_lambdas

NORMALIZATION_ALIASES = {'max': 'max_one'}


def _items(text: str, what: str) -> List[str]:
    items = [item.strip() for item in str(text).split(',')]
    if not all(items):
        raise UsageError(f'{what}: empty item in {text!r}')
    return items


def parse_float(text, what: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise UsageError(f'{what}: {text!r} is not a number') from None
    if not math.isfinite(value):
        raise UsageError(f'{what}: {text!r} is not finite')
    return value


def parse_int(text, what: str, minimum: int = 1) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise UsageError(f'{what}: {text!r} is not an integer') from None
    if value < minimum:
        raise UsageError(f'{what}: must be >= {minimum}, got {value}')
    return value


def parse_lambdas(text) -> Tuple[float, ...]:
    """'1,5,10,20' -> (1.0, 5.0, 10.0, 20.0)."""
    if isinstance(text, (list, tuple)):
        values = [parse_float(item, '--lambdas') for item in text]
    else:
        values = [parse_float(item, '--lambdas')
                  for item in _items(text, '--lambdas')]
    try:
        return tuple(check_lambdas(values))
    except DomainError as exc:
        raise UsageError(f'--lambdas: {exc}') from exc


def parse_ints(text, what: str) -> Tuple[int, ...]:
    return tuple(parse_int(item, what) for item in _items(text, what))


def parse_floats(text, what: str) -> Tuple[float, ...]:
    return tuple(parse_float(item, what) for item in _items(text, what))


def parse_size(text) -> Tuple[int, int]:
    """'WxH' -> (W, H), обе стороны положительны."""
    if isinstance(text, (list, tuple)):
        width, height = text
    else:
        parts = str(text).lower().split('x')
        if len(parts) != 2:
            raise UsageError(f'--size: expected WxH, got {text!r}')
        width, height = parts
    return parse_int(width, '--size'), parse_int(height, '--size')


def parse_path(text: str) -> str:
    if text not in PATHS:
        raise UsageError(f'--path: expected one of {PATHS}, got {text!r}')
    return text


def parse_paths(text: str) -> Tuple[str, ...]:
    paths = tuple(parse_path(item) for item in _items(text, '--paths'))
    if len(set(paths)) != len(paths):
        raise UsageError(f'--paths: repeated path in {text!r}')
    return paths


def parse_normalization(text: str) -> str:
    mode = NORMALIZATION_ALIASES.get(text, text)
    if mode not in NORMALIZATIONS:
        raise UsageError(
            f'--normalize: expected one of raw, max, max_one; got {text!r}'
        )
    return mode


def parse_weights(text: Optional[str]) -> LossWeights:
    """'0.2,0.2,0.2,0.2,0.2' или 'cls=0.5,gh=1'; пропуски из настроек."""
    if text is None:
        return LossWeights.from_settings()
    items = _items(text, '--weights')
    try:
        if all('=' in item for item in items):
            values = dict(settings.LOSS_WEIGHTS)
            for item in items:
                term, value = item.split('=', 1)
                if term not in TERMS:
                    raise UsageError(f'--weights: unknown term {term!r}')
                values[term] = parse_float(value, '--weights')
            return LossWeights(**{f'w_{term}': float(values[term])
                                  for term in TERMS})
        if len(items) != len(TERMS):
            raise UsageError(
                f'--weights: expected {len(TERMS)} values or term=value '
                'pairs'
            )
        return LossWeights(*(parse_float(item, '--weights')
                             for item in items))
    except DomainError as exc:
        raise UsageError(f'--weights: {exc}') from exc


def parse_fan(rho0=None, sharpness=None, alpha=None) -> FanConfig:
    try:
        return FanConfig.from_settings(
            rho0=None if rho0 is None else parse_float(rho0, '--rho0'),
            sharpness=(None if sharpness is None
                       else parse_float(sharpness, '--sharpness')),
            alpha=None if alpha is None else parse_float(alpha, '--alpha'),
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def parse_workers(text) -> int:
    if text is None:
        return resolve_workers()
    return parse_int(text, '--threads')


def ensure_dir(path: str) -> str:
    """Создаёт каталог вывода; вызывать только после всех проверок."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoError(f'cannot create {path}: {exc.strerror or exc}') from exc
    return path


@dataclass(frozen=True)
class RunConfig:
    """Проверенные параметры одного запуска подкоманды."""

    subcommand: str
    inputs: Tuple[str, ...] = ()
    output: Optional[str] = None
    lambdas: Tuple[float, ...] = ()
    path: str = 'separable'
    normalization: str = 'max_one'
    fan: Optional[FanConfig] = None
    weights: Optional[LossWeights] = None
    workers: int = 1

    @classmethod
    def from_options(cls, subcommand: str, options: dict,
                     inputs: Tuple[str, ...] = (),
                     output: Optional[str] = None) -> 'RunConfig':
        """Общие флаги: --lambdas, --path, --normalize, --threads."""
        lambdas = options.get('lambdas')
        normalization = options.get('normalize')
        return cls(
            subcommand=subcommand,
            inputs=tuple(inputs),
            output=output,
            lambdas=parse_lambdas(
                settings.PGM_DEFAULT_LAMBDAS if lambdas is None else lambdas
            ),
            path=parse_path(options.get('path') or 'separable'),
            normalization=parse_normalization(
                normalization or settings.PGM_DEFAULT_NORMALIZATION
            ),
            fan=parse_fan(options.get('rho0'), options.get('sharpness'),
                          options.get('alpha')),
            weights=parse_weights(options.get('weights')),
            workers=parse_workers(options.get('threads')),
        )
