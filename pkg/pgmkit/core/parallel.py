import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

from django.conf import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_workers(workers: Optional[int] = None) -> int:
    """Число потоков: явное значение или PGMKIT_WORKERS."""
    if workers is None:
        workers = settings.PGMKIT_WORKERS
    return max(1, int(workers))


def map_ordered(func: Callable[[T], R], items: Iterable[T],
                workers: Optional[int] = None) -> List[R]:
    """Выполняет func над items в пуле потоков.

    Результаты возвращаются в порядке входа, поэтому запись файлов
    вызывающим потоком остаётся детерминированной.
    """
    items = list(items)
    workers = min(resolve_workers(workers), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    logger.debug('dispatching %d items to %d workers', len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def timed(func: Callable[[], R]) -> Tuple[R, float]:
    """Возвращает результат вызова и время выполнения в секундах."""
    started = time.perf_counter()
    result = func()
    return result, time.perf_counter() - started
