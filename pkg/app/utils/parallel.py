import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from app.config.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Nombre de workers, plafonné par HAZDEP_THREADS"""
    available = os.cpu_count() or 1
    if settings.threads is None:
        return available
    return max(1, min(settings.threads, available))


def map_parallel(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """
    Applique fn à chaque élément, dans l'ordre d'entrée

    Les résultats ne dépendent pas du nombre de workers.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
