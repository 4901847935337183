"""
Thread-pool and FFT worker configuration.
"""

import os
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

_executor: Optional[ThreadPoolExecutor] = None
_executor_workers = 0
_executor_lock = threading.Lock()
_leases: Dict[ThreadPoolExecutor, int] = {}
_retired: Set[ThreadPoolExecutor] = set()


def worker_count() -> int:
    """
    Number of worker threads for FFTs and trace sampling.

    Reads ``DIRAC_FRONT['THREADS']`` from Django settings when they are
    configured, otherwise the ``DIRAC_FRONT_THREADS`` environment variable.
    """
    try:
        from django.conf import settings
        if settings.configured or os.environ.get('DJANGO_SETTINGS_MODULE'):
            return max(1, int(settings.DIRAC_FRONT.get('THREADS', 1)))
    except (ImportError, AttributeError):
        pass
    except Exception as e:
        logger.warning(f"Falling back to environment thread count: {e}")
    try:
        return max(1, int(os.environ.get('DIRAC_FRONT_THREADS', os.cpu_count() or 1)))
    except ValueError:
        logger.warning("DIRAC_FRONT_THREADS is not an integer; using 1 thread")
        return 1


def _current_pool(workers: int) -> ThreadPoolExecutor:
    """Shared pool for ``workers`` threads; the caller holds the lock."""
    global _executor, _executor_workers
    if _executor is None or _executor_workers != workers:
        if _executor is not None:
            _retired.add(_executor)
        _executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix='dirac-front')
        _executor_workers = workers
    return _executor


def _release(pool: ThreadPoolExecutor) -> bool:
    """Drop one lease; True when the pool is retired and nobody holds it any more."""
    _leases[pool] -= 1
    if _leases[pool] > 0:
        return False
    del _leases[pool]
    if pool in _retired:
        _retired.discard(pool)
        return True
    return False


@contextmanager
def leased_executor() -> Iterator[ThreadPoolExecutor]:
    """
    Lease the shared executor, resized if the worker count changed.

    A pool replaced by a resize keeps accepting work from its current
    leaseholders and is shut down when the last lease ends.
    """
    workers = worker_count()
    with _executor_lock:
        pool = _current_pool(workers)
        _leases[pool] = _leases.get(pool, 0) + 1
        stale = [p for p in _retired if p not in _leases]
        _retired.difference_update(stale)
    for retired in stale:
        retired.shutdown(wait=False)
    try:
        yield pool
    finally:
        with _executor_lock:
            finished = _release(pool)
        if finished:
            logger.debug("Shutting down a resized worker pool")
            pool.shutdown(wait=False)


def ordered_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Apply ``func`` concurrently and return results in input order."""
    items = list(items)
    if len(items) <= 1 or worker_count() == 1:
        return [func(item) for item in items]
    with leased_executor() as pool:
        return list(pool.map(func, items))
