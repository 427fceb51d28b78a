import atexit
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from strif import AtomicVar

T = TypeVar("T")
R = TypeVar("R")

_executor: AtomicVar[tuple[int, ThreadPoolExecutor] | None] = AtomicVar(None)


def get_executor(workers: int) -> ThreadPoolExecutor:
    """
    Simple global, lazily initialized thread pool. Asking for a different size replaces it.
    """
    with _executor.lock:
        current = _executor.value
        if current is not None and current[0] == workers:
            return current[1]
        if current is not None:
            current[1].shutdown(wait=True)
        pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="morseig")
        _executor.set((workers, pool))
        return pool


def shutdown_executor() -> None:
    """
    Idempotent shutdown of the global pool.
    """
    with _executor.lock:
        current = _executor.value
        if current is not None:
            current[1].shutdown(wait=True)
            _executor.set(None)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """
    `list(map(fn, items))`, on the pool when `workers > 1`. Results keep input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    return list(get_executor(workers).map(fn, items))


atexit.register(shutdown_executor)


## Tests


def test_ordered_map():
    assert ordered_map(lambda v: v * v, range(10), workers=3) == [v * v for v in range(10)]
    assert ordered_map(str, [], workers=4) == []
