"""
Memoization of functions of Hermitian matrices.
"""
from collections import OrderedDict
from typing import Callable
from functools import wraps
import pickle
import threading

import numpy as np

from .doc import doc_category


__all__ = (
    "cache_result",
)


def _freeze(value):
    if isinstance(value, np.ndarray):
        value.setflags(write=False)
    elif isinstance(value, tuple):
        for item in value:
            _freeze(item)


@doc_category("Caching")
def cache_result(max: int = 256):
    """
    Least recently used cache whose keys may contain arrays.

    Arguments are keyed by their pickled form, which covers dtype, shape and contents of
    :class:`numpy.ndarray` arguments. Calls with unpicklable arguments bypass the cache.
    Cached arrays (also inside returned tuples) are made read-only, so results can be
    shared between callers. Lookups and updates hold a per-function lock, so the
    wrapped function can be called from several threads.

    The wrapped function gains ``cache_clear()`` and ``cache_info()``.

    Parameters
    --------------
    max: int
        The maximum number of items inside the cache.
    """
    if max < 1:
        raise ValueError(f"Cache size must be at least 1, got {max}.")

    def _decorator(fnc: Callable):
        entries: OrderedDict = OrderedDict()
        stats = {"hits": 0, "misses": 0}
        lock = threading.Lock()

        @wraps(fnc)
        def wrapper(*args, **kwargs):
            try:
                key = pickle.dumps((args, sorted(kwargs.items())))
            except Exception:
                return fnc(*args, **kwargs)

            with lock:
                if key in entries:
                    stats["hits"] += 1
                    entries.move_to_end(key)
                    return entries[key]

                stats["misses"] += 1

            # Computed outside the lock, concurrent misses of one key may both evaluate
            result = fnc(*args, **kwargs)
            _freeze(result)
            with lock:
                entries[key] = result
                entries.move_to_end(key)
                if len(entries) > max:
                    entries.popitem(last=False)

            return result

        def cache_clear():
            with lock:
                entries.clear()
                stats.update(hits=0, misses=0)

        def cache_info() -> dict:
            with lock:
                return {**stats, "size": len(entries), "max": max}

        wrapper.cache_clear = cache_clear
        wrapper.cache_info = cache_info
        return wrapper

    return _decorator
