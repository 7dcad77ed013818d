"""Worker-thread control.

All compiled kernels write each output element from exactly one loop
iteration, so results do not depend on the thread count.
``VCSAMPLE_THREADS`` caps the worker count at import time.
"""

from __future__ import annotations

import contextlib
import os

import numba


def max_threads() -> int:
    return numba.config.NUMBA_NUM_THREADS


def set_threads(n: int) -> int:
    n = max(1, min(int(n), max_threads()))
    numba.set_num_threads(n)
    return n


def get_threads() -> int:
    return numba.get_num_threads()


@contextlib.contextmanager
def threads(n: int):
    old = get_threads()
    set_threads(n)
    try:
        yield
    finally:
        numba.set_num_threads(old)


def _configure_from_env():
    value = os.environ.get("VCSAMPLE_THREADS")
    if value:
        set_threads(int(value))


_configure_from_env()
