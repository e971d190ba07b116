#!/usr/bin/env python
# encoding: utf-8

"""
@Author:              Edoardo Altamura
@Year:                2026
@Email:               edoardo.altamura@outlook.com
@Copyright:           Copyright (c) 2026 Edoardo Altamura
@Last Modified by:    Edoardo Altamura
@Latest release:      18 Oct 2026
@Project:             Underwater image enhancement (ADR, desk-scale)

Released under the MIT License. See the LICENSE file in the project root.
"""
from joblib import Parallel, delayed, cpu_count
from typing import Callable, Any, Iterable, List
from functools import wraps
from timeit import default_timer as timer


def measure(func: Callable) -> Callable:
    """
    Measure and display the execution time of a function.

    This decorator function measures the execution time of the wrapped function, displays the elapsed time in
    seconds and passes the return value through.

    :param func: The function to be measured.
    :return: Decorated function that measures and displays execution time.

    Example usage:
        ```python
        @measure
        def train(config):
            ...

        history = train(config)
        ```
    """

    @wraps(func)
    def inner(*args, **kwargs) -> Any:
        print(f"\N{STOPWATCH} | Calling {func.__name__}()")
        start = timer()

        # The function to be executed
        result = func(*args, **kwargs)

        elapsed_sec = timer() - start
        print(f"\N{STOPWATCH} | Done: {func.__name__}() took {elapsed_sec:.4f} sec")
        return result

    return inner


class Stopwatch:
    """
    Wall-clock timer in milliseconds. A frozen stopwatch always reads 0, which keeps run logs byte-identical
    in strict deterministic mode.

    Example usage:
        ```python
        with Stopwatch() as watch:
            step()
        watch.ms
        ```
    """

    def __init__(self, frozen: bool = False) -> None:
        self.frozen = frozen
        self.ms = 0.0
        self._start = 0.0

    def __enter__(self) -> 'Stopwatch':
        self._start = timer()
        return self

    def __exit__(self, *exc) -> None:
        self.ms = 0.0 if self.frozen else (timer() - self._start) * 1e3


def parallel_map(func: Callable, items: Iterable, n_jobs: int = 1) -> List[Any]:
    """
    Apply ``func`` to every item with joblib, keeping the input order.

    ``n_jobs = 1`` runs serially in the calling process; ``-1`` uses every core.

    :param func: Function of one item.
    :param items: Work items.
    :param n_jobs: Worker count.
    :return: Results in input order.
    """
    items = list(items)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    n_jobs = cpu_count() if n_jobs < 0 else n_jobs
    return Parallel(n_jobs=min(n_jobs, len(items)))(delayed(func)(item) for item in items)
