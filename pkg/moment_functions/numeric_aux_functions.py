#!/usr/bin/env python3

# auxiliary numeric functions shared by the moment library

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import logging
import math

import numpy as np

T = TypeVar('T')
R = TypeVar('R')


def e(x):
    """
    Additive character e(x) = exp(2 pi i x), the single convention used across
    the package.
    :param x: real number or numpy array
    :return: complex value(s)
    """
    value = np.exp(2j * np.pi * np.asarray(x, dtype=float))
    return complex(value) if value.ndim == 0 else value


def compensated_sum(values: Iterable[complex]) -> complex:
    """
    Sums complex values in the given order with error-free accumulation of the
    real and imaginary parts separately.
    :param values: complex values to sum
    :return: correctly rounded sum of the real parts + i * sum of imaginary parts
    """
    values = list(values)
    return complex(
        math.fsum(v.real for v in values),
        math.fsum(v.imag for v in values)
    )


def ordered_map(
    func: Callable[[T], R],
    items: Iterable[T],
    thread_count: int = 1,
    logger: logging.Logger = logging.getLogger(__name__)
) -> List[R]:
    """
    Maps func over items, concurrently when thread_count > 1. Results always
    come back in input order so that any reduction done afterwards is
    independent of the number of threads.
    :param func: function to apply
    :param items: inputs
    :param thread_count: number of worker threads (>= 1)
    :param logger: logger instance to use for log messages
    :return: list of results in input order
    :raise ValueError when thread_count < 1
    """
    if thread_count < 1:
        raise ValueError('Bad thread count: {}'.format(thread_count))
    items = list(items)
    if thread_count == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f'Mapping {len(items)} items over {thread_count} threads')
    with ThreadPoolExecutor(max_workers=thread_count) as executor:
        return list(executor.map(func, items))


def mod_inverse(a: int, m: int) -> int:
    """
    Inverse of a modulo m.
    :raise ValueError when gcd(a, m) != 1
    """
    return pow(a, -1, m)


def trapezoid_weights(count: int) -> np.ndarray:
    """
    Weights of the composite trapezoid rule with unit step on count nodes.
    """
    weights = np.ones(count)
    weights[0] = weights[-1] = 0.5
    return weights
