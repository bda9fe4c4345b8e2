"""Compensated summation over numpy arrays."""

from typing import Iterable, Optional

import numpy as np


class CompensatedSum:
    """
    Running elementwise sum with a Kahan-Babuška carry.

    Works on arrays of any fixed shape, so one accumulator carries the sums
    for a whole grid at once.
    """

    def __init__(self, shape=(), initial: Optional[np.ndarray] = None):
        if initial is not None:
            self.sum = np.array(initial, dtype=float, copy=True)
        else:
            self.sum = np.zeros(shape, dtype=float)
        self.carry = np.zeros_like(self.sum)
        self.count = 0

    def add(self, value) -> None:
        value = np.asarray(value, dtype=float)
        total = self.sum + value
        big = np.abs(self.sum) >= np.abs(value)
        # Whichever operand is smaller lost its low-order bits.
        self.carry += np.where(big, (self.sum - total) + value, (value - total) + self.sum)
        self.sum = total
        self.count += 1

    @property
    def value(self) -> np.ndarray:
        return self.sum + self.carry


def block_sum(values: np.ndarray) -> np.ndarray:
    """Sum over the first axis with numpy's pairwise reduction."""
    v = np.asarray(values, dtype=float)
    if v.shape[0] == 1:
        return v[0].copy()
    # Pairwise summation only applies along a contiguous last axis.
    return np.sum(np.ascontiguousarray(np.moveaxis(v, 0, -1)), axis=-1)


def compensated_sum(values: Iterable) -> np.ndarray:
    acc = None
    for v in values:
        if acc is None:
            acc = CompensatedSum(np.shape(v))
        acc.add(v)
    if acc is None:
        return np.zeros(())
    return acc.value
