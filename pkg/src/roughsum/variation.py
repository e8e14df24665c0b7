"""Exact variation functionals over integer partitions.

For a path that is linear between integer knots, the supremum over all real
partitions of sum |x(t_k) - x(t_{k-1})|^p (p >= 1) is attained on a partition
made of knots, so an O(N^2) dynamic program over knots is exact. The same
holds for the 1-variation of the area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattice_path import IntervalZ, LatticePath, check_interval

BRUTEFORCE_MAX_LENGTH = 20


@dataclass(frozen=True)
class VariationResult:
    """Supremum of the partition power sum, its p-th root and a maximiser."""

    power_sum: float
    norm: float
    optimal_partition: tuple[int, ...]
    p: float = 2.0

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "power_sum": self.power_sum,
            "norm": self.norm,
            "partition": list(self.optimal_partition),
        }


def _full_interval(path: LatticePath, interval: IntervalZ | None) -> IntervalZ:
    if interval is None:
        if path.N == 0:
            raise ValueError("path has a single knot; no interval to measure")
        return IntervalZ(0, path.N)
    check_interval(path, interval)
    return interval


def _backtrack(pred: np.ndarray, offset: int) -> tuple[int, ...]:
    j = len(pred) - 1
    out = [j]
    while j > 0:
        j = int(pred[j])
        out.append(j)
    return tuple(offset + k for k in reversed(out))


def _result(power_sum: float, p: float, partition) -> VariationResult:
    power_sum = max(float(power_sum), 0.0)
    return VariationResult(power_sum, power_sum ** (1.0 / p), tuple(partition), p)


def p_var_exact(path: LatticePath, p: float, interval: IntervalZ | None = None) -> VariationResult:
    """p-variation of the path on an integer interval by dynamic programming.

    V[j] = max_{i<j} V[i] + |x_j - x_i|^p; ties go to the smallest predecessor.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    interval = _full_interval(path, interval)
    x = np.ascontiguousarray(path.values[interval.a: interval.b + 1])
    V, pred = _kernels.pvar_dp(x, float(p))
    return _result(V[-1], p, _backtrack(pred, interval.a))


def _bruteforce_max(W: np.ndarray) -> tuple[float, tuple[int, ...]]:
    """Maximise sum W[n_{k-1}, n_k] over all chains 0 = n_0 < ... < n_J = n."""
    n = W.shape[0] - 1
    if n == 0:
        return 0.0, (0,)
    inner = n - 1
    masks = np.arange(1 << inner, dtype=np.int64)
    picked = np.ones((masks.size, n + 1), dtype=bool)
    if inner:
        picked[:, 1:n] = (masks[:, None] >> np.arange(inner)) & 1 == 1
    idx = np.where(picked, np.arange(n + 1), -1)
    prev = np.maximum.accumulate(idx, axis=1)
    prev = np.concatenate([np.full((masks.size, 1), -1), prev[:, :-1]], axis=1)
    cols = np.arange(1, n + 1)
    terms = np.where(picked[:, 1:], W[prev[:, 1:].clip(0), cols], 0.0)
    totals = terms.sum(axis=1)
    best = int(np.argmax(totals))
    return float(totals[best]), tuple(int(k) for k in np.flatnonzero(picked[best]))


def p_var_bruteforce(path: LatticePath, p: float, interval: IntervalZ | None = None) -> VariationResult:
    """Exhaustive maximum over all subsets of interior knots (test oracle)."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    interval = _full_interval(path, interval)
    if interval.length > BRUTEFORCE_MAX_LENGTH:
        raise OverflowError(f"brute force limited to length {BRUTEFORCE_MAX_LENGTH}, got {interval.length}")
    x = path.values[interval.a: interval.b + 1]
    W = np.linalg.norm(x[None, :, :] - x[:, None, :], axis=2) ** p
    value, part = _bruteforce_max(W)
    return _result(value, p, (interval.a + k for k in part))


def sup_oscillation(path: LatticePath, interval: IntervalZ | None = None) -> float:
    """max |x_j - x_i| over knots a <= i <= j <= b."""
    interval = _full_interval(path, interval)
    x = np.ascontiguousarray(path.values[interval.a: interval.b + 1])
    return float(_kernels.max_pair_dist(x))


def maximal_block_oscillation(path: LatticePath) -> float:
    """max over 0 <= i <= j <= N of |x_j - x_{i-1}|^2 with x_{-1} = 0.

    For a partial-sum path this is the largest squared block sum
    |sum_{n=i}^{j} c_n u_n|^2.
    """
    return float(_kernels.max_block_sq(np.ascontiguousarray(path.values)))


def table_one_var(table, interval: IntervalZ | None = None) -> VariationResult:
    """1-variation of an area table: max over integer partitions of sum |A(n_{k-1}, n_k)|_F."""
    if interval is None:
        interval = IntervalZ(0, table.N)
    if interval.b > table.N:
        raise IndexError(f"interval [{interval.a}, {interval.b}] exceeds table size N={table.N}")
    V, pred = table.one_var_dp(interval.a, interval.b)
    return _result(V[-1], 1.0, _backtrack(pred, interval.a))


def table_one_var_bruteforce(table, interval: IntervalZ | None = None) -> VariationResult:
    if interval is None:
        interval = IntervalZ(0, table.N)
    if interval.length > BRUTEFORCE_MAX_LENGTH:
        raise OverflowError(f"brute force limited to length {BRUTEFORCE_MAX_LENGTH}, got {interval.length}")
    idx = range(interval.a, interval.b + 1)
    n = interval.length
    W = np.zeros((n + 1, n + 1))
    for r, i in enumerate(idx):
        for c, j in enumerate(idx):
            if i < j:
                W[r, c] = np.linalg.norm(table.entry(i, j))
    value, part = _bruteforce_max(W)
    return _result(value, 1.0, (interval.a + k for k in part))


def partition_power_sum(path: LatticePath, times, p: float) -> float:
    """sum |x(t_k) - x(t_{k-1})|^p for a real partition t_0 < ... < t_J."""
    pts = path.at(np.asarray(times, dtype=float))
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1) ** p))


def evaluate_partition(path: LatticePath, partition, p: float) -> float:
    return partition_power_sum(path, partition, p)
