"""Compiled O(N^2) dynamic-programming kernels.

All kernels solve V[j] = max_{i<j} (V[i] + w(i, j)) with V[0] = 0 and keep
the smallest maximising predecessor, so partitions are deterministic.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def pvar_dp(x, p):
    n = x.shape[0]
    d = x.shape[1]
    V = np.zeros(n)
    pred = np.zeros(n, dtype=np.int64)
    half = p / 2.0
    for j in range(1, n):
        best = -1.0
        arg = 0
        for i in range(j):
            s = 0.0
            for c in range(d):
                diff = x[j, c] - x[i, c]
                s += diff * diff
            if half == 1.0:
                w = s
            elif half == 0.5:
                w = np.sqrt(s)
            else:
                w = s ** half
            cand = V[i] + w
            if cand > best:
                best = cand
                arg = i
        V[j] = best
        pred[j] = arg
    return V, pred


@njit(cache=True, nogil=True)
def area_dp_streaming(x, prefix, pairs):
    """Area 1-variation DP with A(i, j) rebuilt from prefix areas.

    A(i, j) = A(0, j) - A(0, i) - 1/2 [x_i - x_0, x_j - x_i] (Chen with base 0).
    ``pairs`` lists the (a, b) index pairs a < b of the stored components.
    """
    n = x.shape[0]
    K = pairs.shape[0]
    V = np.zeros(n)
    pred = np.zeros(n, dtype=np.int64)
    for j in range(1, n):
        best = -1.0
        arg = 0
        for i in range(j):
            s = 0.0
            for q in range(K):
                a = pairs[q, 0]
                b = pairs[q, 1]
                ua = x[i, a] - x[0, a]
                ub = x[i, b] - x[0, b]
                va = x[j, a] - x[i, a]
                vb = x[j, b] - x[i, b]
                comp = prefix[j, q] - prefix[i, q] - 0.5 * (ua * vb - va * ub)
                s += comp * comp
            cand = V[i] + np.sqrt(2.0 * s)
            if cand > best:
                best = cand
                arg = i
        V[j] = best
        pred[j] = arg
    return V, pred


@njit(cache=True, nogil=True)
def area_dp_packed(packed, n, offset):
    """Area 1-variation DP over a packed column-major upper table.

    Entry (i, j), i <= j, of the full table lives at row j*(j+1)/2 + i;
    the DP runs on the sub-table starting at knot ``offset``.
    """
    K = packed.shape[1]
    V = np.zeros(n)
    pred = np.zeros(n, dtype=np.int64)
    for jj in range(1, n):
        j = jj + offset
        base = j * (j + 1) // 2
        best = -1.0
        arg = 0
        for ii in range(jj):
            row = base + ii + offset
            s = 0.0
            for q in range(K):
                s += packed[row, q] * packed[row, q]
            cand = V[ii] + np.sqrt(2.0 * s)
            if cand > best:
                best = cand
                arg = ii
        V[jj] = best
        pred[jj] = arg
    return V, pred


@njit(cache=True, nogil=True)
def max_block_sq(x):
    """max over 0 <= i <= j < n of |x_j - x_{i-1}|^2 with x_{-1} = 0."""
    n = x.shape[0]
    d = x.shape[1]
    best = 0.0
    for j in range(n):
        s = 0.0
        for c in range(d):
            s += x[j, c] * x[j, c]
        if s > best:
            best = s
        for i in range(j):
            s = 0.0
            for c in range(d):
                diff = x[j, c] - x[i, c]
                s += diff * diff
            if s > best:
                best = s
    return best


@njit(cache=True, nogil=True)
def max_pair_dist(x):
    n = x.shape[0]
    d = x.shape[1]
    best = 0.0
    for j in range(n):
        for i in range(j):
            s = 0.0
            for c in range(d):
                diff = x[j, c] - x[i, c]
                s += diff * diff
            if s > best:
                best = s
    return np.sqrt(best)
