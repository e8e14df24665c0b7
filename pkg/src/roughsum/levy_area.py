"""Levy area of lattice paths.

On each unit segment the path is linear, so its own area vanishes and Chen's
relation A(s,t) = A(s,u) + A(u,t) + 1/2 [x_u - x_s, x_t - x_u] with
[u, v] = u (x) v - v (x) u builds every A(i, j) from the increments.
Only the strictly upper components (a < b) of the antisymmetric matrices are
stored; the Frobenius norm is sqrt(2 * sum of their squares).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .lattice_path import IntervalZ, LatticePath, check_interval
from .variation import p_var_exact, table_one_var

DENSE_MAX_KNOTS = 20000
DENSE_MAX_BYTES = 1 << 30
DIRECT_ORACLE_MAX = 500


def bracket(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """[u, v] = u (x) v - v (x) u."""
    return np.multiply.outer(u, v) - np.multiply.outer(v, u)


def component_pairs(d: int) -> np.ndarray:
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def _bracket_components(u: np.ndarray, v: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Upper components of [u, v]; u, v broadcast over leading axes."""
    a, b = pairs[:, 0], pairs[:, 1]
    return u[..., a] * v[..., b] - v[..., a] * u[..., b]


def _to_matrix(comp: np.ndarray, d: int, pairs: np.ndarray) -> np.ndarray:
    m = np.zeros(comp.shape[:-1] + (d, d))
    m[..., pairs[:, 0], pairs[:, 1]] = comp
    m[..., pairs[:, 1], pairs[:, 0]] = -comp
    return m


class AreaTable:
    """Areas A(i, j), 0 <= i <= j <= N, of a lattice path.

    Small tables are materialised densely by the Chen recursion in j. Large
    ones keep only the prefix areas A(0, j) and rebuild entries on demand.
    """

    def __init__(self, path: LatticePath, dense: bool | None = None, _packed=None):
        self.path = path
        self.d = path.dim
        self.N = path.N
        self.pairs = component_pairs(self.d)
        x = path.values
        K = len(self.pairs)
        if dense is None:
            size = (self.N + 1) * (self.N + 2) // 2 * max(K, 1) * 8
            dense = self.N <= DENSE_MAX_KNOTS and size <= DENSE_MAX_BYTES
        self.dense = bool(dense)
        # prefix areas A(0, j) by the same recursion, kept in both modes
        steps = _bracket_components(x[:-1] - x[0], np.diff(x, axis=0), self.pairs)
        self.prefix = np.zeros((self.N + 1, K))
        if self.N:
            self.prefix[1:] = 0.5 * np.cumsum(steps, axis=0)
        self.packed = None
        if _packed is not None:
            self.packed = _packed
        elif self.dense:
            self.packed = self._build_packed()

    def _build_packed(self) -> np.ndarray:
        x = self.path.values
        K = len(self.pairs)
        packed = np.zeros(((self.N + 1) * (self.N + 2) // 2, K))
        for j in range(2, self.N + 1):
            prev = (j - 1) * j // 2
            cur = j * (j + 1) // 2
            delta = x[j] - x[j - 1]
            # A(i, j) = A(i, j-1) + 1/2 [x_{j-1} - x_i, x_j - x_{j-1}], i < j - 1
            packed[cur: cur + j - 1] = packed[prev: prev + j - 1] + 0.5 * _bracket_components(
                x[j - 1] - x[: j - 1], delta, self.pairs
            )
        return packed

    def components(self, i: int, j: int) -> np.ndarray:
        if not 0 <= i <= j <= self.N:
            raise IndexError(f"need 0 <= i <= j <= {self.N}, got ({i}, {j})")
        if self.packed is not None:
            return self.packed[j * (j + 1) // 2 + i].copy()
        x = self.path.values
        return self.prefix[j] - self.prefix[i] - 0.5 * _bracket_components(x[i] - x[0], x[j] - x[i], self.pairs)

    def entry(self, i: int, j: int) -> np.ndarray:
        """A(i, j) as a d x d antisymmetric matrix."""
        return _to_matrix(self.components(i, j), self.d, self.pairs)

    def norm(self, i: int, j: int) -> float:
        c = self.components(i, j)
        return float(np.sqrt(2.0 * np.dot(c, c)))

    def column_norms(self, j: int) -> np.ndarray:
        """|A(i, j)|_F for i = 0..j."""
        if self.packed is not None:
            block = self.packed[j * (j + 1) // 2: j * (j + 1) // 2 + j + 1]
        else:
            x = self.path.values
            block = self.prefix[j] - self.prefix[: j + 1] - 0.5 * _bracket_components(
                x[: j + 1] - x[0], x[j] - x[: j + 1], self.pairs
            )
        return np.sqrt(2.0 * np.sum(block * block, axis=-1))

    def one_var_dp(self, a: int, b: int):
        n = b - a + 1
        if len(self.pairs) == 0:
            return np.zeros(n), np.zeros(n, dtype=np.int64)
        if self.packed is not None:
            return _kernels.area_dp_packed(self.packed, n, a)
        x = np.ascontiguousarray(self.path.values[a: b + 1])
        # prefix areas relative to knot a
        sub = AreaTable(LatticePath(x), dense=False)
        return _kernels.area_dp_streaming(x, sub.prefix, self.pairs)

    def perturbed(self, i: int, j: int, delta: np.ndarray) -> "AreaTable":
        """Copy of a dense table with the d x d matrix ``delta`` added to A(i, j)."""
        if self.packed is None:
            raise ValueError("only dense tables can be edited")
        delta = np.asarray(delta, dtype=float)
        packed = self.packed.copy()
        packed[j * (j + 1) // 2 + i] += delta[self.pairs[:, 0], self.pairs[:, 1]]
        return AreaTable(self.path, dense=True, _packed=packed)


def build_area_table(path: LatticePath, dense: bool | None = None) -> AreaTable:
    """Area table of a lattice path via Chen's recursion."""
    return AreaTable(path, dense=dense)


def area_direct_oracle(path: LatticePath, interval: IntervalZ) -> np.ndarray:
    """A(a, b) = 1/2 sum_{a <= k < l < b} [D_k, D_l] by the direct double sum."""
    check_interval(path, interval)
    if interval.length > DIRECT_ORACLE_MAX:
        raise OverflowError(f"direct oracle limited to length {DIRECT_ORACLE_MAX}")
    D = np.diff(path.values[interval.a: interval.b + 1], axis=0)
    d = path.dim
    out = np.zeros((d, d))
    for k in range(len(D)):
        for l in range(k + 1, len(D)):
            out += bracket(D[k], D[l])
    return 0.5 * out


def chen_defect(path: LatticePath, table: AreaTable, s: int, u: int, t: int) -> float:
    """|A(s,t) - A(s,u) - A(u,t) - 1/2 [x_u - x_s, x_t - x_u]|_F."""
    if not 0 <= s <= u <= t <= table.N:
        raise ValueError(f"need 0 <= s <= u <= t <= {table.N}, got ({s}, {u}, {t})")
    x = path.values
    resid = table.entry(s, t) - table.entry(s, u) - table.entry(u, t) - 0.5 * bracket(x[u] - x[s], x[t] - x[u])
    return float(np.linalg.norm(resid))


class PairAreaTable:
    """Areas A_12(i, j) produced by two lattice paths, stored densely as d x d matrices."""

    def __init__(self, entries: np.ndarray):
        self.entries = entries
        self.N = entries.shape[0] - 1
        self.d = entries.shape[2]

    def entry(self, i: int, j: int) -> np.ndarray:
        if not 0 <= i <= j <= self.N:
            raise IndexError(f"need 0 <= i <= j <= {self.N}, got ({i}, {j})")
        return self.entries[i, j].copy()


def pair_area_table(p1: LatticePath, p2: LatticePath) -> PairAreaTable:
    """Area produced by two paths.

    Segment value A_12(k, k+1) = 1/4 [D1_k, D2_k]; then
    A_12(i, j) = A_12(i, j-1) + A_12(j-1, j) + 1/2 [x1_{j-1} - x1_i, D2_{j-1}].
    """
    if p1.N != p2.N or p1.dim != p2.dim:
        raise ValueError(f"shape mismatch: ({p1.N}, {p1.dim}) vs ({p2.N}, {p2.dim})")
    x1, x2 = p1.values, p2.values
    N, d = p1.N, p1.dim
    D1, D2 = np.diff(x1, axis=0), np.diff(x2, axis=0)
    seg = 0.25 * (D1[:, :, None] * D2[:, None, :] - D2[:, :, None] * D1[:, None, :])
    E = np.zeros((N + 1, N + 1, d, d))
    for j in range(1, N + 1):
        E[j - 1, j] = seg[j - 1]
        if j >= 2:
            u = x1[j - 1] - x1[: j - 1]
            v = D2[j - 1]
            E[: j - 1, j] = E[: j - 1, j - 1] + seg[j - 1] + 0.5 * (
                u[:, :, None] * v[None, None, :] - v[None, :, None] * u[:, None, :]
            )
    return PairAreaTable(E)


def area_at_real(path: LatticePath, s, t) -> np.ndarray:
    """Upper components of A(s, t) for real times 0 <= s <= t <= N (broadcasting).

    With P(t) = A(0, t) extended between knots by the straight segment,
    Chen gives A(s, t) = P(t) - P(s) - 1/2 [x(s) - x(0), x(t) - x(s)].
    """
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    if np.any(s > t):
        raise ValueError("need s <= t")
    table = AreaTable(path, dense=False)
    x = path.values

    def prefix(u):
        k = np.clip(np.floor(u).astype(np.int64), 0, max(path.N - 1, 0))
        return table.prefix[k] + 0.5 * _bracket_components(x[k] - x[0], path.at(u) - x[k], table.pairs)

    xs, xt = path.at(s), path.at(t)
    return prefix(t) - prefix(s) - 0.5 * _bracket_components(xs - x[0], xt - xs, table.pairs)


def area_partition_sum(path: LatticePath, times) -> float:
    """sum |A(t_{k-1}, t_k)|_F over a real partition t_0 < ... < t_J."""
    times = np.asarray(times, dtype=float)
    comp = area_at_real(path, times[:-1], times[1:])
    return float(np.sum(np.sqrt(2.0 * np.sum(comp * comp, axis=-1))))


def rough_norm_sq(path: LatticePath, table: AreaTable, interval: IntervalZ | None = None) -> float:
    """|x|^2_{2-var} + |A|_{1-var} on the interval."""
    if interval is None:
        interval = IntervalZ(0, path.N)
    check_interval(path, interval)
    return p_var_exact(path, 2.0, interval).power_sum + table_one_var(table, interval).power_sum
