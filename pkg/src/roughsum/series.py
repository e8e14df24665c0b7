"""Orthonormal systems, coefficient constructors and partial-sum paths.

Three systems are supported:

* ``FourierSystem``: u_n(theta) = exp(i n theta) on [-pi, pi] with the
  normalised measure d theta / 2 pi, realised as R^2 paths.
* ``DiscreteONS``: m points with uniform mass 1/m and u_n(w) = sqrt(m) Q[w, n]
  for an orthogonal matrix Q, so every expectation is an exact finite average.
* digit-block variables built from disjoint windows of the binary digits of a
  uniform point (``BlockPlan``, ``zeta_sample``, ``walk_path``).

Digit streams come from numpy's PCG64 generator seeded explicitly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .lattice_path import LatticePath

CLOSED_FORM_CUTOFF = 1e-8


@dataclass(frozen=True)
class CoefficientSeq:
    """Finite coefficient sequence c_0..c_N (complex, stored as complex128)."""

    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).ravel()
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be a nonempty finite sequence")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def log_weighted(self, power: float = 2.0) -> float:
        """sum (log2(n+1))^power |c_n|^2."""
        n = np.arange(self.coeffs.size)
        return float(np.sum(np.log2(n + 1.0) ** power * np.abs(self.coeffs) ** 2))

    def __len__(self) -> int:
        return self.coeffs.size


def load_coeffs(path: str | Path, label: str | None = None) -> CoefficientSeq:
    """Read a CSV with columns index, re, im (header optional, gaps are zero)."""
    path = Path(path)
    entries: dict[int, complex] = {}
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                idx = int(row[0])
                re = float(row[1])
                im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header
                raise ValueError(f"{path}:{lineno}: expected index,re,im, got {row}") from None
            if idx < 0:
                raise ValueError(f"{path}:{lineno}: negative index {idx}")
            entries[idx] = complex(re, im)
    if not entries:
        raise ValueError(f"{path}: no coefficients")
    c = np.zeros(max(entries) + 1, dtype=complex)
    for idx, val in entries.items():
        c[idx] = val
    return CoefficientSeq(c, label if label is not None else path.stem)


def save_coeffs(c: CoefficientSeq, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for n, v in enumerate(c.coeffs):
            writer.writerow([n, repr(float(v.real)), repr(float(v.imag))])


# --- orthonormal systems ---------------------------------------------------


@dataclass(frozen=True)
class FourierSystem:
    """u_n(theta) = exp(i n theta)."""

    tag: str = "fourier"

    def values(self, theta, n_max: int) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, np.arange(n_max + 1)))


@dataclass(frozen=True)
class DiscreteONS:
    """m-point space with uniform mass and u_n(w) = sqrt(m) Q[w-1, n], w = 1..m."""

    Q: np.ndarray
    seed: int | None = None
    tag: str = "discrete"

    @property
    def m(self) -> int:
        return self.Q.shape[0]

    def basis(self) -> np.ndarray:
        """Matrix U with U[w-1, n] = u_n(w)."""
        return math.sqrt(self.m) * self.Q

    def orthonormality_defect(self) -> float:
        U = self.basis()
        gram = U.T @ U / self.m
        return float(np.max(np.abs(gram - np.eye(self.m))))


def haar_ons(m: int, seed: int) -> DiscreteONS:
    """Orthogonal Q from the QR factorisation of a seeded Gaussian matrix."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    Q = Q * np.sign(np.diag(R))
    Q.setflags(write=False)
    return DiscreteONS(Q, seed)


def identity_ons(m: int) -> DiscreteONS:
    Q = np.eye(m)
    Q.setflags(write=False)
    return DiscreteONS(Q, None)


def _as_path(z: np.ndarray, real: bool) -> LatticePath:
    if real:
        return LatticePath(z.real[:, None])
    return LatticePath(np.stack([z.real, z.imag], axis=-1))


def partial_sum_path(system, c: CoefficientSeq, omega, N: int | None = None) -> LatticePath:
    """x_k = sum_{j<=k} c_j u_j(omega), k = 0..N.

    Fourier paths are R^2; discrete paths are R^1 for real coefficients and
    R^2 otherwise. ``omega`` is theta for Fourier and a point 1..m otherwise.
    """
    if N is None:
        N = c.N
    if not 0 <= N <= c.N:
        raise ValueError(f"N must lie in [0, {c.N}], got {N}")
    coeffs = c.coeffs[: N + 1]
    if isinstance(system, FourierSystem):
        if not -math.pi <= omega <= 2 * math.pi:
            raise ValueError(f"theta out of range: {omega}")
        z = np.cumsum(coeffs * np.exp(1j * omega * np.arange(N + 1)))
        return _as_path(z, False)
    if isinstance(system, DiscreteONS):
        if int(omega) != omega or not 1 <= omega <= system.m:
            raise ValueError(f"omega must be an integer in 1..{system.m}, got {omega}")
        if N >= system.m:
            raise ValueError(f"discrete system has only {system.m} functions")
        u = system.basis()[int(omega) - 1, : N + 1]
        z = np.cumsum(coeffs * u)
        return _as_path(z, c.is_real)
    raise TypeError(f"unsupported system {system!r}")


def discrete_paths(system: DiscreteONS, c: CoefficientSeq, N: int | None = None) -> list[LatticePath]:
    """Partial-sum paths for every point w = 1..m."""
    if N is None:
        N = c.N
    if N >= system.m:
        raise ValueError(f"discrete system has only {system.m} functions")
    Z = np.cumsum(system.basis()[:, : N + 1] * c.coeffs[: N + 1], axis=1)
    return [_as_path(z, c.is_real) for z in Z]


def fourier_paths(theta: np.ndarray, c: CoefficientSeq) -> np.ndarray:
    """Array (len(theta), N+1, 2) of Fourier partial sums."""
    z = np.cumsum(FourierSystem().values(theta, c.N) * c.coeffs, axis=1)
    return np.stack([z.real, z.imag], axis=-1)


# --- block structure -------------------------------------------------------


def block_reparametrize(c: CoefficientSeq) -> tuple[CoefficientSeq, list[tuple[int, int]]]:
    """b_n = (sum_{k=2^n+1}^{2^{n+1}} |c_k|^2)^{1/2}, n >= 0.

    Returns b and the block map n -> (2^n + 1, 2^{n+1}) clipped to the
    available coefficients.
    """
    if len(c) < 3:
        raise ValueError("need at least three coefficients")
    energy = np.abs(c.coeffs) ** 2
    b, blocks = [], []
    n = 0
    while (1 << n) + 1 <= c.N:
        lo, hi = (1 << n) + 1, min(1 << (n + 1), c.N)
        blocks.append((lo, hi))
        b.append(math.sqrt(float(np.sum(energy[lo: hi + 1]))))
        n += 1
    return CoefficientSeq(np.asarray(b), f"{c.label}:blocks"), blocks


def coeffs_finite2var_example(n_max: int) -> CoefficientSeq:
    """c_k = 1/(n 2^{n/2}) for k in (2^n, 2^{n+1}], n = 1..n_max; zero elsewhere."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    c = np.zeros((1 << (n_max + 1)) + 1)
    for n in range(1, n_max + 1):
        c[(1 << n) + 1: (1 << (n + 1)) + 1] = 1.0 / (n * 2.0 ** (n / 2))
    return CoefficientSeq(c, f"finite2var(n_max={n_max})")


def fourier_block_path(n: int, theta: float, closed_form: bool = True) -> LatticePath:
    """Block increments X(k) - X(2^n), k = 2^n..2^{n+1}, of the finite 2-variation example.

    With every coefficient of block n equal to 1/(n 2^{n/2}), the geometric sum
    gives X(k) - X(2^n) = (e^{i(2^n+1)theta} - e^{i(k+1)theta}) / (n 2^{n/2} (1 - e^{i theta})).
    Knots are re-indexed to 0..2^n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    scale = 1.0 / (n * 2.0 ** (n / 2))
    k = np.arange(1 << n, (1 << (n + 1)) + 1)
    denom = 1 - np.exp(1j * theta)
    if closed_form and abs(denom) >= CLOSED_FORM_CUTOFF:
        z = (np.exp(1j * ((1 << n) + 1) * theta) - np.exp(1j * (k + 1) * theta)) * scale / denom
    else:
        terms = np.exp(1j * k[1:] * theta) * scale
        z = np.concatenate([[0.0], np.cumsum(terms)])
    return _as_path(z, False)


def local_constant(theta: float) -> float:
    """C_theta = 49 pi theta / (2 sin^2(theta/2))."""
    return 49 * math.pi * theta / (2 * math.sin(theta / 2) ** 2)


@dataclass(frozen=True)
class WeylExample:
    """Block data of the series with coefficients a(n)^{-1/2} 2^{-n/2} on (2^n, 2^{n+1}]."""

    N_start: int
    n: np.ndarray
    r: np.ndarray  # r(N-1), r(N), ..., r(n_max+1)
    r_prime: np.ndarray  # at n = N..n_max
    inv_a: np.ndarray  # 1/a(n), n = N..n_max
    w_dyadic: np.ndarray  # w(2^n), n = N..n_max

    @property
    def block_value(self) -> np.ndarray:
        return np.sqrt(self.inv_a) * 2.0 ** (-self.n / 2)

    def convergent_sums(self) -> np.ndarray:
        """Partial sums of (log2 n)^2 / a(n)."""
        return np.cumsum(np.log2(self.n) ** 2 * self.inv_a)

    def divergent_sums(self) -> np.ndarray:
        """Partial sums of w(2^n) / a(n), a lower bound for sum w(k) |c_k|^2."""
        return np.cumsum(self.w_dyadic * self.inv_a)

    def coefficients(self) -> CoefficientSeq:
        top = int(self.n[-1])
        if top > 22:
            raise OverflowError(f"materialising 2^{top + 1} coefficients is too large")
        c = np.zeros((1 << (top + 1)) + 1)
        for n, v in zip(self.n, self.block_value):
            c[(1 << int(n)) + 1: (1 << (int(n) + 1)) + 1] = v
        return CoefficientSeq(c, "weyl")


def coeffs_weyl_example(w_dyadic: Callable[[int], float] | Sequence[float], N_start: int, n_max: int) -> WeylExample:
    """Coefficients for a slowly growing Weyl multiplier w.

    ``w_dyadic(n)`` gives w(2^n). With r(n) = w(2^n)/(log2 n)^2 for n >= N,
    r(N-1) = r(N)/2 and r'(n) = (r(n+1) - r(n-1))/2, the block energy is
    1/a(n) = r'(n) / (r(n) sqrt((log2 n)^2 w(2^n))).
    """
    if N_start < 2:
        raise ValueError(f"N_start must be >= 2, got {N_start}")
    if n_max < N_start:
        raise ValueError("n_max must be >= N_start")
    w = w_dyadic if callable(w_dyadic) else (lambda n: w_dyadic[n])
    ns = np.arange(N_start, n_max + 2)
    wv = np.array([float(w(int(n))) for n in ns])
    if np.any(wv <= 0) or np.any(np.diff(wv) < 0):
        raise ValueError("w(2^n) must be positive and non-decreasing")
    r_main = wv / np.log2(ns) ** 2
    if np.any(np.diff(r_main) <= 0):
        raise ValueError("w(2^n)/(log2 n)^2 must be strictly increasing for n >= N_start")
    r = np.concatenate([[r_main[0] / 2], r_main])  # r(N-1), r(N), ..., r(n_max+1)
    r_prime = (r[2:] - r[:-2]) / 2  # n = N..n_max
    n = ns[:-1]
    r_n = r[1:-1]
    inv_a = r_prime / (r_n * np.sqrt(np.log2(n) ** 2 * wv[:-1]))
    return WeylExample(N_start, n, r, r_prime, inv_a, wv[:-1])


def coeffs_area_blowup(n: int, M: int | None = None) -> LatticePath:
    """f_n(theta) = sum_{k=1}^n 2^{-k} exp(2 pi i (4^k / k) theta) on a uniform grid of [0, 1].

    The grid has M + 1 points (M >= 64 4^n / n intervals); knot j is theta = j / M.
    """
    if not 1 <= n <= 8:
        raise ValueError(f"n must lie in 1..8, got {n}")
    need = math.ceil(64 * 4 ** n / n)
    if M is None:
        M = need
    if M < need:
        raise OverflowError(f"grid of {M} intervals is too coarse; need at least {need}")
    theta = np.arange(M + 1) / M
    z = np.zeros(M + 1, dtype=complex)
    for k in range(1, n + 1):
        z += 2.0 ** (-k) * np.exp(2j * math.pi * (4 ** k / k) * theta)
    return _as_path(z, False)


# --- digit-block variables -------------------------------------------------


@dataclass(frozen=True)
class BlockPlan:
    """Block k holds m_k variables, each reading n_k fresh binary digits."""

    m: tuple[int, ...]
    n: tuple[int, ...]
    s: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if len(self.m) != len(self.n) or not self.m:
            raise ValueError("m and n must be nonempty and of equal length")
        if any(v < 1 for v in self.m) or any(v < 1 for v in self.n):
            raise ValueError("block sizes and digit depths must be positive")
        s = [0]
        for mk, nk in zip(self.m, self.n):
            s.append(s[-1] + mk * nk)
        object.__setattr__(self, "m", tuple(self.m))
        object.__setattr__(self, "n", tuple(self.n))
        object.__setattr__(self, "s", tuple(s))

    def window(self, k: int, i: int) -> tuple[int, int]:
        """0-based digit slice [start, stop) read by variable i (1-based) of block k (1-based)."""
        if not 1 <= k <= len(self.m):
            raise ValueError(f"block {k} outside 1..{len(self.m)}")
        if not 1 <= i <= self.m[k - 1]:
            raise ValueError(f"variable {i} outside 1..{self.m[k - 1]}")
        nk = self.n[k - 1]
        start = self.s[k - 1] + (i - 1) * nk
        return start, start + nk

    @property
    def total_digits(self) -> int:
        return self.s[-1]


def _dyadic_fraction(bits: np.ndarray) -> np.ndarray:
    """sum_j bits[..., j-1] / 2^j."""
    weights = 0.5 ** np.arange(1, bits.shape[-1] + 1)
    return bits @ weights


def zeta_sample(plan: BlockPlan, k: int, i: int, digits) -> float:
    """cos(2 pi sum_{j=1}^{n_k} theta_{s_{k-1} + (i-1) n_k + j} / 2^j)."""
    start, stop = plan.window(k, i)
    digits = np.asarray(digits)
    if digits.shape[-1] < stop:
        raise ValueError(f"need {stop} digits, got {digits.shape[-1]}")
    return np.cos(2 * math.pi * _dyadic_fraction(digits[..., start:stop]))


def random_digits(n_digits: int, seed: int, size: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    shape = (n_digits,) if size is None else (size, n_digits)
    return rng.integers(0, 2, size=shape, dtype=np.int8)


def all_digit_strings(n_digits: int) -> np.ndarray:
    """Every 0/1 string of the given length, one per row."""
    if n_digits > 20:
        raise OverflowError("exhaustive enumeration is limited to 20 digits")
    codes = np.arange(1 << n_digits)
    return ((codes[:, None] >> np.arange(n_digits - 1, -1, -1)) & 1).astype(np.int8)


def walk_increments(m: int, n: int, digits: np.ndarray) -> np.ndarray:
    """zeta_i^{(n)} / sqrt(m), i = 1..m, for one or many digit rows."""
    digits = np.asarray(digits)
    if digits.shape[-1] < m * n:
        raise ValueError(f"need {m * n} digits, got {digits.shape[-1]}")
    windows = digits[..., : m * n].reshape(digits.shape[:-1] + (m, n))
    return np.cos(2 * math.pi * _dyadic_fraction(windows)) / math.sqrt(m)


def walk_path(m: int, n: int, digits) -> LatticePath:
    """Knots 0..m of x_k = sum_{i<=k} zeta_i^{(n)} / sqrt(m)."""
    inc = walk_increments(m, n, digits)
    return LatticePath(np.concatenate([[0.0], np.cumsum(inc)]))


def digits_of(theta, n_digits: int) -> np.ndarray:
    """First binary digits of theta in [0, 1), one row per theta value."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any((theta < 0) | (theta >= 1)):
        raise ValueError("theta must lie in [0, 1)")
    if n_digits > 52:
        raise ValueError("at most 52 digits of a double are exact")
    codes = np.floor(np.ldexp(theta, n_digits)).astype(np.int64)
    return ((codes[:, None] >> np.arange(n_digits - 1, -1, -1)) & 1).astype(np.int8)


def zeta_error(plan: BlockPlan, k: int, i: int, theta) -> tuple[np.ndarray, float]:
    """|zeta_i - cos(2 pi 2^{start} theta)| for the digits of theta, and the bound pi / 2^{n_k - 1}.

    The window starting at digit ``start`` (0-based) truncates 2^{start} theta mod 1
    after n_k digits, an error below 2^{-n_k} inside a cosine of slope at most 2 pi.
    """
    start, stop = plan.window(k, i)
    digits = digits_of(theta, stop)
    zeta = zeta_sample(plan, k, i, digits)
    exact = np.cos(2 * math.pi * np.ldexp(np.atleast_1d(np.asarray(theta, dtype=float)), start))
    return np.abs(zeta - exact), math.pi / 2 ** (plan.n[k - 1] - 1)
