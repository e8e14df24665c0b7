"""Logarithmic Sobolev norms of trigonometric series.

Two quantities are compared:

* l(f) = sum (log2(n+1))^{2s} |c_n|^2 on the coefficient side, and
* L(f) = double integral over [-pi, pi]^2 of |f(u) - f(v)|^2 K_s(u - v) with
  K_s(t) = |sin(t/2)|^{-1} (log2(pi / |sin(t/2)|))^{2s-1}.

For f = exp(i n u), |f(u) - f(v)|^2 = 4 sin^2(n (u - v) / 2), so L(f) = 4 T_n^s
with T_n^s the monomial integral below, and cross terms between different
frequencies vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .series import CoefficientSeq

GL_ORDER = 24
GRADE_LEVELS = 48


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid size M, scheme, and half-width h of the excluded diagonal band."""

    M: int = 2048
    scheme: str = "midpoint"
    h: float = 1e-4

    def __post_init__(self):
        if self.M < 16:
            raise ValueError(f"M must be >= 16, got {self.M}")
        if not 0 <= self.h < math.pi / 4:
            raise ValueError(f"h must lie in [0, pi/4), got {self.h}")
        if self.scheme not in ("midpoint", "adaptive"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def l_norm(c: CoefficientSeq, s: float) -> float:
    """sum_{n>=0} (log2(n+1))^{2s} |c_n|^2."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    n = np.arange(len(c))
    return float(np.sum(np.log2(n + 1.0) ** (2 * s) * np.abs(c.coeffs) ** 2))


def log_kernel(x: np.ndarray, s: float) -> np.ndarray:
    """g(x) = |sin x|^{-1} (log2(pi / |sin x|))^{2s-1}, the kernel at x = (u - v)/2."""
    sx = np.abs(np.sin(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log2(math.pi / sx) ** (2 * s - 1) / sx


# --- one-dimensional oscillatory quadrature -------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


def _panels(breaks: np.ndarray, grade_left: bool, grade_right: bool) -> tuple[np.ndarray, np.ndarray]:
    """Panel endpoints; first/last panels are split geometrically toward the ends."""
    lo, hi = list(breaks[:-1]), list(breaks[1:])
    if grade_left and len(lo) > 0:
        a, b = lo[0], hi[0]
        w = b - a
        cuts = [a + w * 2.0 ** -j for j in range(GRADE_LEVELS + 1)]
        lo = cuts[1:][::-1] + lo[1:]
        hi = cuts[:-1][::-1] + hi[1:]
    if grade_right and len(lo) > 0:
        a, b = lo[-1], hi[-1]
        w = b - a
        cuts = [b - w * 2.0 ** -j for j in range(GRADE_LEVELS + 1)]
        lo = lo[:-1] + cuts[:-1]
        hi = hi[:-1] + cuts[1:]
    return np.asarray(lo), np.asarray(hi)


def _integrate(func: Callable[[np.ndarray], np.ndarray], breaks, grade_left=True, grade_right=False) -> float:
    lo, hi = _panels(np.asarray(breaks, dtype=float), grade_left, grade_right)
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = func(x)
    return float(np.sum(half[:, None] * _GL_W[None, :] * vals))


def t_monomial(n: int, s: float, q: QuadratureSpec | None = None) -> float:
    """T_n^s = double integral of sin^2(n (u-v)/2) g((u-v)/2) over [-pi, pi]^2.

    Substituting xi = (u+v)/2, eta = (u-v)/2 leaves
    T_n^s = 8 int_0^pi (pi - eta) sin^2(n eta) g(eta) d eta,
    integrated panel by panel between the zeros of sin(n eta).
    """
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if n == 0:
        return 0.0

    def f(eta):
        return (math.pi - eta) * np.sin(n * eta) ** 2 * log_kernel(eta, s)

    breaks = np.linspace(0.0, math.pi, abs(n) + 1)
    return 8.0 * _integrate(f, breaks, grade_left=True, grade_right=True)


def r_monomial(n: int, s: float, q: QuadratureSpec | None = None) -> float:
    """R_n^s = int_0^1 sin^2(pi n t / 2) / t (log2(2/t))^{2s-1} dt."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if n == 0:
        return 0.0

    def f(t):
        return np.sin(0.5 * math.pi * n * t) ** 2 / t * np.log2(2.0 / t) ** (2 * s - 1)

    zeros = 2.0 * np.arange(0, abs(n) // 2 + 1) / abs(n)
    breaks = np.unique(np.concatenate([zeros[zeros < 1.0], [1.0]]))
    return _integrate(f, breaks, grade_left=True)


def monomial_bracket(n: int, s: float) -> tuple[float, float]:
    """Lower and upper multiples of R_n^s that bound T_n^s."""
    r = r_monomial(n, s)
    logpi = math.log2(math.pi) ** (2 * s - 1)
    if s >= 0.5:
        return 4 * math.pi * r, 8 * math.pi ** 2 * logpi * r
    return 4 * math.pi * logpi * r, 8 * math.pi ** 2 * r


def asymptotic_bracket(s: float) -> tuple[float, float]:
    """Bounds on R_n^s / (log2(pi n))^{2s} for large n."""
    ln2 = math.log(2)
    if s >= 0.5:
        return ln2 / 2 ** (2 * s + 3), ln2 / (2 * s) + ln2 / 2 ** (2 * s + 3)
    return ln2 / 16, ln2 / (2 * s) + ln2 / 16


ASYMPTOTIC_START = math.floor(math.e ** 4 * math.pi) + 1


# --- two-dimensional grid quadrature ---------------------------------------


def _grid(M: int) -> np.ndarray:
    return -math.pi + (np.arange(M) + 0.5) * (2 * math.pi / M)


def _lag_kernel(M: int, s: float, h: float, kernel: str) -> np.ndarray:
    """Kernel value at lag k (u - v = k * 2 pi / M), zero inside the diagonal band."""
    dt = 2 * math.pi / M
    t = np.arange(M) * dt
    dist = np.minimum(t, 2 * math.pi - t)
    if kernel == "log":
        K = log_kernel(t / 2, s)
    elif kernel == "unit":
        K = np.ones(M)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    K = np.where(dist <= max(h, 0.0) + 1e-300, 0.0, K)
    K[0] = 0.0
    return K


def _bilinear(f1: np.ndarray, f2: np.ndarray, K: np.ndarray) -> float:
    """dt^2 sum_{i,j} Re((f1_i - f1_j) conj(f2_i - f2_j)) K_{i-j} on a periodic grid."""
    M = f1.size
    dt = 2 * math.pi / M
    F1, F2 = np.fft.fft(f1), np.fft.fft(f2)
    # C(k) = sum_i f1_{i+k} conj(f2_i)
    C = np.fft.ifft(F1 * np.conj(F2))
    diag = np.real(np.vdot(f2, f1))
    # sum_i Re[(f1_{i+k} - f1_i) conj(f2_{i+k} - f2_i)] = 2 diag - Re C(k) - Re C(-k)
    Cm = np.roll(C[::-1], 1)
    per_lag = 2 * diag - np.real(C) - np.real(Cm)
    return float(dt * dt * np.sum(K * per_lag))


def evaluate_series(c: CoefficientSeq, theta: np.ndarray) -> np.ndarray:
    n = np.arange(len(c))
    return np.exp(1j * np.multiply.outer(theta, n)) @ c.coeffs


def big_l_norm_quadrature(f, s: float, q: QuadratureSpec | None = None) -> float:
    """L(f) by the periodic midpoint rule on an M x M grid, skipping |u - v| < h.

    ``f`` is a CoefficientSeq or a callable mapping theta arrays to values.
    """
    q = q or QuadratureSpec()
    u = _grid(q.M)
    vals = evaluate_series(f, u) if isinstance(f, CoefficientSeq) else np.asarray(f(u), dtype=complex)
    return _bilinear(vals, vals, _lag_kernel(q.M, s, q.h, "log"))


def band_bound(c: CoefficientSeq, s: float, h: float) -> float:
    """First-order bound on the contribution of the excluded band |u - v| < h.

    Uses |f(u) - f(v)| <= |f'|_inf |u - v| and |sin(t/2)| >= |t| / pi.
    """
    lip = float(np.sum(np.arange(len(c)) * np.abs(c.coeffs)))
    if s >= 0.5:
        logf = math.log2(math.pi ** 2 / h) ** (2 * s - 1) if h > 0 else math.inf
    else:
        logf = math.log2(math.pi) ** (2 * s - 1)
    return 2 * math.pi * math.pi * lip ** 2 * h ** 2 * logf


def big_l_norm_spectral(c: CoefficientSeq, s: float, q: QuadratureSpec | None = None) -> float:
    """L(f) = 4 sum |c_n|^2 T_n^s, using the orthogonality of the frequencies."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    total = 0.0
    for n, cn in enumerate(c.coeffs):
        if cn != 0 and n > 0:
            total += abs(cn) ** 2 * t_monomial(n, s, q)
    return 4.0 * total


def cross_orthogonality(m: int, n: int, s: float, q: QuadratureSpec | None = None, kernel: str = "log") -> float:
    """Grid value of the cross term of exp(imu) and exp(inu) under the kernel (zero exactly)."""
    if m == n:
        raise ValueError("m == n: use t_monomial for the diagonal term")
    q = q or QuadratureSpec()
    u = _grid(q.M)
    return _bilinear(np.exp(1j * m * u), np.exp(1j * n * u), _lag_kernel(q.M, s, q.h, kernel))


def holder_interpolation_check(c: CoefficientSeq, p: float, q: float, theta: float, slack: float = 1e-10) -> bool:
    """l(c, r) <= l(c, p)^{1-theta} l(c, q)^theta with r = (1-theta) p + theta q."""
    if not 0 < p < q:
        raise ValueError(f"need 0 < p < q, got p={p}, q={q}")
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    r = (1 - theta) * p + theta * q
    lhs = l_norm(c, r)
    rhs = l_norm(c, p) ** (1 - theta) * l_norm(c, q) ** theta
    return lhs <= rhs * (1 + slack) + 1e-300


def log_comparison(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, s: float) -> tuple[float, float, float]:
    """(int g (log2(b/t))^s, int g (log2(a/t))^s, (log_b a)^s int g (log2(b/t))^s) over (0, 1)."""
    if not a > b > 1:
        raise ValueError(f"need a > b > 1, got a={a}, b={b}")
    breaks = np.linspace(0.0, 1.0, 33)
    lo = _integrate(lambda t: g(t) * np.log2(b / t) ** s, breaks)
    mid = _integrate(lambda t: g(t) * np.log2(a / t) ** s, breaks)
    return lo, mid, math.log(a, b) ** s * lo
