"""Dyadic interval combinatorics on the integers.

A dyadic interval of level n is [k 2^n, (k+1) 2^n]. Every integer interval J
splits into dyadic pieces whose levels strictly decrease moving away from a
peak point P; this module builds that decomposition in three independent ways
(directly, greedily and by repeated bisection) so they can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .lattice_path import IntervalZ

MATERIALISE_MAX = 1 << 16


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """[k * 2**level, (k + 1) * 2**level]."""

    k: int
    level: int

    def __post_init__(self):
        if self.k < 0 or self.level < 0:
            raise ValueError(f"need k >= 0 and level >= 0, got k={self.k}, level={self.level}")

    @property
    def a(self) -> int:
        return self.k << self.level

    @property
    def b(self) -> int:
        return (self.k + 1) << self.level

    @property
    def length(self) -> int:
        return 1 << self.level

    def interval(self) -> IntervalZ:
        return IntervalZ(self.a, self.b)

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.k >> 1, self.level + 1)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "level": self.level}

    def __repr__(self) -> str:
        return f"[{self.a},{self.b}]@{self.level}"


@dataclass(frozen=True)
class PeakedDecomposition:
    pieces: tuple[DyadicInterval, ...]
    peak: int

    def to_dict(self) -> dict:
        return {"peak": self.peak, "pieces": [p.to_dict() for p in self.pieces]}


def as_dyadic(J: IntervalZ) -> DyadicInterval | None:
    """The dyadic interval equal to J, or None."""
    n = J.length
    if n & (n - 1):
        return None
    level = n.bit_length() - 1
    if J.a % n:
        return None
    return DyadicInterval(J.a >> level, level)


def is_dyadic(J: IntervalZ) -> bool:
    return as_dyadic(J) is not None


def _level_intervals(J: IntervalZ, level: int) -> list[DyadicInterval]:
    """All dyadic intervals of the given level contained in J."""
    size = 1 << level
    k = -(-J.a // size)
    out = []
    while (k + 1) * size <= J.b:
        out.append(DyadicInterval(k, level))
        k += 1
    return out


def n_of(J: IntervalZ) -> int:
    """Level of the largest dyadic interval contained in J."""
    level = J.length.bit_length() - 1
    while level > 0:
        size = 1 << level
        k = -(-J.a // size)
        if (k + 1) * size <= J.b:
            return level
        level -= 1
    return 0


def point_level(P: int) -> int | float:
    """Largest n with 2^n dividing P; infinity for P = 0."""
    if P < 0:
        raise ValueError(f"P must be >= 0, got {P}")
    if P == 0:
        return math.inf
    return (P & -P).bit_length() - 1


def decompose_monotone(J: IntervalZ, side: str) -> list[DyadicInterval]:
    """Dyadic cover of J whose levels increase toward the dyadic boundary.

    ``side`` names the boundary ('left' = J.a, 'right' = J.b) that must be a
    dyadic point of some level n with |J| < 2^n.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    boundary = J.a if side == "left" else J.b
    if not J.length < 2 ** point_level(boundary):
        raise ValueError(f"boundary {boundary} of {J} is not a dyadic point of level above log2|J|")
    bits = [l for l in range(J.length.bit_length()) if J.length >> l & 1]
    pieces = []
    if side == "right":
        pos = J.a
        for l in bits:
            pieces.append(DyadicInterval(pos >> l, l))
            pos += 1 << l
    else:
        pos = J.a
        for l in reversed(bits):
            pieces.append(DyadicInterval(pos >> l, l))
            pos += 1 << l
    return pieces


def peak_point(J: IntervalZ) -> int:
    n0 = n_of(J)
    top = _level_intervals(J, n0)
    if len(top) == 2:
        return top[1].a
    (I,) = top
    return I.a if I.k % 2 == 0 else I.b


def decompose_peaked(J: IntervalZ) -> PeakedDecomposition:
    """Dyadic pieces with levels strictly decreasing away from the peak P.

    P is the common endpoint of the two largest pieces when there are two;
    otherwise the endpoint k 2^n0 (k even) or (k+1) 2^n0 (k odd) of the
    single largest piece [k 2^n0, (k+1) 2^n0].
    """
    P = peak_point(J)
    pieces: list[DyadicInterval] = []
    if P > J.a:
        pieces += decompose_monotone(IntervalZ(J.a, P), "right")
    if P < J.b:
        pieces += decompose_monotone(IntervalZ(P, J.b), "left")
    return PeakedDecomposition(tuple(pieces), P)


def greedy_decompose(J: IntervalZ) -> list[DyadicInterval]:
    """Repeatedly cut out the biggest dyadic interval still available."""
    gaps = [J]
    pieces: list[DyadicInterval] = []
    while gaps:
        level = max(n_of(g) for g in gaps)
        new_gaps = []
        for g in gaps:
            cut = _level_intervals(g, level)
            if not cut:
                new_gaps.append(g)
                continue
            pieces += cut
            if g.a < cut[0].a:
                new_gaps.append(IntervalZ(g.a, cut[0].a))
            if cut[-1].b < g.b:
                new_gaps.append(IntervalZ(cut[-1].b, g.b))
        gaps = new_gaps
    return sorted(pieces, key=lambda I: I.a)


def smallest_enclosing(J: IntervalZ) -> DyadicInterval:
    """Smallest dyadic interval containing J."""
    level = 0
    while True:
        k = J.a >> level
        if (k + 1) << level >= J.b:
            return DyadicInterval(k, level)
        level += 1


def _enclosing(part: IntervalZ) -> DyadicInterval:
    """J itself if dyadic, else the parent of its largest monotone piece."""
    exact = as_dyadic(part)
    if exact is not None:
        return exact
    pieces = decompose_peaked(part).pieces
    return max(pieces, key=lambda I: I.level).parent()


def _cut_point(a: int, b: int) -> int:
    """Split point of a non-dyadic [a, b]: the peak if interior, else the
    inner boundary of the largest piece next to it."""
    P = peak_point(IntervalZ(a, b))
    if a < P < b:
        return P
    n0 = n_of(IntervalZ(a, b))
    return P - (1 << n0) if P == b else P + (1 << n0)


def bisect(J: IntervalZ) -> tuple[IntervalZ, IntervalZ, DyadicInterval, DyadicInterval]:
    """Split a non-dyadic J into J1, J2 with dyadic I1 >= J1, I2 >= J2, |Ji| > |Ii|/2."""
    if is_dyadic(J):
        raise ValueError(f"{J} is dyadic; only non-dyadic intervals can be bisected")
    cut = _cut_point(J.a, J.b)
    J1, J2 = IntervalZ(J.a, cut), IntervalZ(cut, J.b)
    return J1, J2, _enclosing(J1), _enclosing(J2)


def _is_dyadic(a: int, b: int) -> bool:
    n = b - a
    return n & (n - 1) == 0 and a % n == 0


def bisect_to_dyadics(J: IntervalZ) -> list[DyadicInterval]:
    """Bisect repeatedly until every piece is dyadic."""
    out: list[DyadicInterval] = []
    stack = [(J.a, J.b)]
    while stack:
        a, b = stack.pop()
        if _is_dyadic(a, b):
            level = (b - a).bit_length() - 1
            out.append(DyadicInterval(a >> level, level))
            continue
        cut = _cut_point(a, b)
        stack += [(cut, b), (a, cut)]
    return out


def iter_b_set(J: IntervalZ, level: int | None = None) -> Iterator[DyadicInterval]:
    """Dyadic intervals contained in J, optionally of one level only."""
    levels = range(n_of(J) + 1) if level is None else [level]
    for l in levels:
        yield from _level_intervals(J, l)


def b_set(J: IntervalZ, level: int | None = None) -> frozenset[DyadicInterval]:
    if J.length > MATERIALISE_MAX:
        raise OverflowError(f"|J| > {MATERIALISE_MAX}; use iter_b_set")
    return frozenset(iter_b_set(J, level))


def tilde_member(J: IntervalZ, I: DyadicInterval) -> bool:
    """|I cap J| > |I| / 2."""
    overlap = max(0, min(I.b, J.b) - max(I.a, J.a))
    return 2 * overlap > I.length


def b_sets(J: IntervalZ, mode: str = "all", level: int | None = None, member: DyadicInterval | None = None):
    """B_J (mode 'all'), B_J^level (mode 'level') or membership in the tilde family (mode 'tilde')."""
    if mode == "all":
        return b_set(J)
    if mode == "level":
        if level is None:
            raise ValueError("mode 'level' needs level")
        return b_set(J, level)
    if mode == "tilde":
        if member is None:
            raise ValueError("mode 'tilde' needs member")
        return tilde_member(J, member)
    raise ValueError(f"unknown mode {mode!r}")


def tilde_set(J: IntervalZ) -> frozenset[DyadicInterval]:
    """All dyadic I with |I cap J| > |I|/2 (such I never exceed twice |J| in length)."""
    out = set()
    for l in range((2 * J.length).bit_length()):
        size = 1 << l
        for k in range(max(0, J.a // size - 1), J.b // size + 1):
            I = DyadicInterval(k, l)
            if tilde_member(J, I):
                out.add(I)
    return frozenset(out)
