"""Piecewise-linear paths sampled at integer knots.

A ``LatticePath`` holds the values x_0..x_N of a path that is linear on every
unit interval [k, k+1]. Complex-valued series are stored as two real columns.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class IntervalZ:
    """Integer interval [a, b] with 0 <= a < b."""

    a: int
    b: int

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise ValueError(f"interval endpoints must be integers, got [{self.a}, {self.b}]")
        if self.a < 0 or self.b <= self.a:
            raise ValueError(f"need 0 <= a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> int:
        return self.b - self.a


class LatticePath:
    """Values x_0..x_N of a d-dimensional path, linear between integer knots.

    The array is copied and frozen, so instances are safe to share.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("path values must be a nonempty sequence of equal-length vectors")
        if not np.all(np.isfinite(arr)):
            raise ValueError("path values must be finite")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[1]

    @property
    def N(self) -> int:
        return self._values.shape[0] - 1

    def __len__(self) -> int:
        return self._values.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePath) and np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"LatticePath(dim={self.dim}, N={self.N})"

    def at(self, t) -> np.ndarray:
        """Evaluate the linear interpolant at real time(s) t in [0, N]."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.N):
            raise ValueError(f"time outside [0, {self.N}]")
        if self.N == 0:
            return np.broadcast_to(self._values[0], t.shape + (self.dim,)).copy()
        k = np.minimum(np.floor(t).astype(int), self.N - 1)
        frac = (t - k)[..., None]
        return self._values[k] + frac * (self._values[k + 1] - self._values[k])


def check_interval(path: LatticePath, interval: IntervalZ) -> None:
    if interval.b > path.N:
        raise IndexError(f"interval [{interval.a}, {interval.b}] exceeds path length N={path.N}")


def increment(path: LatticePath, interval: IntervalZ) -> np.ndarray:
    """x_b - x_a."""
    check_interval(path, interval)
    return path.values[interval.b] - path.values[interval.a]


def coarsen_at_knots(path: LatticePath, knots: Sequence[int]) -> LatticePath:
    """Piecewise-linear path through the values of ``path`` at ``knots``.

    Constant before the first knot and after the last one, linear between
    consecutive knots, and of the same length N as the input.
    """
    knots = np.asarray(list(knots))
    if knots.size == 0:
        raise ValueError("knots must be nonempty")
    if not np.issubdtype(knots.dtype, np.integer):
        if not np.all(knots == np.round(knots)):
            raise ValueError("knots must be integers")
        knots = knots.astype(int)
    if np.any(np.diff(knots) <= 0):
        raise ValueError("knots must be strictly increasing")
    if knots[0] < 0 or knots[-1] > path.N:
        raise ValueError(f"knots must lie in [0, {path.N}]")
    t = np.arange(path.N + 1)
    out = np.empty_like(path.values)
    for c in range(path.dim):
        out[:, c] = np.interp(t, knots, path.values[knots, c])
    # keep knot values bit-exact
    out[knots] = path.values[knots]
    return LatticePath(out)


def restrict(path: LatticePath, interval: IntervalZ) -> LatticePath:
    """Sub-path on [a, b], re-indexed to knots 0..b-a."""
    check_interval(path, interval)
    return LatticePath(path.values[interval.a: interval.b + 1])


def dyadic_knots(N: int, start: int = 1) -> list[int]:
    """Knots start, 2*start, 4*start, ... below N, closed off with N itself."""
    knots = []
    t = start
    while t < N:
        knots.append(t)
        t *= 2
    knots.append(N)
    return knots


def _rectangular(rows: list[list[float]], source: str) -> np.ndarray:
    if not rows:
        raise ValueError(f"{source}: no rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{source}: row {i} has {len(row)} columns, expected {width}")
    return np.asarray(rows, dtype=float)


def load_path(path: str | Path) -> LatticePath:
    """Load a path from CSV (one knot per row) or a JSON array of arrays."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError(f"{path}: expected a JSON array")
        rows = [row if isinstance(row, list) else [row] for row in data]
        return LatticePath(_rectangular(rows, str(path)))
    rows = []
    for row in csv.reader(text.splitlines()):
        if not row or row[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            if rows:
                raise ValueError(f"{path}: non-numeric row {row}") from None
            continue  # header line
    return LatticePath(_rectangular(rows, str(path)))


def save_path(path: LatticePath, dest: str | Path) -> None:
    dest = Path(dest)
    if dest.suffix.lower() == ".json":
        dest.write_text(json.dumps(path.values.tolist()))
        return
    with dest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in path.values:
            writer.writerow([repr(float(v)) for v in row])
