"""Exact linear algebra over the rationals.

Matrices are lists of lists of ``fractions.Fraction``; vectors are lists of
``Fraction``.  Everything here is small (dimensions far below 100), so plain
Gaussian elimination with exact pivoting is both fast enough and free of any
rounding concerns.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Vec = list[Fraction]
Mat = list[list[Fraction]]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to Fraction exactly")


def vec(entries: Iterable) -> Vec:
    return [frac(x) for x in entries]


def mat(rows: Iterable[Iterable]) -> Mat:
    return [vec(r) for r in rows]


def zeros(n: int, m: int) -> Mat:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Mat:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(a: Mat) -> Mat:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Mat, v: Sequence[Fraction]) -> Vec:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum(x * y for x, y in zip(u, v))


def scale(v: Sequence[Fraction], c: Fraction) -> Vec:
    return [c * x for x in v]


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vec:
    return [x + y for x, y in zip(u, v)]


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vec:
    return [x - y for x, y in zip(u, v)]


def rref(a: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form; returns (R, pivot column indices)."""
    r = [row[:] for row in a]
    nrows = len(r)
    ncols = len(r[0]) if nrows else 0
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, nrows) if r[i][col] != 0), None)
        if piv is None:
            continue
        r[row], r[piv] = r[piv], r[row]
        p = r[row][col]
        r[row] = [x / p for x in r[row]]
        for i in range(nrows):
            if i != row and r[i][col] != 0:
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return r, pivots


def nullspace(a: Mat) -> list[Vec]:
    """Basis of the exact kernel of ``a`` (columns = unknowns)."""
    if not a:
        return []
    ncols = len(a[0])
    r, pivots = rref(a)
    free = [j for j in range(ncols) if j not in pivots]
    basis: list[Vec] = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def solve(a: Mat, b: Sequence[Fraction]) -> Vec | None:
    """Exact solution of a x = b, or None if inconsistent (least structure)."""
    aug = [row[:] + [bb] for row, bb in zip(a, b)]
    r, pivots = rref(aug)
    ncols = len(a[0])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = r[i][ncols]
    # consistency of the remaining rows
    for row in r[len(pivots):]:
        if row[ncols] != 0:
            return None
    return x


def inv(a: Mat) -> Mat:
    n = len(a)
    aug = [row[:] + ident_row for row, ident_row in zip(a, identity(n))]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def det(a: Mat) -> Fraction:
    n = len(a)
    r = [row[:] for row in a]
    d = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if r[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            r[col], r[piv] = r[piv], r[col]
            d = -d
        d *= r[col][col]
        p = r[col][col]
        for i in range(col + 1, n):
            if r[i][col] != 0:
                c = r[i][col] / p
                r[i] = [x - c * y for x, y in zip(r[i], r[col])]
    return d


def to_float(a: Mat | Sequence[Fraction]) -> np.ndarray:
    return np.array(a, dtype=float)


def rationalize(x: float, max_den: int = 10**6, tol: float = 1e-9) -> Fraction:
    """Nearest small-denominator rational; raises if not within ``tol``."""
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) > tol:
        raise ValueError(f"{x} is not rational within {tol}")
    return f
