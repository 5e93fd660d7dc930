"""Small exact linear algebra helpers over fractions.Fraction.

Vectors are tuples of Fraction, matrices are tuples of row tuples.
Everything here is immutable and hashable so root systems and measures
can use vectors as dict keys.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def vec(xs: Iterable) -> Vec:
    return tuple(Fraction(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vscale(c, a: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * x for x in a)


def vneg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def matvec(m: Mat, a: Vec) -> Vec:
    return tuple(dot(row, a) for row in m)


def matmul(m1: Mat, m2: Mat) -> Mat:
    cols = tuple(zip(*m2))
    return tuple(tuple(dot(row, col) for col in cols) for row in m1)


def identity(n: int) -> Mat:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n))


def det(m: Mat) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(m)
    a = [list(row) for row in m]
    sign = Fraction(1)
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        d *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return sign * d


def solve(m: Mat, rhs: Vec) -> Vec | None:
    """Solve m x = rhs exactly; None when m is singular."""
    n = len(m)
    a = [list(row) + [rhs[i]] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[i][n] for i in range(n))


def inverse(m: Mat) -> Mat:
    n = len(m)
    cols = [solve(m, tuple(Fraction(1 if i == j else 0) for i in range(n))) for j in range(n)]
    if any(c is None for c in cols):
        raise ValueError("matrix not invertible")
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def gram_pairing(gram: Mat):
    """Return the inner product (a, b) = a^T gram b as a function."""

    def ip(a: Vec, b: Vec) -> Fraction:
        return dot(a, matvec(gram, b))

    return ip


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s)


def vec_str(v: Sequence[Fraction]) -> list[str]:
    return [frac_str(x) for x in v]
