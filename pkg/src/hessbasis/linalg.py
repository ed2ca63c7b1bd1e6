"""Exact dense linear algebra over Q and cyclotomic fields.

Determinants use fraction-free (Bareiss) elimination.  Rational matrices are
first scaled row-wise to integers so the elimination runs on Python ints.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .exact_arith import CycloScalar, Scalar, demote, inverse

Matrix = Sequence[Sequence[Scalar]]


def _all_rational(mat: Matrix) -> bool:
    for row in mat:
        for x in row:
            if isinstance(x, CycloScalar) and not x.is_rational():
                return False
    return True


def _bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (akk * rowi[j] - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _bareiss_field(a: list[list[Scalar]]) -> Scalar:
    n = len(a)
    sign = 1
    prev: Scalar = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if piv is None:
                return Fraction(0)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        inv_prev = inverse(prev)
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                a[i][j] = (akk * a[i][j] - aik * a[k][j]) * inv_prev
            a[i][k] = Fraction(0)
        prev = akk
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


def determinant(mat: Matrix) -> Scalar:
    """Exact determinant; returns a Fraction when the value is rational."""
    n = len(mat)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in mat):
        raise ValueError("determinant of a non-square matrix")
    if _all_rational(mat):
        rows = [[Fraction(demote(x)) for x in row] for row in mat]
        scale = Fraction(1)
        ints = []
        for row in rows:
            den = lcm(*(x.denominator for x in row))
            scale *= den
            ints.append([int(x * den) for x in row])
        return Fraction(_bareiss_int(ints)) / scale
    work = [list(row) for row in mat]
    return demote(_bareiss_field(work))


def rref(mat: Matrix) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan, exact)."""
    a = [list(row) for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = inverse(a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(mat: Matrix) -> int:
    if not mat:
        return 0
    return len(rref(mat)[1])


class InconsistentSystem(ValueError):
    pass


def solve_unique(mat: Matrix, rhs: Sequence[Scalar]) -> list[Scalar]:
    """Solve mat @ x = rhs, requiring full column rank.

    Raises ``InconsistentSystem`` when no solution exists and ``ValueError``
    when the solution is not unique.
    """
    cols = len(mat[0]) if mat else 0
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    red, pivots = rref(aug)
    if cols in pivots:
        raise InconsistentSystem("linear system has no solution")
    if len(pivots) < cols:
        raise ValueError(f"solution not unique: rank {len(pivots)} < {cols} unknowns")
    x: list[Scalar] = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = demote(red[i][cols])
    return x


def matmul(a: Matrix, b: Matrix) -> list[list[Scalar]]:
    bt = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc: Scalar = Fraction(0)
            for x, y in zip(row, col):
                if x != 0 and y != 0:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> list[list[Scalar]]:
    return [list(col) for col in zip(*a)]


def inverse_matrix(a: Matrix) -> list[list[Scalar]]:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [[demote(x) for x in row[n:]] for row in red]
