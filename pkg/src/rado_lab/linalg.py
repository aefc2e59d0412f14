"""Exact rational vectors and small dense linear algebra.

Vectors are plain tuples of ``fractions.Fraction``; matrices are tuples of
row vectors.  Everything here is exact -- no floats, no tolerances -- and
deterministic, which the rest of the library relies on for reproducible
floor-of-norm comparisons.
"""

from __future__ import annotations

from fractions import Fraction as Q
from typing import Iterable, Sequence

from .errors import DimensionMismatch, SingularMatrix

Vec = tuple[Q, ...]
Matrix = tuple[Vec, ...]


def vec(values: Iterable) -> Vec:
    """Coerce an iterable of exact numbers to a vector of Fractions."""
    return tuple(Q(v) for v in values)


def zero_vec(dim: int) -> Vec:
    return (Q(0),) * dim


def _check_dims(x: Vec, y: Vec) -> None:
    if len(x) != len(y):
        raise DimensionMismatch(f"length {len(x)} vs {len(y)}")


def vadd(x: Vec, y: Vec) -> Vec:
    _check_dims(x, y)
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vec, y: Vec) -> Vec:
    _check_dims(x, y)
    return tuple(a - b for a, b in zip(x, y))


def vneg(x: Vec) -> Vec:
    return tuple(-a for a in x)


def vscale(c, x: Vec) -> Vec:
    c = Q(c)
    return tuple(c * a for a in x)


def vdot(x: Vec, y: Vec) -> Q:
    _check_dims(x, y)
    return sum((a * b for a, b in zip(x, y)), Q(0))


def is_zero_vec(x: Vec) -> bool:
    return all(a == 0 for a in x)


def matvec(rows: Matrix, x: Vec) -> Vec:
    return tuple(vdot(row, x) for row in rows)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = transpose(b)
    return tuple(tuple(vdot(row, col) for col in cols) for row in a)


def transpose(rows: Matrix) -> Matrix:
    return tuple(zip(*rows)) if rows else ()


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(n)) for i in range(n))


def rref(rows: Sequence[Vec]) -> tuple[list[list[Q]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = Q(1) / m[r][c]
        m[r] = [inv * a for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Vec]) -> int:
    return len(rref(rows)[1])


def in_span(x: Vec, vectors: Sequence[Vec]) -> bool:
    """Exact membership of x in the linear span of the given vectors."""
    if is_zero_vec(x):
        return True
    if not vectors:
        return False
    base = rank(vectors)
    return rank(list(vectors) + [x]) == base


def independent_subset(vectors: Sequence[Vec], limit: int | None = None) -> list[Vec]:
    """Greedy maximal independent subset, in the order given."""
    chosen: list[Vec] = []
    for v in vectors:
        if limit is not None and len(chosen) == limit:
            break
        if not in_span(v, chosen):
            chosen.append(v)
    return chosen


def span_basis(vectors: Sequence[Vec]) -> tuple[Vec, ...]:
    """Deterministic basis of the span (greedy over the input order)."""
    return tuple(independent_subset(vectors))


def solve_columns(columns: Sequence[Vec], b: Vec) -> Vec:
    """Solve sum_i x_i * columns[i] = b for a square independent column set."""
    n = len(columns)
    if n == 0 or any(len(c) != n for c in columns) or len(b) != n:
        raise DimensionMismatch("solve_columns needs a square system")
    aug = [[columns[j][i] for j in range(n)] + [b[i]] for i in range(n)]
    reduced, pivots = rref(aug)
    if pivots[: n if len(pivots) >= n else len(pivots)] != list(range(n)):
        if n in pivots:
            raise SingularMatrix("inconsistent system")
        raise SingularMatrix("singular column set")
    return tuple(reduced[i][n] for i in range(n))


def invert(rows: Matrix) -> Matrix:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("invert needs a square matrix")
    aug = [list(rows[i]) + [Q(1) if j == i else Q(0) for j in range(n)] for i in range(n)]
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return tuple(tuple(reduced[i][n:]) for i in range(n))
