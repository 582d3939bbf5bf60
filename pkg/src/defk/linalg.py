"""Exact linear algebra over a division ring.

Vectors are row vectors (tuples); matrices are tuples of rows and act on the
right, ``v -> v @ A``. Subspaces are *left* row spaces: closed under
``v -> s * v``. Every routine is written so it stays correct when the ring is
not commutative.
"""
from __future__ import annotations

from typing import Sequence

from .errors import ShapeError, Singular
from .fields import DivisionRing

Row = tuple
Matrix = tuple  # tuple[Row, ...]


def identity(F: DivisionRing, n: int) -> Matrix:
    return tuple(tuple(F.one if i == j else F.zero for j in range(n)) for i in range(n))


def zero_row(F: DivisionRing, n: int) -> Row:
    return (F.zero,) * n


def is_zero_row(F: DivisionRing, v: Sequence) -> bool:
    z = F.zero
    return all(x == z for x in v)


def row_add(F, u, v) -> Row:
    return tuple(F.add(a, b) for a, b in zip(u, v))


def row_sub(F, u, v) -> Row:
    return tuple(F.sub(a, b) for a, b in zip(u, v))


def row_scale(F, s, v) -> Row:
    """Left scalar multiple ``s * v``."""
    return tuple(F.mul(s, a) for a in v)


def vec_mat(F: DivisionRing, v: Sequence, A: Matrix) -> Row:
    if len(v) != len(A):
        raise ShapeError(f"vector of length {len(v)} times {len(A)}-row matrix")
    ncols = len(A[0]) if A else 0
    out = [F.zero] * ncols
    for a, row in zip(v, A):
        if a == F.zero:
            continue
        for j, x in enumerate(row):
            if x != F.zero:
                out[j] = F.add(out[j], F.mul(a, x))
    return tuple(out)


def mat_mul(F: DivisionRing, A: Matrix, B: Matrix) -> Matrix:
    return tuple(vec_mat(F, row, B) for row in A)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def rref_transform(F: DivisionRing, rows: Sequence[Row], ncols: int):
    """Reduced row echelon form with the left transform.

    Returns ``(R, T, pivots)`` with ``T @ rows == R``, ``T`` invertible, the
    first ``len(pivots)`` rows of ``R`` nonzero with leading 1 in the pivot
    columns and the remaining rows zero.
    """
    R = [list(r) for r in rows]
    m = len(R)
    T = [list(r) for r in identity(F, m)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if R[i][c] != F.zero), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        T[r], T[piv] = T[piv], T[r]
        s = F.inv(R[r][c])
        R[r] = [F.mul(s, x) for x in R[r]]
        T[r] = [F.mul(s, x) for x in T[r]]
        for i in range(m):
            f = R[i][c]
            if i != r and f != F.zero:
                R[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(R[i], R[r])]
                T[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(T[i], T[r])]
        pivots.append(c)
        r += 1
    return tuple(map(tuple, R)), tuple(map(tuple, T)), tuple(pivots)


def rref(F: DivisionRing, rows: Sequence[Row], ncols: int) -> Matrix:
    """Canonical basis (nonzero RREF rows) of the left row space."""
    if not rows:
        return ()
    R, _, pivots = rref_transform(F, rows, ncols)
    return R[: len(pivots)]


def pivots_of(F: DivisionRing, basis: Matrix) -> tuple[int, ...]:
    return tuple(next(j for j, x in enumerate(row) if x != F.zero) for row in basis)


def reduce_mod(F: DivisionRing, basis: Matrix, v: Row) -> Row:
    """Canonical representative of ``v`` modulo the row space of an RREF basis."""
    v = list(v)
    for row, p in zip(basis, pivots_of(F, basis)):
        f = v[p]
        if f != F.zero:
            v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
    return tuple(v)


def in_span(F: DivisionRing, basis: Matrix, v: Row) -> bool:
    return is_zero_row(F, reduce_mod(F, basis, v))


def coordinates(F: DivisionRing, basis: Matrix, v: Row) -> Row | None:
    """Coefficients ``c`` with ``c @ basis == v`` for an RREF basis, else None."""
    if not in_span(F, basis, v):
        return None
    return tuple(v[p] for p in pivots_of(F, basis))


def left_kernel(F: DivisionRing, A: Matrix, nrows: int, ncols: int) -> Matrix:
    """RREF basis of ``{x : x @ A == 0}`` (x of length ``nrows``)."""
    if nrows == 0:
        return ()
    if ncols == 0:
        return identity(F, nrows)
    _, T, pivots = rref_transform(F, A, ncols)
    return rref(F, T[len(pivots):], nrows)


def solve_left(F: DivisionRing, A: Matrix, b: Row) -> Row | None:
    """Some ``x`` with ``x @ A == b``, or None when inconsistent."""
    nrows = len(A)
    if nrows == 0:
        return () if is_zero_row(F, b) else None
    R, T, pivots = rref_transform(F, A, len(b))
    c = coordinates(F, R[: len(pivots)], b)
    if c is None:
        return None
    return vec_mat(F, c, T[: len(pivots)]) if pivots else zero_row(F, nrows)


def invert(F: DivisionRing, A: Matrix) -> Matrix:
    n = len(A)
    if any(len(r) != n for r in A):
        raise ShapeError("inverse of a non-square matrix")
    if n == 0:
        return ()
    _, T, pivots = rref_transform(F, A, n)
    if len(pivots) < n:
        raise Singular("matrix is not invertible")
    return T


def rank(F: DivisionRing, A: Matrix, ncols: int) -> int:
    return len(rref(F, A, ncols))


def complete_basis(F: DivisionRing, basis: Matrix, n: int) -> Matrix:
    """An invertible n x n matrix whose first rows are ``basis`` (RREF input)."""
    piv = set(pivots_of(F, basis))
    extra = [tuple(F.one if j == c else F.zero for j in range(n)) for c in range(n) if c not in piv]
    return tuple(basis) + tuple(extra)


def dieudonne_det(F: DivisionRing, A: Matrix):
    """Dieudonne determinant class of ``A`` in R^x/[R^x, R^x] (normal form).

    Row reduction to upper-triangular form using swaps and left transvections;
    the class is the product of the diagonal classes times the class of -1 per
    swap. Raises :class:`Singular` for non-invertible input.
    """
    n = len(A)
    if any(len(r) != n for r in A):
        raise ShapeError("determinant of a non-square matrix")
    M = [list(r) for r in A]
    cls = F.class_one
    minus_one = F.unit_class(F.neg(F.one))
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != F.zero), None)
        if piv is None:
            raise Singular("matrix is not invertible")
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            cls = F.class_mul(cls, minus_one)
        pinv = F.inv(M[c][c])
        for i in range(c + 1, n):
            if M[i][c] != F.zero:
                f = F.mul(M[i][c], pinv)
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[c])]
        cls = F.class_mul(cls, F.unit_class(M[c][c]))
    return cls
