"""Small exact linear algebra over Q.

Matrices are tuples of row tuples of :class:`~fractions.Fraction`; they are
immutable and hashable, which the orbit and height code relies on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exactnum import RationalLike, to_rational

Matrix = tuple[tuple[Fraction, ...], ...]


class SingularMatrixError(ValueError):
    pass


def as_matrix(rows: Sequence[Sequence[RationalLike]]) -> Matrix:
    m = tuple(tuple(to_rational(x) for x in row) for row in rows)
    if not m or any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged or empty matrix")
    return m


def as_square(rows: Sequence[Sequence[RationalLike]]) -> Matrix:
    m = as_matrix(rows)
    if len(m) != len(m[0]):
        raise ValueError(f"expected a square matrix, got {len(m)}x{len(m[0])}")
    return m


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), len(a[0])


def identity(d: int) -> Matrix:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(d)) for i in range(d))


def zeros(rows: int, cols: int | None = None) -> Matrix:
    cols = rows if cols is None else cols
    return tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))


def unit_matrix(d: int, i: int, j: int) -> Matrix:
    """Elementary matrix E_ij (0-based)."""
    return tuple(
        tuple(Fraction(1) if (r, c) == (i, j) else Fraction(0) for c in range(d))
        for r in range(d)
    )


def diag(*entries: RationalLike) -> Matrix:
    d = len(entries)
    return tuple(
        tuple(to_rational(entries[i]) if i == j else Fraction(0) for j in range(d))
        for i in range(d)
    )


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("shape mismatch")
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("shape mismatch")
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c: RationalLike, a: Matrix) -> Matrix:
    c = to_rational(c)
    return tuple(tuple(c * x for x in row) for row in a)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a[0]) != len(b):
        raise ValueError(f"cannot multiply {shape(a)} by {shape(b)}")
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols)
        for row in a
    )


def matvec(a: Matrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def entries(a: Matrix):
    for row in a:
        yield from row


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for x in entries(a))


def det(a: Matrix) -> Fraction:
    """Determinant by Gaussian elimination over Q."""
    n = len(a)
    m = [list(r) for r in a]
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return out


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def solve(a: Matrix, b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Unique solution of ``a x = b`` for an injective ``a`` (rows >= cols).

    Raises if the system is inconsistent or ``a`` has a kernel.
    """
    rows, cols = shape(a)
    m = [list(a[i]) + [to_rational(b[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            raise SingularMatrixError("columns are linearly dependent")
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(m[i][cols] != 0 for i in range(r, rows)):
        raise ValueError("vector is not in the column span")
    return tuple(m[i][cols] for i in range(cols))


def power(a: Matrix, n: int) -> Matrix:
    if n < 0:
        return power(inverse(a), -n)
    result = identity(len(a))
    base = a
    while n:
        if n & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        n >>= 1
    return result


def flatten(a: Matrix) -> tuple[Fraction, ...]:
    return tuple(entries(a))


def reshape(v: Sequence[Fraction], d: int) -> Matrix:
    return tuple(tuple(v[i * d:(i + 1) * d]) for i in range(d))


def format_matrix(a: Matrix) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in a)


def parse_rows(lines: Sequence[str], rows: int, cols: int) -> Matrix:
    if len(lines) != rows:
        raise ValueError(f"expected {rows} rows, got {len(lines)}")
    out = []
    for ln in lines:
        toks = ln.split()
        if len(toks) != cols:
            raise ValueError(f"expected {cols} entries per row, got {len(toks)}")
        out.append(tuple(Fraction(t) for t in toks))
    return tuple(out)
