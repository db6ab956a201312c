"""Heights of linear maps between based lattices.

A :class:`LatticeHom` is the exact rational matrix of a map ``m -> gl(d)`` in
fixed bases of ``m_Z`` and ``gl(d, Z)``. Its p-height is the least power of
``p`` clearing the p-part of every denominator; the finite height is the
product of these, i.e. the lcm of all denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Sequence

from . import linalg as la
from .exactnum import (
    RationalLike,
    check_prime,
    int_valuation,
    prime_factors,
    to_rational,
)
from .linalg import Matrix


@dataclass(frozen=True)
class LatticeHom:
    rows: int
    cols: int
    entries: Matrix

    def __post_init__(self):
        if la.shape(self.entries) != (self.rows, self.cols):
            raise ValueError(
                f"entries have shape {la.shape(self.entries)}, expected {(self.rows, self.cols)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "LatticeHom":
        m = la.as_matrix(rows)
        return cls(len(m), len(m[0]), m)

    def format(self) -> str:
        return f"{self.rows} {self.cols}\n{la.format_matrix(self.entries)}\n"

    @classmethod
    def parse(cls, text: str) -> "LatticeHom":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        try:
            r, c = (int(t) for t in lines[0].split())
        except (IndexError, ValueError) as exc:
            raise ValueError("header must be 'rows cols'") from exc
        return cls(r, c, la.parse_rows(lines[1:], r, c))


@dataclass(frozen=True)
class IntegralAutomorphism:
    """Automorphism of ``Z^n`` (or of ``Z_p^n`` when ``prime`` is set).

    Globally the determinant must be +-1; with ``prime`` set, entries of the
    matrix and its inverse must be p-integral.
    """

    matrix: Matrix
    inverse: Matrix
    prime: int | None = None

    def __post_init__(self):
        n = len(self.matrix)
        if la.shape(self.matrix) != (n, n) or la.shape(self.inverse) != (n, n):
            raise ValueError("automorphism must be square")
        if la.matmul(self.matrix, self.inverse) != la.identity(n):
            raise ValueError("inverse does not invert the matrix")
        if self.prime is None:
            ok = all(x.denominator == 1 for x in la.entries(self.matrix)) and \
                all(x.denominator == 1 for x in la.entries(self.inverse))
            if not ok or abs(la.det(self.matrix)) != 1:
                raise ValueError("not unimodular over Z")
        else:
            p = check_prime(self.prime)
            if any(x.denominator % p == 0 for x in la.entries(self.matrix)) or \
                    any(x.denominator % p == 0 for x in la.entries(self.inverse)):
                raise ValueError(f"not an automorphism of Z_{p}^n")

    @classmethod
    def of(cls, rows: Sequence[Sequence[RationalLike]], prime: int | None = None) -> "IntegralAutomorphism":
        m = la.as_square(rows)
        return cls(m, la.inverse(m), prime)

    @property
    def size(self) -> int:
        return len(self.matrix)


def _denominator_exponent(x: Fraction, p: int) -> int:
    return int_valuation(x.denominator, p) if x.denominator % p == 0 else 0


def hom_height_p(phi: LatticeHom, p: int) -> int:
    """Least ``p**k`` (``k >= 0``) with ``p**k * phi`` integral at ``p``."""
    check_prime(p)
    k = max((_denominator_exponent(x, p) for x in la.entries(phi.entries)), default=0)
    return p ** k


def hom_height_f(phi: LatticeHom) -> int:
    """Least ``n >= 1`` with ``n * phi`` integral: the lcm of the denominators."""
    return reduce(lcm, (x.denominator for x in la.entries(phi.entries)), 1)


def height_primes(phi: LatticeHom) -> list[int]:
    return prime_factors(hom_height_f(phi))


def compose_with_automorphisms(phi: LatticeHom, k: IntegralAutomorphism,
                               u: IntegralAutomorphism) -> LatticeHom:
    """``k o phi o u`` with ``k`` acting on the target and ``u`` on the source."""
    if k.size != phi.rows or u.size != phi.cols:
        raise ValueError(
            f"cannot compose {k.size}x{k.size} o {phi.rows}x{phi.cols} o {u.size}x{u.size}")
    return LatticeHom(phi.rows, phi.cols, la.matmul(la.matmul(k.matrix, phi.entries), u.matrix))


def standard_basis(d: int) -> list[Matrix]:
    """E_11, E_12, ..., E_dd in row-major order."""
    return [la.unit_matrix(d, i, j) for i in range(d) for j in range(d)]


def conjugate_representation(g: Sequence[Sequence[RationalLike]],
                             basis_m: Sequence[Sequence[Sequence[RationalLike]]],
                             basis_g: Sequence[Sequence[Sequence[RationalLike]]] | None = None,
                             ) -> LatticeHom:
    """Matrix of ``X -> g X g^-1`` on ``span(basis_m)`` in the basis ``basis_g``.

    ``basis_g`` defaults to the standard basis of ``gl(d)``; column ``j`` holds
    the coordinates of ``g basis_m[j] g^-1``.
    """
    g = la.as_square(g)
    d = len(g)
    try:
        g_inv = la.inverse(g)
    except la.SingularMatrixError as exc:
        raise ValueError("conjugator is singular") from exc
    ms = [la.as_square(b) for b in basis_m]
    if not ms:
        raise ValueError("empty basis for m")
    targets = [la.as_square(b) for b in basis_g] if basis_g is not None else standard_basis(d)
    if any(len(b) != d for b in ms + targets):
        raise ValueError("basis matrices must match the conjugator size")
    target_cols = la.transpose(tuple(la.flatten(b) for b in targets))
    if len(ms) > 1:
        # independence of the source basis
        src = la.transpose(tuple(la.flatten(b) for b in ms))
        _check_independent(src)
    cols = []
    for b in ms:
        image = la.matmul(la.matmul(g, b), g_inv)
        cols.append(la.solve(target_cols, la.flatten(image)))
    return LatticeHom(len(targets), len(ms), la.transpose(tuple(cols)))


def _check_independent(cols: Matrix) -> None:
    rows, n = la.shape(cols)
    m = [list(r) for r in cols]
    rank = 0
    for c in range(n):
        piv = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if piv is None:
            raise ValueError("basis of m is linearly dependent")
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rows):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1


def random_unimodular(rng, n: int, steps: int = 8, spread: int = 3) -> IntegralAutomorphism:
    """Product of random elementary integer operations and sign flips."""
    m = [list(r) for r in la.identity(n)]
    inv = [list(r) for r in la.identity(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if n > 1 and rng.random() < 0.8:
            c = rng.randint(-spread, spread)
            # row_i += c row_j on m; column_j -= c column_i on the inverse
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
            for r in range(n):
                inv[r][j] -= c * inv[r][i]
        else:
            m[i] = [-a for a in m[i]]
            for r in range(n):
                inv[r][i] = -inv[r][i]
    return IntegralAutomorphism(la.as_square(m), la.as_square(inv))


def scalar_hom(value: RationalLike) -> LatticeHom:
    return LatticeHom(1, 1, ((to_rational(value),),))
