"""Finite subgroups of GL(N, Z) and reduction modulo 3.

The kernel of ``GL(N, Z) -> GL(N, Z/3)`` is torsion free, so every finite
subgroup of ``GL(N, Z)`` embeds in ``GL(N, Z/3)`` and has order at most
``|GL(N, Z/3)|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from . import _kernels as K
from .exactnum import check_prime

ORDERS = (2, 3, 4, 5, 6)


def gl_order(n: int, q: int = 3) -> int:
    """``|GL(n, F_q)| = q**(n(n-1)/2) * prod_{i=1..n} (q**i - 1)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    check_prime(q)
    return q ** (n * (n - 1) // 2) * prod(q ** i - 1 for i in range(1, n + 1))


def minkowski_constant(n: int) -> int:
    return gl_order(n, 3)


def count_gl_by_enumeration(n: int, q: int = 3) -> int:
    """Count invertible matrices over ``F_q`` by running through all of them."""
    check_prime(q)
    if q ** (n * n) > 10 ** 9:
        raise ValueError("enumeration too large")
    return int(K.count_invertible_mod(n, q))


def default_search_bound(n: int) -> int:
    """Entry bound for the torsion box search.

    For ``n <= 2`` every finite-order element is conjugate in ``GL(n, Z)`` to
    one with entries in ``[-1, 1]``; since the reduction kernel is normal,
    checking such representatives is exhaustive. We search a box of radius 2
    to leave a margin. For ``n = 3`` the radius 1 box already contains the
    standard representatives (signed permutations and the companion matrices
    of the cyclotomic factors of degree at most 3).
    """
    return 2 if n <= 2 else 1


@dataclass(frozen=True)
class TorsionScan:
    n: int
    modulus: int
    bound: int
    finite_order: int
    violations: int
    witness: tuple[tuple[int, ...], ...] | None

    @property
    def torsion_free(self) -> bool:
        return self.violations == 0


def torsion_scan(n: int, modulus: int = 3, bound: int | None = None,
                 max_order: int = max(ORDERS)) -> TorsionScan:
    """Look for nontrivial finite-order matrices congruent to 1 mod ``modulus``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    bound = default_search_bound(n) if bound is None else bound
    if (2 * bound + 1) ** (n * n) > 5 * 10 ** 8:
        raise ValueError("search box too large")
    w = np.zeros((n, n), dtype=np.int64)
    finite, bad = K.torsion_scan(n, bound, modulus, max_order, w)
    witness = tuple(tuple(int(x) for x in row) for row in w) if bad else None
    return TorsionScan(n, modulus, bound, int(finite), int(bad), witness)


def is_torsion_witness(a, modulus: int, max_order: int = max(ORDERS)) -> bool:
    """Whether ``a`` is a nontrivial element of finite order ``<= max_order`` that is 1 mod ``modulus``."""
    m = np.array([[int(x) for x in row] for row in a], dtype=np.int64)
    n = len(m)
    ident = np.eye(n, dtype=np.int64)
    if np.array_equal(m, ident) or ((m - ident) % modulus).any():
        return False
    pw = m.copy()
    for _ in range(max_order):
        if np.array_equal(pw, ident):
            return True
        pw = pw @ m
    return False


def minkowski_torsion_check(n: int, modulus: int = 3, bound: int | None = None) -> bool:
    """True when no element of order 2..6 in the box reduces to the identity."""
    return torsion_scan(n, modulus, bound).torsion_free


__all__ = [
    "ORDERS", "TorsionScan", "count_gl_by_enumeration", "default_search_bound",
    "gl_order", "is_torsion_witness", "minkowski_constant", "minkowski_torsion_check", "torsion_scan",
]
