"""Seeded generators of test matrices for the experiment suites."""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg as la
from .lattice_heights import LatticeHom, random_unimodular
from .linalg import Matrix


def _unit(rng: random.Random, p: int, spread: int = 20) -> int:
    while True:
        u = rng.randint(-spread, spread)
        if u % p:
            return u


def _conjugate_unimodular(rng: random.Random, m: Matrix) -> Matrix:
    u = random_unimodular(rng, len(m), steps=rng.randint(0, 4), spread=2)
    return la.matmul(la.matmul(u.matrix, m), u.inverse)


def _triangular(rng: random.Random, p: int, d: int, level: int, max_neg: int) -> Matrix:
    """``p**level * D + N``: diagonal divisible by ``p**level``, strictly upper ``N``
    with denominators up to ``p**max_neg``."""
    rows = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        if rng.random() < 0.8:
            rows[i][i] = Fraction(p ** level * rng.randint(-5, 5))
        for j in range(i + 1, d):
            if rng.random() < 0.7:
                rows[i][j] = Fraction(_unit(rng, p), p ** rng.randint(0, max_neg))
    return la.as_matrix(rows)


def random_exp_matrix(rng: random.Random, p: int, d: int, max_neg: int = 2) -> Matrix:
    """A matrix on which the exponential series is certified to converge.

    Half the time the entries are small (valuation past ``1/(p-1)``); otherwise
    a unimodular conjugate of a triangular matrix whose characteristic
    polynomial lies in ``T**d + p**k Z_p[T]`` with ``d < k(p-1)``, which may
    have large denominators.
    """
    if rng.random() < 0.5:
        vmin = 2 if p == 2 else 1
        m = [[Fraction(p ** rng.randint(vmin, vmin + 2) * rng.randint(-9, 9)) for _ in range(d)]
             for _ in range(d)]
        return la.as_matrix(m)
    level = d // (p - 1) + 1
    return _conjugate_unimodular(rng, _triangular(rng, p, d, level, max_neg))


def random_log_matrix(rng: random.Random, p: int, d: int, max_neg: int = 3) -> Matrix:
    """A matrix ``Y`` with characteristic polynomial in ``T**d + p Z_p[T]``."""
    if rng.random() < 0.15 and d >= 2:
        k = rng.randint(1, max_neg)
        y = la.scale(Fraction(1, p ** k), la.unit_matrix(d, 0, d - 1))
        return y
    return _conjugate_unimodular(rng, _triangular(rng, p, d, 1, max_neg))


def random_hom(rng: random.Random, rows: int, cols: int, primes=(2, 3, 5, 7), max_exp: int = 3) -> LatticeHom:
    entries = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            den = 1
            for q in primes:
                if rng.random() < 0.3:
                    den *= q ** rng.randint(1, max_exp)
            row.append(Fraction(rng.randint(-50, 50), den))
        entries.append(row)
    return LatticeHom.from_rows(entries)
