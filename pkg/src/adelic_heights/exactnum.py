"""Exact rationals, p-adic valuations and scalar Weil heights.

Everything here is exact: rationals are :class:`fractions.Fraction`, absolute
values are returned as exact powers of ``p`` and heights as exact rationals.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from numbers import Rational as _RationalABC
from typing import Iterable, Union

from sympy import factorint, isprime

Rational = Fraction
RationalLike = Union[int, Fraction, str]

# v_p(0); compares above every integer.
INFINITY = float("inf")

REAL = "real"
FINITE = "finite"
GLOBAL = "global"


def to_rational(x: RationalLike) -> Fraction:
    """Coerce ``x`` to an exact Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@lru_cache(maxsize=256)
def _is_prime(p: int) -> bool:
    return bool(isprime(p))


def check_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not _is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


def int_valuation(n: int, p: int) -> int:
    """Multiplicity of ``p`` in the nonzero integer ``n`` (no primality check)."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: RationalLike, p: int) -> Union[int, float]:
    """p-adic valuation of a rational; ``INFINITY`` for zero.

    >>> valuation(50, 5), valuation(Fraction(8, 9), 3)
    (2, -2)
    """
    check_prime(p)
    x = to_rational(x)
    if x == 0:
        return INFINITY
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def abs_p(x: RationalLike, p: int) -> Fraction:
    """Normalised p-adic absolute value ``p**(-v_p(x))`` as an exact rational."""
    v = valuation(x, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(p) ** (-v)


def abs_real(x: RationalLike) -> Fraction:
    return abs(to_rational(x))


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of a positive integer, ascending."""
    if n < 1:
        raise ValueError("expected a positive integer")
    return sorted(factorint(n))


def height_p(v: Iterable[RationalLike], p: int) -> Fraction:
    """``max(1, |w_i|_p)`` over the coordinates."""
    check_prime(p)
    best = Fraction(1)
    for w in v:
        a = abs_p(w, p)
        if a > best:
            best = a
    return best


def height_real(v: Iterable[RationalLike]) -> Fraction:
    best = Fraction(1)
    for w in v:
        a = abs_real(w)
        if a > best:
            best = a
    return best


def height_finite(v: Iterable[RationalLike]) -> Fraction:
    """Product of the local heights over all primes.

    Only primes dividing a denominator contribute, so we factor the lcm of the
    denominators and multiply the corresponding p-heights.
    """
    coords = [to_rational(w) for w in v]
    den = reduce(lcm, (w.denominator for w in coords), 1)
    out = Fraction(1)
    for p in prime_factors(den):
        out *= height_p(coords, p)
    return out


def height_tuple(v: Iterable[RationalLike], place: Union[str, int]) -> Fraction:
    """Affine Weil height of a point with rational coordinates at ``place``.

    ``place`` is ``REAL``, a prime number, ``FINITE`` (product over primes) or
    ``GLOBAL`` (real times finite).
    """
    coords = [to_rational(w) for w in v]
    if not coords:
        raise ValueError("height of an empty tuple")
    if place == REAL:
        return height_real(coords)
    if place == FINITE:
        return height_finite(coords)
    if place == GLOBAL:
        return height_real(coords) * height_finite(coords)
    if isinstance(place, int) and not isinstance(place, bool):
        return height_p(coords, place)
    raise ValueError(f"unknown place {place!r}")


def gm_heights(t: RationalLike) -> tuple[Fraction, int]:
    """Real and finite heights of ``t`` under the embedding ``t -> (t, 1/t)``.

    Returns ``(max(|t|, |1/t|), |n*m|)`` for ``t = n/m`` reduced.
    """
    t = to_rational(t)
    if t == 0:
        raise ValueError("gm_heights needs a nonzero rational")
    h_real = max(abs(t), abs(1 / t))
    h_fin = abs(t.numerator * t.denominator)
    return h_real, h_fin


def omega(n: int) -> int:
    """Number of distinct prime factors of ``n >= 1``."""
    return len(prime_factors(n))


def lcm_range(d: int) -> int:
    """lcm(1, ..., d)."""
    return reduce(lcm, range(1, d + 1), 1)


def is_p_integral(x: RationalLike, p: int) -> bool:
    return to_rational(x).denominator % p != 0


def reduce_mod(x: RationalLike, p: int, n: int) -> int:
    """Residue in ``[0, p**n)`` of a p-integral rational."""
    x = to_rational(x)
    m = p ** n
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


def ilog(n: int, p: int) -> int:
    """Largest ``j`` with ``p**j <= n`` (``n >= 1``)."""
    j = 0
    q = p
    while q <= n:
        q *= p
        j += 1
    return j


__all__ = [
    "FINITE", "GLOBAL", "INFINITY", "REAL", "Rational",
    "abs_p", "abs_real", "check_prime", "gm_heights", "height_finite",
    "height_p", "height_real", "height_tuple", "ilog", "int_valuation",
    "is_p_integral", "lcm_range", "omega", "prime_factors", "reduce_mod",
    "to_rational", "valuation",
]
