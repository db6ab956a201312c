"""p-adic matrix exponential and logarithm with certified truncation.

Series are summed exactly over Q up to an index past which every remaining term
has norm below ``p**-N``; the exact partial sum is then reduced once into a
:class:`PadicMatrix` at absolute precision ``N``.

Two certificates bound the terms of ``Z**n``:

* the characteristic-polynomial certificate: if every non-leading coefficient of
  the characteristic polynomial of ``Z`` has valuation ``>= k``, then
  ``Z**n`` lies in ``p**(k*floor(n/d)) * (Z_p + Z_p Z + ... + Z_p Z**(d-1))``, so
  ``||Z**n|| <= p**(-k*floor(n/d)) * H_p(Z)**(d-1)``;
* the norm certificate ``||Z**n|| <= ||Z||**n``.

Whichever gives the earlier truncation index is used.

Characteristic polynomials are the conventional monic ``det(T*I - Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import linalg as la
from .exactnum import (
    INFINITY,
    RationalLike,
    check_prime,
    int_valuation,
    reduce_mod,
    to_rational,
    valuation,
)
from .linalg import Matrix

MAX_PRECISION = 4096


class ConvergenceError(ValueError):
    """Raised when no certificate shows that a series converges.

    ``k`` is the largest level with every non-leading characteristic
    coefficient in ``p**k Z_p`` (``None`` when some coefficient is not
    p-integral).
    """

    def __init__(self, message: str, k: Union[int, float, None] = None):
        super().__init__(message)
        self.k = k


class BoundViolation(ArithmeticError):
    """A proved norm bound failed on a computed value."""


@dataclass(frozen=True)
class PadicMatrix:
    """Square matrix over Q_p at capped absolute precision.

    Entry ``(i, j)`` represents ``residues[i][j] * p**(-shift)`` and is known
    modulo ``p**precision``; residues live in ``[0, p**(precision + shift))``.
    """

    p: int
    d: int
    shift: int
    precision: int
    residues: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        check_prime(self.p)
        if self.d < 1 or self.shift < 0 or self.precision < 1:
            raise ValueError("need d >= 1, shift >= 0, precision >= 1")
        if len(self.residues) != self.d or any(len(r) != self.d for r in self.residues):
            raise ValueError("residue array has the wrong shape")
        mod = self.modulus
        if any(not 0 <= r < mod for row in self.residues for r in row):
            raise ValueError("residues must be reduced modulo p**(precision + shift)")

    @property
    def modulus(self) -> int:
        return self.p ** (self.precision + self.shift)

    @classmethod
    def from_rationals(cls, rows: Sequence[Sequence[RationalLike]], p: int,
                       precision: int, shift: int | None = None) -> "PadicMatrix":
        m = la.as_square(rows)
        check_prime(p)
        if shift is None:
            shift = max(0, -min_valuation(m, p)) if not la.is_zero(m) else 0
        scale = Fraction(p) ** shift
        res = tuple(
            tuple(reduce_mod(x * scale, p, precision + shift) for x in row) for row in m
        )
        return cls(p, len(m), shift, precision, res)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(self.residues[i][j], self.p ** self.shift)

    def to_rationals(self) -> Matrix:
        """Canonical rational lift of every entry."""
        return tuple(tuple(self.entry(i, j) for j in range(self.d)) for i in range(self.d))

    def congruent(self, other: Sequence[Sequence[RationalLike]], precision: int | None = None) -> bool:
        """Whether ``other`` agrees with this matrix modulo ``p**precision``."""
        n = self.precision if precision is None else precision
        if n > self.precision:
            raise ValueError("cannot compare beyond the known precision")
        other = la.as_square(other)
        if len(other) != self.d:
            return False
        for i in range(self.d):
            for j in range(self.d):
                diff = other[i][j] - self.entry(i, j)
                if diff != 0 and valuation(diff, self.p) < n:
                    return False
        return True

    def format(self) -> str:
        head = f"{self.p} {self.d} {self.shift} {self.precision}"
        return head + "\n" + la.format_matrix(self.to_rationals()) + "\n"

    @classmethod
    def parse(cls, text: str) -> "PadicMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        try:
            p, d, s, n = (int(t) for t in lines[0].split())
        except (IndexError, ValueError) as exc:
            raise ValueError("header must be 'p d s N'") from exc
        values = la.parse_rows(lines[1:], d, d)
        return cls.from_rationals(values, p, n, shift=s)


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial ``T**d + c[d-1] T**(d-1) + ... + c[0]``."""

    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def __call__(self, t: RationalLike) -> Fraction:
        t = to_rational(t)
        acc = Fraction(1)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def __str__(self) -> str:
        terms = [f"T^{self.degree}"]
        for i in range(self.degree - 1, -1, -1):
            c = self.coefficients[i]
            if c:
                mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                coef = "" if (mag == 1 and mono) else str(mag)
                terms.append(f"{sign} {coef}{mono}")
        return " ".join(terms)


Operand = Union[PadicMatrix, Sequence[Sequence[RationalLike]]]


def _coerce(z: Operand) -> Matrix:
    if isinstance(z, PadicMatrix):
        return z.to_rationals()
    return la.as_square(z)


def min_valuation(m: Matrix, p: int) -> Union[int, float]:
    return min((valuation(x, p) for x in la.entries(m)), default=INFINITY)


def height_exponent(z: Matrix, p: int) -> int:
    """``h`` with ``H_p(z) = p**h``."""
    v = min_valuation(z, p)
    return 0 if v == INFINITY else max(0, -v)


def matrix_norm(z: Operand, p: int | None = None) -> Fraction:
    """Largest p-adic absolute value of an entry; 0 for the zero matrix.

    For a :class:`PadicMatrix`, entries that vanish modulo ``p**precision`` are
    read as zero.
    """
    if isinstance(z, PadicMatrix):
        p = z.p
        m = z.to_rationals()
    else:
        if p is None:
            raise TypeError("p is required for rational matrices")
        m = la.as_square(z)
    v = min_valuation(m, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(p) ** (-v)


def local_height(z: Operand, p: int | None = None) -> Fraction:
    return max(Fraction(1), matrix_norm(z, p))


def char_poly(z: Operand) -> CharPoly:
    """Characteristic polynomial ``det(T*I - Z)`` by Faddeev-LeVerrier over Q."""
    a = _coerce(z)
    d = len(a)
    coeffs = [Fraction(0)] * d
    m = la.zeros(d)
    c_prev = Fraction(1)
    ident = la.identity(d)
    for k in range(1, d + 1):
        m = la.add(la.matmul(a, m), la.scale(c_prev, ident))
        c = -la.trace(la.matmul(a, m)) / k
        coeffs[d - k] = c
        c_prev = c
    return CharPoly(tuple(coeffs))


def chi_level(z: Operand, p: int) -> Union[int, float, None]:
    """Largest ``k`` with every non-leading coefficient in ``p**k Z_p``.

    ``INFINITY`` when the polynomial is ``T**d``; ``None`` when a coefficient
    is not p-integral.
    """
    if isinstance(z, PadicMatrix):
        p = z.p
    check_prime(p)
    v = min((valuation(c, p) for c in char_poly(z).coefficients), default=INFINITY)
    if v < 0:
        return None
    return v


def log_criterion(z: Operand, p: int, k: int = 1) -> bool:
    if k < 1:
        raise ValueError("k must be >= 1")
    level = chi_level(z, p)
    return level is not None and level >= k


def check_log_chi_necessity(y: Operand, p: int) -> bool:
    """Whether the characteristic polynomial is ``T**d`` modulo ``p Z_p[T]``."""
    return log_criterion(y, p, 1)


def _exp_charpoly_level(x: Matrix, p: int) -> Union[int, float, None]:
    level = chi_level(x, p)
    if level is None or level < 1:
        return None
    if level == INFINITY or len(x) < level * (p - 1):
        return level
    return None


def _exp_norm_ok(x: Matrix, p: int) -> bool:
    v = min_valuation(x, p)
    return v == INFINITY or v * (p - 1) > 1


def exp_converges(x: Operand, p: int) -> bool:
    """Sufficient test for convergence of the exponential series.

    True when the characteristic polynomial lies in ``T**d + p**k Z_p[T]``
    for some ``k`` with ``d < k(p-1)``, or when ``||X|| < p**(-1/(p-1))``.
    """
    x = _coerce(x)
    check_prime(p)
    return _exp_charpoly_level(x, p) is not None or _exp_norm_ok(x, p)


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def exp_truncation(x: Matrix, p: int, n: int) -> int:
    """Number of leading terms after which every term has norm ``< p**-n``."""
    d = len(x)
    level = _exp_charpoly_level(x, p)
    candidates = []
    if level == INFINITY:
        return d
    if level is not None:
        # k*floor(m/d) - v_p(m!) - h(d-1) >= k(m-d+1)/d - (m-1)/(p-1) - h(d-1)
        k = level
        h = height_exponent(x, p)
        slope = Fraction(k, d) - Fraction(1, p - 1)
        need = n + 1 + h * (d - 1) + Fraction(k * (d - 1), d) - Fraction(1, p - 1)
        candidates.append(max(1, _ceil(need / slope)))
    if _exp_norm_ok(x, p):
        nu = min_valuation(x, p)
        if nu == INFINITY:
            return 1
        # m*nu - (m-1)/(p-1) >= n + 1
        slope = nu - Fraction(1, p - 1)
        need = n + 1 - Fraction(1, p - 1)
        candidates.append(max(1, _ceil(need / slope)))
    if not candidates:
        raise ConvergenceError(
            f"no convergence certificate for exp at p={p}", chi_level(x, p))
    return min(candidates)


def _log_charpoly_cutoff(d: int, p: int, k: int, target: int) -> int:
    # smallest m >= 2d with k*floor(j/d) - log_p(j) >= target for all j >= m;
    # checked as p**(k(m-d+1) - d*target) >= m**d, which propagates to m+1
    # because p**k >= 2 > (1 + 1/m)**d once m >= 2d.
    m = 2 * d
    while True:
        e = k * (m - d + 1) - d * target
        if e >= 0 and p ** e >= m ** d:
            return m
        m += 1


def _log_norm_cutoff(p: int, nu: int, target: int) -> int:
    # m*nu - log_p(m) >= target, propagating once p**nu >= 2 > (1 + 1/m)
    m = 2
    while True:
        e = m * nu - target
        if e >= 0 and p ** e >= m:
            return m
        m += 1


def log_truncation(y: Matrix, p: int, n: int) -> int:
    d = len(y)
    level = chi_level(y, p)
    if level is None or level < 1:
        raise ConvergenceError(f"log(1+Y) criterion fails at p={p}", level)
    if level == INFINITY:
        return d
    h = height_exponent(y, p)
    best = _log_charpoly_cutoff(d, p, int(level), n + 1 + h * (d - 1))
    nu = min_valuation(y, p)
    if nu >= 1:
        best = min(best, _log_norm_cutoff(p, int(nu), n + 1))
    return best


def _check_precision(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError("precision must be a positive integer")
    if n > MAX_PRECISION:
        raise ValueError(f"precision {n} exceeds the ceiling {MAX_PRECISION}")


def exp_partial_sum(x: Operand, p: int, n: int) -> Matrix:
    """Exact partial sum of the exponential series, correct modulo ``p**n``."""
    x = _coerce(x)
    check_prime(p)
    _check_precision(n)
    terms = exp_truncation(x, p, n)
    d = len(x)
    total = la.identity(d)
    power = la.identity(d)
    for k in range(1, terms):
        power = la.scale(Fraction(1, k), la.matmul(power, x))
        total = la.add(total, power)
    return total


def exp_matrix(x: Operand, p: int, n: int) -> PadicMatrix:
    """``exp(X)`` modulo ``p**n``.

    Raises :class:`ConvergenceError` when neither certificate applies.
    """
    return PadicMatrix.from_rationals(exp_partial_sum(x, p, n), p, n)


def log_partial_sum(y: Operand, p: int, n: int) -> Matrix:
    """Exact partial sum of ``log(1+Y)``, correct modulo ``p**n``."""
    y = _coerce(y)
    check_prime(p)
    _check_precision(n)
    terms = log_truncation(y, p, n)
    d = len(y)
    total = la.zeros(d)
    power = la.identity(d)
    for k in range(1, terms):
        power = la.matmul(power, y)
        coef = Fraction(1 if k % 2 else -1, k)
        total = la.add(total, la.scale(coef, power))
    return total


def log_bounds(y: Operand, p: int) -> tuple[Fraction, Fraction | None]:
    """``(d * H_p(Y)**(d-1), H_p(Y)**(d-1) if p > d else None)``."""
    y = _coerce(y)
    d = len(y)
    base = local_height(y, p) ** (d - 1)
    return d * base, (base if p > d else None)


def log_matrix(y: Operand, p: int, n: int) -> PadicMatrix:
    """``log(1 + Y)`` modulo ``p**n``; the argument is ``Y``.

    The proved bounds ``||log(1+Y)|| <= d H_p(Y)**(d-1)`` and, for ``p > d``,
    ``<= H_p(Y)**(d-1)`` are checked on the result. Both bounds are at least 1
    while the truncated tail is below ``p**-n``, so the norm of the exact partial
    sum decides them.
    """
    y = _coerce(y)
    s = log_partial_sum(y, p, n)
    norm = matrix_norm(s, p)
    general, precise = log_bounds(y, p)
    if norm > general:
        raise BoundViolation(f"||log(1+Y)|| = {norm} exceeds d*H^(d-1) = {general}")
    if precise is not None and norm > precise:
        raise BoundViolation(f"||log(1+Y)|| = {norm} exceeds H^(d-1) = {precise}")
    return PadicMatrix.from_rationals(s, p, n)


def _perturbation_guard(d: int, p: int) -> int:
    # max over j >= 1 of 1 + v_p(j) - floor((j-1)/d); beyond j = 64d the
    # floor term exceeds 1 + log_p(j)
    best = 1
    for j in range(1, 64 * d + 1):
        best = max(best, 1 + int_valuation(j, p) - (j - 1) // d)
    return best


def roundtrip_precision(x: Operand, p: int, n: int) -> int:
    """Working precision for ``exp`` so that ``log`` of the lift is exact mod ``p**n``.

    Replacing ``Y`` by ``Y'`` with ``||Y - Y'|| <= p**-w`` moves
    ``log(1+Y)`` by at most ``p**-(w - 2h(d-1) - g)`` with ``H_p(Y) = p**h``
    and ``g`` from :func:`_perturbation_guard`.
    """
    x = _coerce(x)
    d = len(x)
    guard = _perturbation_guard(d, p)
    w = n + guard
    while True:
        y = la.sub(exp_partial_sum(x, p, w), la.identity(d))
        need = n + guard + 2 * height_exponent(y, p) * (d - 1)
        if w >= need:
            return w
        w = need


def log_exp_roundtrip(x: Operand, p: int, n: int) -> bool:
    """Whether ``log(exp(X)) == X`` modulo ``p**n``.

    ``exp`` is evaluated at the working precision from
    :func:`roundtrip_precision`, lifted to rationals, and passed to
    :func:`log_matrix`.
    """
    x = _coerce(x)
    _check_precision(n)
    if not exp_converges(x, p):
        raise ConvergenceError(f"exp(X) not certified convergent at p={p}", chi_level(x, p))
    w = roundtrip_precision(x, p, n)
    e = exp_matrix(x, p, w)
    y = la.sub(e.to_rationals(), la.identity(len(x)))
    try:
        back = log_matrix(y, p, n)
    except ConvergenceError:
        return False
    return back.congruent(x)
