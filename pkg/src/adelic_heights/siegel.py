"""Siegel sets in SL(2, R) on exact rational points.

Points are rational matrices of determinant one. Their Iwasawa coordinates
``g.i = x + iy`` are rational, so membership in the classical Siegel set
``|x| <= c, y >= t`` is decided exactly. The ``p``-map sends ``g`` to the
squared length of ``g^-1 E_12 g``; for ``g = [[a, b], [c, d]]`` this is
``(c**2 + d**2)**2 = y**-2``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from . import linalg as la
from .exactnum import RationalLike, height_finite, height_real, to_rational
from .linalg import Matrix


@dataclass(frozen=True)
class SiegelParams:
    omega_bound: Fraction = Fraction(1, 2)
    height_floor: Fraction = Fraction(1, 2)

    def __post_init__(self):
        c, t = to_rational(self.omega_bound), to_rational(self.height_floor)
        if c <= 0 or t <= 0:
            raise ValueError("Siegel parameters must be positive")
        object.__setattr__(self, "omega_bound", c)
        object.__setattr__(self, "height_floor", t)


def sl2(rows: Sequence[Sequence[RationalLike]]) -> Matrix:
    g = la.as_square(rows)
    if len(g) != 2:
        raise ValueError("expected a 2x2 matrix")
    if la.det(g) != 1:
        raise ValueError(f"determinant is {la.det(g)}, not 1")
    return g


def iwasawa(g) -> tuple[Fraction, Fraction]:
    """``(x, y)`` with ``g . i = x + iy``."""
    (a, b), (c, d) = sl2(g)
    r = c * c + d * d
    return (a * c + b * d) / r, 1 / r


def mobius_i(g) -> tuple[Fraction, Fraction]:
    """``g . i`` computed directly as ``(ai + b) / (ci + d)``, as a check on :func:`iwasawa`."""
    (a, b), (c, d) = la.as_square(g)
    # (ai + b)(d - ci) / (c^2 + d^2)
    den = c * c + d * d
    return (b * d + a * c) / den, (a * d - b * c) / den


def siegel_member(g, params: SiegelParams) -> bool:
    x, y = iwasawa(g)
    return abs(x) <= params.omega_bound and y >= params.height_floor


def p_map(g) -> Fraction:
    """Sum of squares of the entries of ``g^-1 E_12 g``."""
    g = sl2(g)
    conj = la.matmul(la.matmul(la.inverse(g), la.unit_matrix(2, 0, 1)), g)
    return sum((e * e for e in la.entries(conj)), Fraction(0))


@dataclass(frozen=True)
class SiegelPoint:
    g: Matrix
    x: Fraction
    y: Fraction
    member: bool

    @classmethod
    def of(cls, g, params: SiegelParams) -> "SiegelPoint":
        g = sl2(g)
        x, y = iwasawa(g)
        return cls(g, x, y, abs(x) <= params.omega_bound and y >= params.height_floor)

    def heights(self) -> tuple[Fraction, Fraction]:
        coords = la.flatten(self.g)
        return height_real(coords), height_finite(coords)


def nx_ay(x: RationalLike, s: RationalLike) -> Matrix:
    """``n(x) a(s) = [[s, x/s], [0, 1/s]]``, which maps ``i`` to ``x + s**2 i``."""
    x, s = to_rational(x), to_rational(s)
    if s <= 0:
        raise ValueError("s must be positive")
    return ((s, x / s), (Fraction(0), 1 / s))


def rational_rotation(m: int, n: int) -> Matrix:
    """A rational point of SO(2) from the Pythagorean parametrisation."""
    den = m * m + n * n
    if den == 0:
        raise ValueError("m and n cannot both vanish")
    c, s = Fraction(m * m - n * n, den), Fraction(2 * m * n, den)
    return ((c, -s), (s, c))


def check_siegel_claim(points: Iterable, params: SiegelParams) -> tuple[Fraction, bool]:
    """Least ``C`` with ``0 < p(g) <= C * y**-2`` over the sample, and whether one works.

    Every point must lie in the Siegel set. With the character read off as
    ``chi = y`` the bound is ``p <= C chi**-2``.
    """
    best = None
    positive = True
    for g in points:
        g = sl2(g)
        x, y = iwasawa(g)
        if not (abs(x) <= params.omega_bound and y >= params.height_floor):
            raise ValueError(f"point with x={x}, y={y} is outside the Siegel set")
        pv = p_map(g)
        positive = positive and pv > 0
        ratio = pv * y * y
        best = ratio if best is None or ratio > best else best
    if best is None:
        raise ValueError("no sample points")
    return best, positive


def torus_ray_decreasing(ts: Sequence[RationalLike]) -> bool:
    """Whether ``p(diag(t, 1/t))`` strictly decreases along increasing ``t``."""
    ts = sorted(to_rational(t) for t in ts)
    vals = [p_map(((t, 0), (0, 1 / t))) for t in ts]
    return all(a > b for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class SamplerConfig:
    n_samples: int = 1000
    seed: int = 0
    max_den: int = 30
    max_scale: int = 30
    params: SiegelParams = SiegelParams()
    torus_fraction: float = 0.25


def sample_siegel(cfg: SamplerConfig) -> list[Matrix]:
    """Seeded points ``n(x) a(s)`` in the closed Siegel set.

    ``x = u/v`` runs over fractions in ``[-c, c]`` with ``v <= max_den`` and
    ``s = n/m`` over fractions with ``s**2 >= t`` and ``m <= max_den``,
    ``n <= max_scale * m``. A ``torus_fraction`` of the points have ``x = 0``.
    """
    if cfg.n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = random.Random(cfg.seed)
    c, t = cfg.params.omega_bound, cfg.params.height_floor
    out = []
    while len(out) < cfg.n_samples:
        m = rng.randint(1, cfg.max_den)
        lo = math.isqrt(math.ceil(t * m * m)) if t * m * m >= 1 else 1
        n = rng.randint(max(lo, 1), max(lo, 1) + cfg.max_scale * m)
        s = Fraction(n, m)
        if s * s < t:
            continue
        if rng.random() < cfg.torus_fraction:
            x = Fraction(0)
        else:
            v = rng.randint(1, cfg.max_den)
            top = math.floor(c * v)
            x = Fraction(rng.randint(-top, top), v)
        out.append(nx_ay(x, s))
    return out


@dataclass(frozen=True)
class DominationFit:
    """``H_R <= c + a * H_f**b`` on every sample when ``violations == 0``."""

    a: float
    b: Fraction
    c: Fraction
    violations: int
    n_samples: int
    seed: int | None = None

    def as_dict(self) -> dict:
        return {"a": self.a, "b": float(self.b), "c": float(self.c),
                "violations": self.violations, "n_samples": self.n_samples, "seed": self.seed}


def _round_up_root(x: Fraction, q: int) -> float:
    """A float ``>= x**(1/q)``, checked exactly."""
    r = float(x) ** (1.0 / q)
    while Fraction(r) ** q < x:
        r = math.nextafter(r, math.inf)
    return r


def fit_domination(pairs: Sequence[tuple[Fraction, Fraction]], c: RationalLike = 1,
                   a_max: RationalLike = 1, b_max: int = 4, b_steps: int = 4,
                   seed: int | None = None) -> DominationFit:
    """Least ``b`` on the grid ``{k / b_steps}`` with ``H_R <= c + a H_f**b`` for some ``a <= a_max``.

    For a grid point ``b = k/q`` the smallest admissible ``a`` satisfies
    ``a**q = max (H_R - c)**q / H_f**k``, which is an exact rational, so the
    comparison with ``a_max`` and the violation count are exact. If no grid
    point works, ``b = b_max`` is reported with ``a = a_max`` and the samples
    violating that bound are counted.
    """
    if not pairs:
        raise ValueError("empty sample set")
    c, a_max = to_rational(c), to_rational(a_max)
    q = b_steps
    excess = [(hr - c, hf) for hr, hf in pairs if hr > c]
    for k in range(b_max * q + 1):
        aq = max((e ** q / hf ** k for e, hf in excess), default=Fraction(0))
        if aq <= a_max ** q:
            a = _round_up_root(aq, q) if aq else 0.0
            return DominationFit(a, Fraction(k, q), c, 0, len(pairs), seed)
    kq = b_max * q
    bad = sum(1 for e, hf in excess if e ** q > a_max ** q * hf ** kq)
    return DominationFit(float(a_max), Fraction(b_max), c, bad, len(pairs), seed)


@dataclass(frozen=True)
class SampleRow:
    x: Fraction
    y: Fraction
    h_real: Fraction
    h_finite: Fraction
    p: Fraction

    def csv(self) -> str:
        hf = self.h_finite
        if hf.denominator != 1:
            raise ArithmeticError("finite height is not an integer")
        return (f"{self.x},{self.y},{self.h_real.numerator},{self.h_real.denominator},"
                f"{hf.numerator},{self.p.numerator},{self.p.denominator}")


CSV_HEADER = "x,y,HR_num,HR_den,Hf,p_map_num,p_map_den"


def evaluate(points: Iterable, params: SiegelParams) -> list[SampleRow]:
    rows = []
    for g in points:
        pt = SiegelPoint.of(g, params)
        if not pt.member:
            raise ValueError("sample outside the Siegel set")
        hr, hf = pt.heights()
        rows.append(SampleRow(pt.x, pt.y, hr, hf, p_map(pt.g)))
    return rows


def height_comparison_experiment(cfg: SamplerConfig, c: RationalLike = 1, a_max: RationalLike = 1,
                                 b_max: int = 4) -> tuple[DominationFit, list[SampleRow]]:
    rows = evaluate(sample_siegel(cfg), cfg.params)
    fit = fit_domination([(r.h_real, r.h_finite) for r in rows], c=c, a_max=a_max,
                         b_max=b_max, seed=cfg.seed)
    return fit, rows


# ---------------------------------------------------------------------------
# forms averaged over a finite group


def group_closure(generators: Sequence, limit: int = 10_000) -> list[Matrix]:
    """All products of the generators; they must generate a finite group."""
    gens = [la.as_square(g) for g in generators]
    if not gens:
        raise ValueError("no generators")
    ident = la.identity(len(gens[0]))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                e = la.matmul(g, h)
                if e not in seen:
                    seen.add(e)
                    nxt.append(e)
                    if len(seen) > limit:
                        raise ValueError("group is larger than the limit; is it finite?")
        frontier = nxt
    return sorted(seen)


def averaged_form(group: Sequence, gram: Matrix | None = None) -> Matrix:
    """Gram matrix of ``v -> sum_z Q(z v)`` for a finite matrix group."""
    elems = [la.as_square(z) for z in group]
    n = len(elems[0])
    q = la.identity(n) if gram is None else la.as_square(gram)
    total = la.zeros(n)
    for z in elems:
        total = la.add(total, la.matmul(la.matmul(la.transpose(z), q), z))
    return total


def is_positive_definite(gram: Matrix) -> bool:
    """Sylvester's criterion on leading principal minors, exactly."""
    n = len(gram)
    if la.transpose(gram) != gram:
        return False
    return all(la.det(tuple(row[:k] for row in gram[:k])) > 0 for k in range(1, n + 1))


def is_invariant(gram: Matrix, group: Sequence) -> bool:
    return all(la.matmul(la.matmul(la.transpose(z), gram), z) == gram
               for z in (la.as_square(g) for g in group))


def adjoint_action(k: Matrix) -> Matrix:
    """Matrix of ``X -> k X k^-1`` on ``gl(2)`` in the basis ``E_11, E_12, E_21, E_22``."""
    k = la.as_square(k)
    k_inv = la.inverse(k)
    cols = []
    for i, j in product(range(2), range(2)):
        cols.append(la.flatten(la.matmul(la.matmul(k, la.unit_matrix(2, i, j)), k_inv)))
    return la.transpose(tuple(cols))


__all__ = [
    "CSV_HEADER", "DominationFit", "SampleRow", "SamplerConfig", "SiegelParams", "SiegelPoint",
    "adjoint_action", "averaged_form", "check_siegel_claim", "evaluate", "fit_domination",
    "group_closure", "height_comparison_experiment", "is_invariant", "is_positive_definite",
    "iwasawa", "mobius_i", "nx_ay", "p_map", "rational_rotation", "sample_siegel", "sl2",
    "siegel_member", "torus_ray_decreasing",
]
