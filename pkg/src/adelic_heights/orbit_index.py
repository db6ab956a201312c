"""Indices of compact p-adic matrix groups, computed as lattice orbits.

``GL_d(Z_p)`` is exactly the stabilizer of the standard lattice ``Z_p^d``, so
for a compact group ``U`` the index ``[U : U n GL_d(Z_p)]`` is the size of the
orbit ``U . Z_p^d``. Orbits are enumerated breadth first from a finite set of
topological generators and their inverses, with each lattice stored as a
canonical Hermite normal form.

Lattices live in a window ``p**A Z_p^d <= L <= p**-B Z_p^d``. They are scaled
by ``p**B`` and reduced modulo ``p**(A+B)``, which makes them small integer
arrays. A generator that pushes a lattice out of the window makes the search
restart with a doubled window, so the result never depends on the initial
guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from itertools import combinations
from typing import Sequence

import numpy as np
from sympy import primitive_root

from . import _kernels as K
from . import linalg as la
from .exactnum import (
    check_prime,
    int_valuation,
    lcm_range,
    abs_p,
    prime_factors,
    reduce_mod,
    to_rational,
    omega,
)
from .lattice_heights import LatticeHom, conjugate_representation, hom_height_f, hom_height_p
from .linalg import Matrix
from .padic import ConvergenceError, exp_converges, exp_partial_sum, local_height

MAX_WINDOW = 512
CASES = ("exp2p", "nilpotent", "torus", "cyclic", "mixed")


def _p_shift(m: Matrix, p: int) -> int:
    """Least ``s >= 0`` with ``p**s * m`` p-integral."""
    return max((int_valuation(x.denominator, p) for x in la.entries(m)
                if x.denominator % p == 0), default=0)


def _residues(m: Matrix, p: int, shift: int, k: int, dtype) -> np.ndarray:
    scale = Fraction(p) ** shift
    out = np.empty((len(m), len(m[0])), dtype=dtype)
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            out[i, j] = reduce_mod(scale * x, p, k)
    return out


def _kernel(fn, dtype):
    # object arrays carry Python integers and must run interpreted
    return fn if dtype is np.int64 else K.interpreted(fn)


def _dtype_for(modulus: int):
    return np.int64 if modulus < K.INT64_MODULUS_LIMIT else object


@dataclass(frozen=True)
class LatticeClass:
    """A full-rank ``Z_p``-lattice in ``Q_p^d`` given by its canonical HNF.

    ``hnf`` is upper triangular with diagonal entries ``p**e_i`` and entries
    right of the diagonal reduced into ``[0, p**e_i)`` inside ``Z[1/p]``.
    Two lattices are equal exactly when their ``hnf`` fields are.
    """

    p: int
    d: int
    hnf: Matrix

    @classmethod
    def standard(cls, p: int, d: int) -> "LatticeClass":
        return cls(check_prime(p), d, la.identity(d))

    @classmethod
    def from_basis(cls, p: int, basis: Sequence[Sequence]) -> "LatticeClass":
        """Lattice spanned over ``Z_p`` by the columns of ``basis``."""
        check_prime(p)
        m = la.as_square(basis)
        det = la.det(m)
        if det == 0:
            raise ValueError("columns do not span a full-rank lattice")
        b = _p_shift(m, p)
        scaled = la.scale(Fraction(p) ** b, m)
        k = max(1, int_valuation(la.det(scaled).numerator, p))
        pk = p ** k
        cols = _residues(scaled, p, 0, k, object)
        h = K.interpreted(K.hnf_mod)(cols, p, k, pk)
        return cls._from_scaled(p, h, b)

    @classmethod
    def _from_scaled(cls, p: int, h: np.ndarray, b: int) -> "LatticeClass":
        scale = Fraction(1, p ** b)
        d = h.shape[0]
        return cls(p, d, tuple(tuple(int(h[i, j]) * scale for j in range(d)) for i in range(d)))

    def apply(self, g: Sequence[Sequence]) -> "LatticeClass":
        return LatticeClass.from_basis(self.p, la.matmul(la.as_square(g), self.hnf))

    def index_exponent(self) -> int:
        """``v_p`` of the covolume relative to ``Z_p^d``."""
        return sum(int_valuation(self.hnf[i][i].numerator, self.p)
                   - int_valuation(self.hnf[i][i].denominator, self.p) for i in range(self.d))


@dataclass(frozen=True)
class OrbitReport:
    """Outcome of an index computation.

    When ``at_least`` is set the search stopped at the cap and ``index`` is
    the cap, a lower bound for the true index.
    """

    index: int
    at_least: bool
    witness_count: int
    generator_count: int
    precision_used: int

    def as_dict(self) -> dict:
        key = "at_least" if self.at_least else "index"
        return {key: self.index, "witness_count": self.witness_count,
                "generator_count": self.generator_count, "precision_used": self.precision_used}

    def __str__(self) -> str:
        return f">= {self.index}" if self.at_least else str(self.index)


class _WindowEscape(Exception):
    def __init__(self, grow_b: bool):
        self.grow_b = grow_b


def _prepare_generators(generators, p: int) -> list[Matrix]:
    gens: list[Matrix] = []
    for g in generators:
        m = la.as_square(g)
        try:
            inv = la.inverse(m)
        except la.SingularMatrixError as exc:
            raise ValueError("generator is not invertible") from exc
        det = la.det(m)
        if det.numerator % p == 0 or det.denominator % p == 0:
            raise ValueError(
                f"generator determinant {det} is not a {p}-adic unit; "
                "it does not lie in a compact group")
        for x in (m, inv):
            if x not in gens:
                gens.append(x)
    if not gens:
        raise ValueError("no generators")
    d = len(gens[0])
    if any(len(g) != d for g in gens):
        raise ValueError("generators have different sizes")
    return gens


def _bfs(gens: list[Matrix], p: int, cap: int, a: int, b: int, collect: bool):
    d = len(gens[0])
    k = a + b
    pk = p ** k
    shifts = [_p_shift(g, p) for g in gens]
    dtype = _dtype_for(pk * p ** max(shifts))
    apply = _kernel(K.apply_generator, dtype)
    mats = [_residues(g, p, s, k + s, dtype) for g, s in zip(gens, shifts)]

    start = np.zeros((d, d), dtype=dtype)
    for i in range(d):
        start[i, i] = p ** b

    def key(h):
        return h.tobytes() if dtype is np.int64 else tuple(h.ravel().tolist())

    # Images that leave the window are skipped rather than fatal: everything
    # kept is a genuine orbit member, so reaching the cap is conclusive even
    # for a group that is not compact. Otherwise widen the window and retry.
    seen = {key(start)}
    found = [start] if collect else None
    frontier = [start]
    escaped = [False, False]
    while frontier:
        batch = np.stack(frontier)
        frontier = []
        for g, s in zip(mats, shifts):
            out = np.zeros_like(batch)
            status = np.zeros(len(batch), dtype=np.int8)
            apply(batch, g, s, p, k, pk, b * d, out, status)
            escaped[0] |= bool((status == 1).any())
            escaped[1] |= bool((status == 2).any())
            for h in out[status == 0]:
                hk = key(h)
                if hk not in seen:
                    seen.add(hk)
                    frontier.append(h)
                    if collect:
                        found.append(h)
                    if len(seen) > cap:
                        return len(seen), True, found, k
    if escaped[0] or escaped[1]:
        raise _WindowEscape(grow_b=escaped[0])
    return len(seen), False, found, k


def lattice_orbit(generators, p: int, cap: int, collect: bool = False):
    """Orbit of ``Z_p^d`` under the closed group generated by ``generators``.

    Returns ``(report, lattices)``; ``lattices`` is a list of
    :class:`LatticeClass` when ``collect`` is set and the search completed,
    otherwise ``None``.
    """
    check_prime(p)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    gens = _prepare_generators(generators, p)
    d = len(gens[0])
    s = max(_p_shift(g, p) for g in gens)
    a = b = max(1, s)
    while True:
        try:
            size, hit_cap, found, k = _bfs(gens, p, cap, a, b, collect)
            break
        except _WindowEscape as esc:
            if esc.grow_b:
                b *= 2
            else:
                # A = B(d-1) already forces p**(A+B) Z^d inside every candidate
                a = min(2 * a, max(1, b * (d - 1)))
            if a + b > MAX_WINDOW:
                raise RuntimeError("lattice window grew past the supported size; is the group compact?")
    n_gens = len(gens)
    if hit_cap:
        return OrbitReport(cap, True, size, n_gens, k), None
    lattices = None
    if collect:
        lattices = [LatticeClass._from_scaled(p, h, b) for h in found]
    return OrbitReport(size, False, size, n_gens, k), lattices


def lattice_orbit_index(generators, p: int, cap: int) -> OrbitReport:
    return lattice_orbit(generators, p, cap)[0]


def cyclic_exp_index(x, p: int, cap: int) -> OrbitReport:
    """Index of the closure of ``exp(X)**Z`` over its intersection with ``GL_d(Z_p)``.

    The integral exponents form a subgroup ``nZ``; because the closure of
    ``exp(X)**Z`` is ``exp(Z_p X)``, ``n`` is a power of ``p``. So it suffices
    to test ``exp(p**j X)`` for ``p**j <= cap``.
    """
    check_prime(p)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    x = la.as_square(x)
    if not exp_converges(x, p):
        raise ConvergenceError(f"exp does not converge {p}-adically on this matrix")
    q = 1
    tested = 0
    while q <= cap:
        tested += 1
        s = exp_partial_sum(la.scale(q, x), p, 1)
        if all(e.denominator % p != 0 for e in la.entries(s)) and la.det(s).numerator % p != 0:
            return OrbitReport(q, False, q, 1, 1)
        q *= p
    return OrbitReport(cap, True, tested, 1, 1)


# ---------------------------------------------------------------------------
# experiments


def dstar_abs_inverse(d: int, p: int) -> int:
    """``|1/d*|_p`` with ``d* = lcm(1..d)``, that is ``p**floor(log_p d)``."""
    return p ** int_valuation(lcm_range(d), p) if d >= p else 1


def unit_group_generators(p: int) -> list[int]:
    """Integers whose powers are dense in ``Z_p^x``."""
    check_prime(p)
    if p == 2:
        return [-1, 5]
    return [int(primitive_root(p * p))]


def _fmt_matrix(m: Matrix) -> str:
    return "; ".join(" ".join(str(x) for x in row) for row in m)


def _parse_matrix(text: str) -> Matrix:
    return la.as_matrix([[Fraction(t) for t in row.split()] for row in text.split(";")])


@dataclass(frozen=True)
class Part:
    case: str
    basis: tuple[Matrix, ...]


@dataclass(frozen=True)
class Experiment:
    """A homomorphism ``m -> gl(d)``, ``X -> g X g^-1``, with its structural case.

    ``basis`` spans ``m_Z``. For ``torus`` it must consist of diagonal integer
    matrices (cocharacters); for ``nilpotent`` and ``cyclic`` of nilpotent or
    otherwise convergent matrices. ``mixed`` experiments carry ``parts``, each
    with its own case and basis, whose union is ``basis``.
    """

    case: str
    p: int
    d: int
    conjugator: Matrix
    basis: tuple[Matrix, ...]
    cap: int = 10 ** 6
    level: int | None = None
    c2: Fraction | None = None
    parts: tuple[Part, ...] = ()

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {', '.join(CASES)}")
        check_prime(self.p)
        if la.shape(self.conjugator) != (self.d, self.d):
            raise ValueError("conjugator size does not match d")
        if self.case == "mixed" and not self.parts:
            raise ValueError("mixed experiments need parts")
        if self.case == "cyclic" and len(self.basis) != 1:
            raise ValueError("cyclic experiments take exactly one matrix")

    @classmethod
    def build(cls, case: str, p: int, conjugator, basis, **kw) -> "Experiment":
        g = la.as_square(conjugator)
        parts = tuple(Part(c, tuple(la.as_square(b) for b in bs)) for c, bs in kw.pop("parts", ()))
        ms = tuple(la.as_square(b) for b in basis)
        if parts and not ms:
            ms = tuple(b for part in parts for b in part.basis)
        return cls(case, p, len(g), g, ms, parts=parts, **kw)

    def hom(self) -> LatticeHom:
        return conjugate_representation(self.conjugator, self.basis)

    def conjugate(self, x: Matrix) -> Matrix:
        return la.matmul(la.matmul(self.conjugator, x), la.inverse(self.conjugator))

    def format(self) -> str:
        lines = [f"case = {self.case}", f"p = {self.p}", f"d = {self.d}",
                 f"conjugator = {_fmt_matrix(self.conjugator)}", f"cap = {self.cap}"]
        if self.parts:
            lines += [f"part = {pt.case}: " + " | ".join(_fmt_matrix(b) for b in pt.basis)
                      for pt in self.parts]
        else:
            lines.append("basis = " + " | ".join(_fmt_matrix(b) for b in self.basis))
        if self.level is not None:
            lines.append(f"level = {self.level}")
        if self.c2 is not None:
            lines.append(f"c2 = {self.c2}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Experiment":
        """Read the ``key = value`` descriptor written by :meth:`format`."""
        fields: dict[str, str] = {}
        parts = []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {n}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "part":
                tag, _, mats = value.partition(":")
                parts.append((tag.strip(), [_parse_matrix(m) for m in mats.split("|")]))
            elif key in fields:
                raise ValueError(f"line {n}: duplicate key {key!r}")
            else:
                fields[key] = value
        try:
            case, p = fields.pop("case"), int(fields.pop("p"))
            conj = _parse_matrix(fields.pop("conjugator"))
        except KeyError as exc:
            raise ValueError(f"descriptor is missing {exc.args[0]!r}") from exc
        basis = [_parse_matrix(m) for m in fields.pop("basis").split("|")] if "basis" in fields else []
        d = int(fields.pop("d", len(conj)))
        if d != len(conj):
            raise ValueError("d does not match the conjugator")
        kw = {}
        if "cap" in fields:
            kw["cap"] = int(fields.pop("cap"))
        if "level" in fields:
            kw["level"] = int(fields.pop("level"))
        if "c2" in fields:
            kw["c2"] = Fraction(fields.pop("c2"))
        if fields:
            raise ValueError(f"unknown keys: {', '.join(sorted(fields))}")
        return cls.build(case, p, conj, basis, parts=parts, **kw)


def _is_nilpotent(x: Matrix) -> bool:
    return la.is_zero(la.power(x, len(x)))


def _diagonal_exponents(x: Matrix) -> list[int] | None:
    d = len(x)
    if any(x[i][j] != 0 for i in range(d) for j in range(d) if i != j):
        return None
    if any(x[i][i].denominator != 1 for i in range(d)):
        return None
    return [int(x[i][i]) for i in range(d)]


def _cocharacter(exps: list[int], t: int) -> Matrix:
    return la.diag(*(Fraction(t) ** e for e in exps))


def _exp_generator(x: Matrix, p: int, factor: int, level: int) -> Matrix:
    """A matrix topologically generating the same group as ``exp(factor * Z_p X)``.

    Nilpotent ``X`` gives the exact exponential. For a diagonal integer ``X``
    the group is the cocharacter image of ``exp(factor * Z_p)``, which is the
    closure of the powers of ``1 + factor`` whenever ``v_p(factor) >= 1`` (and
    ``>= 2`` at ``p = 2``). Anything else uses the exponential summed to
    absolute precision ``level``.
    """
    if _is_nilpotent(x):
        return exp_partial_sum(la.scale(factor, x), p, 1)
    exps = _diagonal_exponents(x)
    if exps is not None and factor % p == 0 and (p != 2 or factor % 4 == 0):
        return _cocharacter(exps, 1 + factor)
    if not exp_converges(la.scale(factor, x), p):
        raise ConvergenceError(f"exp({factor} X) does not converge at p = {p}")
    return exp_partial_sum(la.scale(factor, x), p, level)


def group_generators(exp: Experiment, case: str | None = None, basis=None) -> list[Matrix]:
    """Topological generators of ``phi(M(Z_p))`` (or of ``phi(exp(2p m))`` for ``exp2p``)."""
    case = case or exp.case
    basis = exp.basis if basis is None else basis
    p = exp.p
    level = exp.level or 8
    if case == "mixed":
        return [g for pt in exp.parts for g in group_generators(exp, pt.case, pt.basis)]
    if case == "torus":
        gens = []
        for x in basis:
            exps = _diagonal_exponents(x)
            if exps is None:
                raise ValueError("torus bases must consist of integer diagonal matrices")
            gens += [_cocharacter(exps, r) for r in unit_group_generators(p)]
        return [exp.conjugate(g) for g in gens]
    factor = 2 * p if case == "exp2p" else 1
    return [exp.conjugate(_exp_generator(x, p, factor, level)) for x in basis]


@dataclass(frozen=True)
class LocalBoundResult:
    case: str
    p: int
    height: int
    index: int
    at_least: bool
    bound: Fraction
    passed: bool
    inconclusive: bool
    measured_c: Fraction | None = None
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> Fraction | None:
        return Fraction(self.index) / self.bound if self.bound else None

    def as_dict(self) -> dict:
        out = {"case": self.case, "p": self.p, "height": self.height,
               ("at_least" if self.at_least else "index"): self.index,
               "bound": str(self.bound), "slack": None if self.slack is None else str(self.slack),
               "pass": self.passed, "inconclusive": self.inconclusive}
        if self.measured_c is not None:
            out["measured_c"] = str(self.measured_c)
        out.update(self.detail)
        return out


def _judge(index: int, at_least: bool, bound: Fraction) -> tuple[bool, bool]:
    """(passed, inconclusive) for the claim ``index >= bound``."""
    if index >= bound:
        return True, False
    if at_least:
        return False, True
    return False, False


def saturation_index(parts_bases: Sequence[Sequence[Matrix]], p: int) -> int:
    """p-part of ``[sat(L) : L]`` for ``L`` spanned by all the given matrices.

    This is the ``n`` of the subgroup principle: how far the sum of the
    integral structures of the parts falls short of the saturated lattice.
    """
    vecs = [la.flatten(b) for bs in parts_bases for b in bs]
    den = 1
    for v in vecs:
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
    rows = [[int(x * den) for x in v] for v in vecs]
    r = len(rows)
    cols = list(zip(*rows))
    g = 0
    for sel in combinations(range(len(cols)), r):
        minor = la.det(la.as_matrix([[cols[c][i] for c in sel] for i in range(r)]))
        g = gcd(g, int(minor))
        if g == 1:
            break
    if g == 0:
        raise ValueError("the parts are linearly dependent")
    return p ** int_valuation(g, p) if g % p == 0 else 1


def verify_local_bound(exp: Experiment) -> LocalBoundResult:
    """Measure the orbit index for ``exp`` and test the inequality of its case.

    * ``exp2p``: ``[phi(exp(2p m))]_p >= |2p d*|_p H_p(dphi)``
    * ``nilpotent``: ``[phi(M(Z_p))]_p >= |d*|_p H_p(dphi)``
    * ``cyclic``: ``[exp(X')**Z]_p >= H_p(X')/d``, and ``>= H_p(X')`` when
      ``p > d``, for ``X' = g X g^-1``
    * ``torus``: ``[T : U (T n K)] >= p / c2`` with ``U = phi(exp(2p m))``;
      ``measured_c`` is the least ``c2`` for which this holds
    * ``mixed``: each part is checked on its own and the whole group must reach
      ``max_i H_p(dphi|m_i) >= H_p(dphi) / n`` scaled by the weakest part bound
    """
    p, d = exp.p, exp.d
    h = hom_height_p(exp.hom(), p)
    inv_dstar = dstar_abs_inverse(d, p)

    if exp.case == "cyclic":
        x = exp.conjugate(exp.basis[0])
        hx = local_height(x, p)
        bound = hx if p > d else hx / d
        rep = cyclic_exp_index(x, p, exp.cap)
        ok, inc = _judge(rep.index, rep.at_least, bound)
        return LocalBoundResult("cyclic", p, int(hx), rep.index, rep.at_least, bound, ok, inc,
                                detail={"matrix_height": str(hx)})

    if exp.case == "torus":
        t_rep = lattice_orbit_index(group_generators(exp, "torus"), p, exp.cap)
        u_rep = lattice_orbit_index(group_generators(exp, "exp2p"), p, exp.cap)
        detail = {"torus_index": t_rep.index, "exp2p_index": u_rep.index}
        if t_rep.at_least or u_rep.at_least:
            return LocalBoundResult("torus", p, h, t_rep.index, True, Fraction(p), False, True,
                                    detail=detail)
        quotient = Fraction(t_rep.index, u_rep.index)
        if quotient.denominator != 1:
            raise ArithmeticError("exp(2p m) orbit does not divide the torus orbit")
        measured = Fraction(p) / quotient
        if h == 1:
            # the claim only concerns H_p(dphi) != 1
            return LocalBoundResult("torus", p, h, int(quotient), False, Fraction(1), True, False,
                                    measured_c=None, detail=detail)
        c2 = exp.c2 if exp.c2 is not None else measured
        bound = Fraction(p) / c2
        ok = quotient >= bound
        return LocalBoundResult("torus", p, h, int(quotient), False, bound, ok, False,
                                measured_c=measured, detail=detail)

    if exp.case == "mixed":
        sub = [verify_local_bound(Experiment(pt.case, p, d, exp.conjugator, pt.basis, exp.cap,
                                             exp.level, exp.c2)) for pt in exp.parts]
        rep = lattice_orbit_index(group_generators(exp), p, exp.cap)
        n = saturation_index([pt.basis for pt in exp.parts], p)
        # a subgroup's index never exceeds the index of the whole group
        best = max(Fraction(r.detail.get("torus_index", r.index)) for r in sub)
        ok = all(r.passed for r in sub) and rep.index >= best
        part_heights = [hom_height_p(conjugate_representation(exp.conjugator, pt.basis), p)
                        for pt in exp.parts]
        combine_ok = Fraction(h, n) <= max(part_heights) <= h
        inc = any(r.inconclusive for r in sub) or (rep.at_least and rep.index < best)
        return LocalBoundResult(
            "mixed", p, h, rep.index, rep.at_least, best, ok and combine_ok and not inc, inc,
            detail={"parts": [r.as_dict() for r in sub], "saturation_index": n,
                    "part_heights": part_heights})

    rep = lattice_orbit_index(group_generators(exp), p, exp.cap)
    factor = abs_p(2 * p, p) if exp.case == "exp2p" else Fraction(1)
    bound = factor * h / inv_dstar
    ok, inc = _judge(rep.index, rep.at_least, bound)
    measured = Fraction(h, rep.index) if not rep.at_least else None
    return LocalBoundResult(exp.case, p, h, rep.index, rep.at_least, bound, ok, inc,
                            measured_c=measured)


@dataclass(frozen=True)
class GlobalBoundResult:
    height_f: int
    omega: int
    product: int
    at_least: bool
    c: Fraction
    passed: bool
    inconclusive: bool
    per_prime: tuple[LocalBoundResult, ...]

    @property
    def c_min(self) -> float:
        """Least ``c`` with ``product >= H_f / c**omega`` (1 when the bound is met at c = 1)."""
        if self.product >= self.height_f or self.omega == 0:
            return 1.0
        return float(Fraction(self.height_f, self.product)) ** (1 / self.omega)

    def c_at_most(self, c: Fraction) -> bool:
        """Exact test of ``c_min <= c``."""
        return self.product * Fraction(c) ** self.omega >= self.height_f

    def as_dict(self) -> dict:
        return {"height_f": self.height_f, "omega": self.omega,
                ("product_at_least" if self.at_least else "product"): self.product,
                "c": str(self.c), "c_min": self.c_min, "pass": self.passed,
                "inconclusive": self.inconclusive,
                "per_prime": [r.as_dict() for r in self.per_prime]}


def verify_global_bound(case: str, conjugator, basis, primes: Sequence[int] | None = None,
                        cap: int = 10 ** 6, c: Fraction | None = None) -> GlobalBoundResult:
    """Product of local indices against ``H_f(dphi) / c**omega(H_f(dphi))``.

    ``c`` defaults to ``lcm(1..d)``. The prime list must cover every prime
    dividing ``H_f(dphi)``; extra primes are allowed and contribute their
    measured index.
    """
    g = la.as_square(conjugator)
    d = len(g)
    hom = conjugate_representation(g, basis)
    hf = hom_height_f(hom)
    needed = prime_factors(hf)
    primes = sorted(set(primes if primes is not None else needed))
    missing = [q for q in needed if q not in primes]
    if missing:
        raise ValueError(f"prime list misses {missing}, which divide H_f = {hf}")
    c = Fraction(lcm_range(d)) if c is None else to_rational(c)
    results = []
    product = 1
    at_least = False
    for q in primes:
        r = verify_local_bound(Experiment.build(case, q, g, basis, cap=cap))
        results.append(r)
        # for tori the local result carries a quotient; the index is the full orbit
        product *= r.detail.get("torus_index", r.index)
        at_least = at_least or r.at_least
    w = omega(hf)
    bound = Fraction(hf) / c ** w
    passed = product >= bound
    inconclusive = not passed and at_least
    return GlobalBoundResult(hf, w, product, at_least, c, passed, inconclusive, tuple(results))


__all__ = [
    "CASES", "Experiment", "GlobalBoundResult", "LatticeClass", "LocalBoundResult",
    "OrbitReport", "Part", "cyclic_exp_index", "dstar_abs_inverse", "group_generators",
    "lattice_orbit", "lattice_orbit_index", "saturation_index", "unit_group_generators",
    "verify_global_bound", "verify_local_bound",
]
