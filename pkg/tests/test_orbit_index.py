import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from adelic_heights import linalg as la
from adelic_heights.orbit_index import (
    Experiment, LatticeClass, cyclic_exp_index, dstar_abs_inverse, lattice_orbit,
    lattice_orbit_index, saturation_index, unit_group_generators, verify_global_bound,
    verify_local_bound,
)
from adelic_heights.padic import ConvergenceError, exp_partial_sum, local_height

F = Fraction
E12 = [((0, 1), (0, 0))]
TORUS = [la.diag(1, 0), la.diag(0, 1)]


def integral_at(m, p):
    return all(x.denominator % p for x in la.entries(m))


def coset_count(elements, p):
    """Oracle: count classes of g ~ h iff g^-1 h lies in GL_d(Z_p)."""
    reps = []
    for g in elements:
        if not any(integral_at(la.matmul(r_inv, g), p) for _, r_inv in reps):
            reps.append((g, la.inverse(g)))
    return len(reps)


def test_cyclic_examples():
    assert cyclic_exp_index([[0, F(1, 125)], [0, 0]], 5, 1000).index == 125
    assert cyclic_exp_index(la.zeros(2), 5, 10).index == 1
    rep = cyclic_exp_index([[0, F(1, 16)], [0, 0]], 2, 100)
    assert rep.index == 16 and rep.index >= F(16, 2)


def test_cyclic_cap_and_rejection():
    rep = cyclic_exp_index([[0, F(1, 125)], [0, 0]], 5, 100)
    assert rep.at_least and rep.index == 100
    with pytest.raises(ConvergenceError):
        cyclic_exp_index([[2]], 2, 10)


@pytest.mark.parametrize("p,k", [(3, 2), (5, 1), (2, 3)])
def test_cyclic_integral_set_is_a_subgroup(p, k):
    x = [[F(p * p), F(1, p ** k)], [0, F(p * p)]] if p != 2 else [[0, F(1, p ** k)], [0, 0]]
    n = cyclic_exp_index(x, p, 10 ** 4).index
    ok = [i for i in range(1, 3 * n + 1) if integral_at(exp_partial_sum(la.scale(i, x), p, 1), p)]
    assert ok == list(range(n, 3 * n + 1, n))


def test_lattice_orbit_examples():
    assert lattice_orbit_index([la.identity(3)], 5, 10).index == 1
    assert lattice_orbit_index([[[1, F(1, 125)], [0, 1]]], 5, 1000).index == 125
    with pytest.raises(ValueError):
        lattice_orbit_index([[[1, 1], [1, 1]]], 5, 10)
    with pytest.raises(ValueError):
        lattice_orbit_index([[[5, 0], [0, 1]]], 5, 10)


def test_unipotent_orbit_matches_coset_oracle():
    g = [[1, F(1, 27)], [0, 1]]
    elems = [la.power(g, i) for i in range(81)]
    assert lattice_orbit_index([g], 3, 1000).index == coset_count(elems, 3) == 27


@pytest.mark.parametrize("p,k", [(3, 2), (5, 1), (5, 2), (7, 1)])
def test_torus_orbit_matches_coset_oracle(p, k):
    c = la.as_square([[1, F(1, p ** k)], [0, 1]])
    c_inv = la.inverse(c)
    gens = [la.matmul(la.matmul(c, la.diag(r, 1)), c_inv) for r in unit_group_generators(p)]
    gens += [la.matmul(la.matmul(c, la.diag(1, r)), c_inv) for r in unit_group_generators(p)]
    level = p ** (k + 1)
    units = [u for u in range(1, level) if u % p]
    elems = [la.matmul(la.matmul(c, la.diag(a, b)), c_inv) for a, b in product(units, units)]
    oracle = coset_count(elems, p)
    assert oracle == p ** (k - 1) * (p - 1)
    assert lattice_orbit_index(gens, p, 10 ** 5).index == oracle


def test_orbit_is_closed_and_canonical():
    gens = [[[1, F(1, 9)], [0, 1]], [[2, 0], [0, 1]], [[1, 0], [27, 1]]]
    rep, lattices = lattice_orbit(gens, 3, 10 ** 4, collect=True)
    orbit = set(lattices)
    assert len(orbit) == rep.index
    for lat in lattices:
        for g in gens:
            assert lat.apply(g) in orbit
            assert lat.apply(la.inverse(la.as_square(g))) in orbit
    assert LatticeClass.standard(3, 2) in orbit


def test_random_words_land_in_orbit():
    rng = random.Random(3)
    gens = [la.as_square([[1, F(1, 25)], [0, 1]]), la.as_square([[3, 0], [0, 1]])]
    _, lattices = lattice_orbit(gens, 5, 10 ** 4, collect=True)
    orbit = set(lattices)
    std = LatticeClass.standard(5, 2)
    for _ in range(30):
        w = la.identity(2)
        for _ in range(rng.randint(1, 8)):
            g = rng.choice(gens)
            w = la.matmul(w, g if rng.random() < 0.5 else la.inverse(g))
        assert std.apply(w) in orbit


def test_hnf_canonical_under_change_of_basis():
    rng = random.Random(0)
    base = la.as_square([[F(1, 25), 3], [0, F(5, 7)]])
    a = LatticeClass.from_basis(5, base)
    for _ in range(20):
        u = la.as_square([[1, rng.randint(-5, 5)], [0, 1]])
        v = la.as_square([[1, 0], [rng.randint(-5, 5), 1]])
        assert LatticeClass.from_basis(5, la.matmul(la.matmul(base, u), v)) == a
    h = la.as_square(a.hnf)
    # same Z_5-lattice: transition matrices are 5-integral both ways
    assert integral_at(la.matmul(la.inverse(h), base), 5)
    assert integral_at(la.matmul(la.inverse(base), h), 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_monotone_in_generators(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    pool = [la.as_square([[1, F(rng.randint(1, 4), p ** rng.randint(0, 2))], [0, 1]]),
            la.as_square([[1, 0], [F(p ** 3 * rng.randint(1, 3)), 1]]),
            la.as_square([[rng.choice([u for u in range(1, 2 * p + 2) if u % p]), 0], [0, 1]])]
    small = lattice_orbit_index(pool[:1], p, 10 ** 5).index
    big = lattice_orbit_index(pool, p, 10 ** 5).index
    assert big >= small


def test_big_moduli_use_exact_fallback():
    rep = lattice_orbit_index([[[1, F(1, 2 ** 70)], [0, 1]]], 2, 100)
    assert rep.at_least and rep.precision_used >= 70


def test_three_dimensional_unipotent():
    gens = [[[1, F(1, 4), 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, F(1, 2)], [0, 0, 1]]]
    # Heisenberg-type group; cosets counted directly over a finite box of words
    elems = [la.matmul(la.power(la.as_square(gens[0]), i), la.power(la.as_square(gens[1]), j))
             for i in range(8) for j in range(4)]
    elems += [la.matmul(e, la.as_square([[1, 0, F(k, 8)], [0, 1, 0], [0, 0, 1]])) for e in elems[:] for k in range(8)]
    assert lattice_orbit_index(gens, 2, 10 ** 4).index == coset_count(elems, 2)


def test_dstar():
    assert [dstar_abs_inverse(d, 2) for d in (1, 2, 3, 4, 8)] == [1, 2, 2, 4, 8]
    assert dstar_abs_inverse(3, 5) == 1


def test_local_bound_examples():
    r = verify_local_bound(Experiment.build("nilpotent", 5, la.diag(F(1, 25), 1), E12))
    assert (r.index, r.bound, r.passed) == (25, 25, True)
    r = verify_local_bound(Experiment.build("nilpotent", 5, la.identity(2), E12))
    assert r.height == 1 and r.passed
    r = verify_local_bound(Experiment.build("torus", 7, [[1, F(1, 7)], [0, 1]], TORUS))
    assert r.passed and r.measured_c == F(7, 6)
    assert r.detail == {"torus_index": 6, "exp2p_index": 1}


def test_exp2p_bound():
    r = verify_local_bound(Experiment.build("exp2p", 3, la.diag(F(1, 81), 1), E12))
    # exp(6 X) with X = 3^-4 E12 has orbit 3^3; bound |6|_3 * 81 = 27
    assert (r.index, r.bound, r.passed) == (27, 27, True)


def test_cap_exhaustion_is_inconclusive():
    r = verify_local_bound(Experiment.build("cyclic", 5, la.identity(2), [[[0, F(1, 125)], [0, 0]]], cap=1))
    assert r.inconclusive and not r.passed
    r = verify_local_bound(Experiment.build("nilpotent", 5, la.diag(F(1, 125), 1), E12, cap=200))
    assert r.passed and not r.inconclusive


def test_mixed_and_saturation():
    e = Experiment.build("mixed", 5, [[1, F(1, 25)], [0, 1]], [], parts=[("torus", TORUS), ("nilpotent", E12)])
    r = verify_local_bound(e)
    assert r.passed and r.index >= 20
    assert saturation_index([TORUS, E12], 5) == 1
    assert saturation_index([[la.diag(5, 0)], [la.diag(0, 1)]], 5) == 5


def test_descriptor_roundtrip():
    e = Experiment.build("torus", 5, [[1, F(1, 25)], [0, 1]], TORUS, cap=500, level=6, c2=F(3, 2))
    assert Experiment.parse(e.format()) == e
    text = "# comment\ncase = nilpotent\np = 3\nconjugator = 1/9 0; 0 1\nbasis = 0 1; 0 0\n"
    assert verify_local_bound(Experiment.parse(text)).index == 9
    with pytest.raises(ValueError):
        Experiment.parse("case = nilpotent\np = 3\n")
    with pytest.raises(ValueError):
        Experiment.parse(text + "colour = red\n")


def test_global_bound_examples():
    r = verify_global_bound("nilpotent", la.identity(2), E12)
    assert r.height_f == 1 and r.product == 1 and r.passed
    r = verify_global_bound("nilpotent", la.diag(F(1, 12), 1), E12)
    assert (r.height_f, r.omega, r.product, r.passed, r.c_min) == (12, 2, 12, True, 1.0)
    assert r.c_at_most(1)
    with pytest.raises(ValueError):
        verify_global_bound("nilpotent", la.diag(F(1, 12), 1), E12, primes=[2])


def test_cyclic_index_dominates_height_on_conjugates():
    rng = random.Random(11)
    for _ in range(15):
        p = rng.choice([3, 5, 7])
        k = rng.randint(1, 3)
        u = la.as_square([[1, rng.randint(-3, 3)], [0, 1]])
        x = la.matmul(la.matmul(u, la.as_square([[0, F(1, p ** k)], [0, 0]])), la.inverse(u))
        h = local_height(x, p)
        rep = cyclic_exp_index(x, p, 10 ** 4)
        assert rep.index >= h


def test_non_compact_group_reaches_cap():
    # u(1/9) and l(3) generate a group that is not compact; the orbit is infinite
    rep = lattice_orbit_index([[[1, F(1, 9)], [0, 1]], [[1, 0], [3, 1]]], 3, 5000)
    assert rep.at_least and rep.index == 5000
