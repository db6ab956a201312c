import random
from fractions import Fraction
from functools import reduce
from math import lcm

import pytest
from hypothesis import given, settings, strategies as st

from adelic_heights import linalg as la
from adelic_heights.lattice_heights import (
    IntegralAutomorphism, LatticeHom, compose_with_automorphisms, conjugate_representation,
    hom_height_f, hom_height_p, random_unimodular, standard_basis,
)
from adelic_heights.sampling import random_hom

F = Fraction


def test_heights_examples():
    assert hom_height_p(LatticeHom.from_rows([[1, 0], [0, 1]]), 3) == 1
    assert hom_height_p(LatticeHom.from_rows([[F(1, 12)]]), 2) == 4
    assert hom_height_p(LatticeHom.from_rows([[F(1, 12)]]), 5) == 1
    assert hom_height_f(LatticeHom.from_rows([[3, -4]])) == 1
    assert hom_height_f(LatticeHom.from_rows([[F(1, 12), F(1, 10)]])) == 60
    assert hom_height_f(LatticeHom.from_rows([[F(1, 7 ** 3)]])) == 343


def test_compose_examples():
    phi = LatticeHom.from_rows([[F(1, 5)]])
    one = IntegralAutomorphism.of([[1]])
    assert compose_with_automorphisms(phi, one, one) == phi
    flipped = compose_with_automorphisms(phi, IntegralAutomorphism.of([[-1]]), one)
    assert flipped.entries == ((F(-1, 5),),)
    assert hom_height_f(flipped) == 5
    with pytest.raises(ValueError):
        compose_with_automorphisms(phi, IntegralAutomorphism.of([[1, 0], [0, 1]]), one)


def test_automorphism_validation():
    with pytest.raises(ValueError):
        IntegralAutomorphism.of([[2, 0], [0, 1]])
    IntegralAutomorphism.of([[2, 0], [0, 1]], prime=3)


def test_denominators_2_and_9_preserved():
    rng = random.Random(7)
    phi = LatticeHom.from_rows([[F(1, 2), 3, F(5, 9)], [0, 1, 1], [F(7, 18), 0, 2]])
    for _ in range(20):
        k, u = random_unimodular(rng, 3), random_unimodular(rng, 3)
        psi = compose_with_automorphisms(phi, k, u)
        # oracle: recompute the lcm of the denominators directly
        assert reduce(lcm, (x.denominator for x in la.entries(psi.entries)), 1) == 18


def test_conjugate_representation():
    ident = conjugate_representation(la.identity(2), standard_basis(2))
    assert ident.entries == la.identity(4)
    g = [[1, F(1, 5)], [0, 1]]
    hom = conjugate_representation(g, [la.diag(1, -1)])
    # g diag(1,-1) g^-1 = [[1, -2/5], [0, -1]]
    assert [row[0] for row in hom.entries] == [1, F(-2, 5), 0, -1]
    assert hom_height_p(hom, 5) == 5
    with pytest.raises(ValueError):
        conjugate_representation([[1, 1], [1, 1]], [la.diag(1, 0)])


def test_text_format_roundtrip():
    phi = LatticeHom.from_rows([[F(1, 3), 2], [0, F(-5, 4)]])
    assert LatticeHom.parse(phi.format()) == phi


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_invariance_property(seed):
    rng = random.Random(seed)
    phi = random_hom(rng, rng.randint(1, 4), rng.randint(1, 4))
    k = random_unimodular(rng, phi.rows)
    u = random_unimodular(rng, phi.cols)
    psi = compose_with_automorphisms(phi, k, u)
    assert hom_height_f(psi) == hom_height_f(phi)
    for p in (2, 3, 5, 7):
        assert hom_height_p(psi, p) == hom_height_p(phi, p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_random_unimodular(seed, n):
    u = random_unimodular(random.Random(seed), n)
    assert abs(la.det(u.matrix)) == 1
    assert la.matmul(u.matrix, u.inverse) == la.identity(n)
