from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from adelic_heights import linalg as la
from adelic_heights.siegel import (
    SamplerConfig, SiegelParams, adjoint_action, averaged_form, check_siegel_claim,
    fit_domination, group_closure, height_comparison_experiment, is_invariant,
    is_positive_definite, iwasawa, mobius_i, nx_ay, p_map, rational_rotation, sample_siegel,
    siegel_member, torus_ray_decreasing,
)

F = Fraction
HALF = SiegelParams(F(1, 2), F(1, 2))
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
positive = st.fractions(min_value=F(1, 20), max_value=50, max_denominator=40)


def test_iwasawa_examples():
    assert iwasawa(la.identity(2)) == (0, 1)
    assert iwasawa([[1, 3], [0, 1]]) == (3, 1)
    assert iwasawa([[2, 0], [0, F(1, 2)]]) == (0, 4)
    with pytest.raises(ValueError):
        iwasawa([[2, 0], [0, 1]])


def test_membership_examples():
    assert siegel_member(la.identity(2), HALF)
    assert not siegel_member([[1, 3], [0, 1]], HALF)
    for n in range(1, 6):
        assert siegel_member([[n, 0], [0, F(1, n)]], HALF)
    with pytest.raises(ValueError):
        SiegelParams(0, 1)


def test_p_map_examples():
    assert p_map(la.identity(2)) == 1
    assert p_map([[3, 0], [0, F(1, 3)]]) == F(1, 81)
    # upper unipotents commute with E_12
    assert p_map([[1, 7], [0, 1]]) == 1
    # the lower unipotent gives (1 + u^2)^2
    assert p_map([[1, 0], [2, 1]]) == 25


@given(rationals, positive, st.integers(-6, 6), st.integers(1, 6))
def test_iwasawa_and_p_map_identities(x, s, m, n):
    g = la.matmul(nx_ay(x, s), rational_rotation(m, n))
    xi, yi = iwasawa(g)
    assert (xi, yi) == mobius_i(g) == (x, s * s)
    assert p_map(g) == 1 / (yi * yi) > 0
    assert p_map(g) == p_map(nx_ay(x, s))


def test_claim_examples():
    assert check_siegel_claim([la.identity(2)], HALF) == (1, True)
    ray = [((t, 0), (0, F(1, t))) for t in (F(k) for k in range(1, 11))]
    assert check_siegel_claim(ray, HALF) == (1, True)
    assert torus_ray_decreasing(range(1, 11))
    with pytest.raises(ValueError):
        check_siegel_claim([[[1, 3], [0, 1]]], HALF)


def test_sampler_is_seeded_and_inside():
    cfg = SamplerConfig(n_samples=300, seed=5)
    pts = sample_siegel(cfg)
    assert pts == sample_siegel(cfg)
    assert all(siegel_member(g, cfg.params) for g in pts)
    c, ok = check_siegel_claim(pts, cfg.params)
    assert ok and c == 1


def test_torus_family_fit():
    # diag(n/m, m/n): H_R = n/m <= n*m = H_f
    pairs = []
    for n in range(1, 30):
        for m in range(1, n + 1):
            if F(n, m).denominator == m:
                g = ((F(n, m), 0), (0, F(m, n)))
                from adelic_heights.siegel import SiegelPoint
                pairs.append(SiegelPoint.of(g, HALF).heights())
    fit = fit_domination(pairs, c=0, a_max=1)
    assert fit.b == 1 and fit.violations == 0


def test_fit_edge_cases():
    assert fit_domination([(F(1), F(1))]).violations == 0
    with pytest.raises(ValueError):
        fit_domination([])
    # nothing on the grid fits: violations are reported
    bad = fit_domination([(F(10 ** 6), F(2))], c=0, a_max=1, b_max=2)
    assert bad.violations == 1


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 1000))
def test_height_comparison(seed):
    fit, rows = height_comparison_experiment(SamplerConfig(n_samples=300, seed=seed))
    assert fit.violations == 0 and fit.b <= 2
    assert len(rows) == 300 and rows[0].csv().count(",") == 6


def test_averaged_form_finite_group():
    group = group_closure([adjoint_action(((0, -1), (1, 0))),
                           adjoint_action(((1, 0), (0, -1)))])
    skew = la.as_square([[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 3]])
    q = averaged_form(group, skew)
    assert is_positive_definite(q) and is_invariant(q, group)
    assert all(x.denominator == 1 for x in la.entries(q))
    assert not is_positive_definite(la.as_square([[1, 2], [2, 1]]))
    with pytest.raises(ValueError):
        group_closure([[[1, 1], [0, 1]]], limit=50)
