import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adelic_heights import _kernels as K


def _random_cols(rng, d, p, k):
    return rng.integers(0, p ** k, size=(d, d)).astype(np.int64)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.integers(1, 5))
def test_hnf_compiled_matches_interpreted(seed, p, d, k):
    rng = np.random.default_rng(seed)
    cols = _random_cols(rng, d, p, k)
    pk = p ** k
    fast = K.hnf_mod(cols, p, k, pk)
    slow = K.interpreted(K.hnf_mod)(cols.astype(object), p, k, pk)
    assert fast.tolist() == slow.tolist()
    # shape of a canonical form
    for i in range(d):
        e = fast[i, i]
        assert e > 0 and pk % e == 0
        for j in range(i + 1, d):
            assert 0 <= fast[i, j] < e
        for j in range(i):
            assert fast[i, j] == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3, 5]), st.integers(1, 3))
def test_hnf_idempotent(seed, p, d):
    rng = np.random.default_rng(seed)
    k = 3
    h = K.hnf_mod(_random_cols(rng, d, p, k), p, k, p ** k)
    h2 = K.hnf_mod(np.where(h == p ** k, 0, h), p, k, p ** k)
    assert h.tolist() == h2.tolist()


@given(st.integers(0, 2 ** 61), st.integers(0, 2 ** 61), st.integers(2, 2 ** 62 - 1))
def test_mulmod(a, b, m):
    assert K.mulmod(np.int64(a), np.int64(b), np.int64(m)) == a * b % m
    assert K.interpreted(K.mulmod)(a, b, m) == a * b % m


@given(st.integers(1, 10 ** 9), st.sampled_from([2, 3, 5, 7, 9, 25, 3 ** 20]))
def test_invmod(a, m):
    from math import gcd
    if gcd(a, m) != 1:
        return
    assert K.invmod(a, m) * a % m == 1


def test_count_invertible_small():
    assert K.count_invertible_mod(1, 3) == 2
    assert K.interpreted(K.count_invertible_mod)(2, 3) == K.count_invertible_mod(2, 3) == 48
    assert K.count_invertible_mod(2, 2) == 6


def test_torsion_scan_paths_agree():
    w1 = np.zeros((2, 2), dtype=np.int64)
    w2 = np.zeros((2, 2), dtype=np.int64)
    assert K.torsion_scan(2, 1, 2, 6, w1) == K.interpreted(K.torsion_scan)(2, 1, 2, 6, w2)
    assert w1.tolist() == w2.tolist()


def test_interpreted_of_plain_function_is_itself():
    def f(x):
        return x
    assert K.interpreted(f) is f


@pytest.mark.skipif(not K.USE_NUMBA, reason="numba disabled")
def test_kernels_are_compiled():
    assert hasattr(K.hnf_mod, "py_func")
