from itertools import product

import pytest

from adelic_heights.minkowski import (
    count_gl_by_enumeration, gl_order, is_torsion_witness, minkowski_constant,
    minkowski_torsion_check, torsion_scan,
)


def brute_gl_count(n, q):
    """Oracle: determinant by cofactor expansion over every matrix."""
    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]])
                   for j in range(len(m)))
    count = 0
    for flat in product(range(q), repeat=n * n):
        m = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
        count += det(m) % q != 0
    return count


@pytest.mark.parametrize("n,c", [(1, 2), (2, 48), (3, 11232)])
def test_minkowski_constant(n, c):
    assert minkowski_constant(n) == c == count_gl_by_enumeration(n)


@pytest.mark.parametrize("n", [1, 2])
def test_enumeration_matches_brute_force(n):
    assert count_gl_by_enumeration(n) == brute_gl_count(n, 3)


def test_other_fields():
    assert gl_order(2, 2) == 6 == count_gl_by_enumeration(2, 2)
    assert gl_order(2, 5) == 480


def test_torsion_checks():
    assert minkowski_torsion_check(1)
    assert minkowski_torsion_check(2)
    assert not minkowski_torsion_check(2, modulus=2)
    assert is_torsion_witness([[-1, 0], [0, -1]], 2)
    assert not is_torsion_witness([[-1, 0], [0, -1]], 3)


def test_finite_order_census():
    # GL(2, Z) has exactly these many elements of order <= 6 with entries in [-2, 2]
    scan = torsion_scan(2)
    assert scan.finite_order == 40 and scan.violations == 0
    # every finite-order element has order 1, 2, 3, 4 or 6; -I is in the box
    assert torsion_scan(2, modulus=2).witness is not None


def test_three_dimensional_box():
    scan = torsion_scan(3)
    assert scan.torsion_free
    # signed permutation matrices alone contribute 48
    assert scan.finite_order >= 48


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        torsion_scan(0)
    with pytest.raises(ValueError):
        torsion_scan(4, bound=3)
