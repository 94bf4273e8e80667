import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl4lab.arith import divisors, inverse_mod, units
from gl4lab.expsums import (
    ConstraintError,
    KloostermanSpec,
    kloosterman_classical,
    kloosterman_general,
    kloosterman_general_literal,
    kloosterman_general_table,
    orthogonality_sweep,
    verify_orthogonality_reduction,
    verify_second_orthogonality,
    weil_bound_sweep,
)


def naive_kloosterman(m, n, c):
    return sum(cmath.exp(2j * math.pi * (m * v + n * inverse_mod(v, c)) / c) for v in units(c))


@pytest.mark.parametrize("m,n,c", [(1, 1, 1), (1, 1, 7), (3, 5, 12), (2, -4, 30), (0, 0, 9)])
def test_classical_matches_naive(m, n, c):
    assert abs(kloosterman_classical(m, n, c).value - naive_kloosterman(m, n, c)) < 1e-10


def test_ramanujan_sum_case():
    # S(0, n; c) is the Ramanujan sum; c = 12, n = 1 gives mu(12) = 0
    assert abs(kloosterman_classical(0, 1, 12).value) < 1e-12
    assert abs(kloosterman_classical(0, 1, 7).value - (-1)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3), st.integers(1, 3), st.integers(-20, 20), st.data())
def test_general_matches_literal(c, q1, q2, n, data):
    d1 = data.draw(st.sampled_from(divisors(c * q1)))
    d2 = data.draw(st.sampled_from(divisors(c * q1 * q2 // d1)))
    a = data.draw(st.sampled_from(units(c)))
    spec = KloostermanSpec(a, n, c, q1, q2, d1, d2)
    assert abs(kloosterman_general(spec).value - kloosterman_general_literal(spec)) < 1e-9


def test_table_matches_pointwise():
    m2, tab = kloosterman_general_table(3, 4, 2, 1, 2, 2)
    for n in range(-5, 6):
        ref = kloosterman_general(KloostermanSpec(3, n, 4, 2, 1, 2, 2)).value
        assert abs(tab[n % m2] - ref) < 1e-10


def test_divisibility_enforced():
    with pytest.raises(ConstraintError):
        KloostermanSpec(1, 1, 4, 1, 1, 3, 1)


def test_orthogonality_reductions_small_sweep():
    res = orthogonality_sweep(8, 3)
    assert res["first"][0] < 1e-9
    assert res["second"][0] < 1e-9
    assert verify_orthogonality_reduction(6, 2, 2, 3, 1, 4) < 1e-9
    assert verify_second_orthogonality(6, 2, 2, 3, 1, 4) < 1e-9


def test_weil_bound_small():
    r = weil_bound_sweep(31)
    assert r.passed and 0.5 < r.worst_ratio <= 1
