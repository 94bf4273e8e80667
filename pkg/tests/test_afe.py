import math

import numpy as np
import pytest

from gl4lab.afe import afe_sum, afe_sum_oracle, afe_sweep, cauchy_split_bound, dyadic_grid, v_nodes
from gl4lab.arith import ResourceError, primes_upto
from gl4lab.hecke import CoefficientTable, eisenstein_gl2, sym3_lift


@pytest.fixture(scope="module")
def toy():
    primes = primes_upto(3000)
    return CoefficientTable(sym3_lift(eisenstein_gl2(0.7, primes))), eisenstein_gl2(1.1, primes)


@pytest.mark.parametrize("P", [0.75, 3.0, 64.0, 700.0])
def test_double_sum_matches_single_loop(toy, P):
    table, gl2 = toy
    v = 0.1 + 1.7j
    a = afe_sum(table, gl2, P, v)
    b = afe_sum_oracle(table, gl2, P, v)
    assert abs(a - b) <= 1e-10 * max(abs(b), 1e-300)


def test_single_n2_is_equality(toy):
    # P in (1/2, 1): only n2 = 1 contributes, Cauchy-Schwarz is tight
    table, gl2 = toy
    cs = cauchy_split_bound(table, gl2, 0.8, 0.1 + 0.5j)
    assert cs.dial == 1.0
    assert cs.lhs == pytest.approx(cs.rhs, rel=1e-12)


def test_split_holds_on_grid(toy):
    table, gl2 = toy
    rows = afe_sweep(table, gl2, T=12.0, eps=0.1, P_cap=256.0, count=5)
    assert len(rows) == len(dyadic_grid(256.0)) * 5
    assert all(r["holds"] for r in rows)


def test_dial_is_harmonic_sum(toy):
    table, gl2 = toy
    P = 200.0
    cs = cauchy_split_bound(table, gl2, P, 0.1)
    m = math.isqrt(int(2 * P) - 1)  # n2^2 n < 2P: the support is open
    assert cs.dial == pytest.approx(sum(1 / k for k in range(1, m + 1)))


def test_v_nodes_on_segment():
    v = v_nodes(100.0, 0.2, 7)
    assert np.allclose(v.real, 0.2)
    assert np.max(np.abs(v.imag)) < math.log(100.0)


def test_budget(toy):
    table, gl2 = toy
    with pytest.raises(ResourceError):
        afe_sum(table, gl2, 1e6, 0.1, budget=1000)


def test_below_range_is_empty(toy):
    table, gl2 = toy
    assert afe_sum(table, gl2, 0.4, 0.1) == 0
