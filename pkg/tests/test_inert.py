import math

import numpy as np
import pytest

from gl4lab.oscillatory.inert import AFEWeight, ConstantWeight, PhaseWeight, measure_inert
from gl4lab.oscillatory.weights import BumpWeight


def test_constant_weight_has_zero_higher_constants():
    prof = measure_inert(ConstantWeight(2.0), X=1.0)
    assert prof.measured_constants[(0,)] == 2.0
    assert all(prof.measured_constants[(j,)] == 0.0 for j in range(1, 5))


@pytest.mark.parametrize("T", [10.0, 1e3, 1e6])
def test_afe_weight_inert_at_log_scale(T):
    # x^(-1/2 - v) with |Im v| <= log T costs at most a factor (1 + log T / X)^j = 2^j over the bump
    bump = BumpWeight(scale=1.0)
    ref = measure_inert(bump, X=1.0).measured_constants
    v = 0.1 + 1j * math.log(T)
    prof = measure_inert(AFEWeight(v, bump), X=math.log(T))
    assert prof.is_inert({j: 2**j * ref[(j,)] for j in range(5)})


def test_phase_weight_is_not_inert_below_frequency():
    T = 200.0
    w = PhaseWeight(T, BumpWeight(scale=1.0))
    small = measure_inert(w, X=T / 20)
    right = measure_inert(w, X=2 * math.pi * T * 2)
    assert small.measured_constants[(4,)] > 1e4 * right.measured_constants[(4,)]
    assert not small.is_inert(1.0)


def test_analytic_derivatives_match_differences():
    w = AFEWeight(0.2 + 3j, BumpWeight(scale=1.0))
    x = np.linspace(1.1, 1.9, 7)
    h = 1e-5
    fd = (w(x + h) - w(x - h)) / (2 * h)
    np.testing.assert_allclose(w.derivative(x, 1), fd, rtol=1e-6, atol=1e-9)


def test_fd_path_flags_poor_accuracy():
    rng = np.random.default_rng(1)
    noisy = lambda x: np.sin(x) + 1e-9 * rng.standard_normal(np.shape(x))  # noqa: E731
    prof = measure_inert(noisy, X=1.0, max_order=3)
    assert any(f["order"] == 3 for f in prof.flags)


def test_x_below_one_rejected():
    with pytest.raises(ValueError):
        measure_inert(ConstantWeight(), X=0.5)
