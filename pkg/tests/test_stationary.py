import math

import numpy as np
import pytest

from gl4lab.oscillatory.stationary import (
    decay_bound,
    extracted_inert_factor,
    has_stationary_point,
    lam_derivative,
    stationary_integral,
    stationary_integral_q,
)
from gl4lab.oscillatory.weights import BumpWeight

GAMMA, RHO = 4.0, 0.75


@pytest.mark.parametrize("sign", [1, -1])
def test_contour_matches_real_line(sign):
    a = stationary_integral(GAMMA, 40.0, RHO, sign=sign, method="real")
    b = stationary_integral(GAMMA, 40.0, RHO, sign=sign, method="contour")
    assert abs(a - b) < 1e-12


def test_stationary_point_location():
    assert has_stationary_point(GAMMA, RHO, -1)
    assert not has_stationary_point(GAMMA, RHO, 1)
    assert not has_stationary_point(GAMMA, 1.2, -1)


def test_leading_term_of_stationary_phase():
    # sqrt(lam) |I^-| -> w(1) / sqrt(phi''(1)), phi''(1) = 1 - 1/gamma
    w1 = float(BumpWeight(scale=RHO)(np.array([1.0]))[0])
    lead = w1 / math.sqrt(1 - 1 / GAMMA)
    for lam, tol in ((1e3, 1e-5), (1e5, 1e-9)):
        val = math.sqrt(lam) * abs(stationary_integral(GAMMA, lam, RHO, sign=-1))
        assert abs(val - lead) < tol


def test_no_stationary_point_decays_below_power_bound():
    vals = [abs(stationary_integral(GAMMA, lam, RHO, sign=1)) for lam in (20.0, 200.0, 2000.0)]
    assert vals[0] > vals[1] > vals[2]
    for A in range(1, 6):
        assert vals[2] < decay_bound(GAMMA, 2000.0, RHO, 1.0, A)


def test_inert_factor_guards_range():
    with pytest.raises(ValueError):
        extracted_inert_factor(GAMMA, 100.0, 0.3)


def test_lam_derivative_of_power():
    f = lambda l: l**3  # noqa: E731
    assert lam_derivative(f, 2.0) == pytest.approx(24.0, rel=1e-10)
    assert lam_derivative(f, 2.0, step=1e-3) == pytest.approx(24.0, rel=1e-10)


def test_quad_value_reports_convergence():
    q = stationary_integral_q(GAMMA, 100.0, RHO, sign=-1)
    assert q.error <= 1e-12 and q.method == "contour"
    with pytest.raises(ValueError):
        stationary_integral_q(1.0, 100.0, RHO)


def test_interior_point_scales_like_inverse_root():
    # the critical point x = 1 lies in [rho, 2 rho] only for 1/2 <= rho <= 1
    rho = RHO
    lams = np.array([1e2, 1e3, 1e4])
    vals = np.abs([stationary_integral(GAMMA, lam, rho, sign=-1) for lam in lams])
    slope = np.polyfit(np.log(lams), np.log(vals), 1)[0]
    assert abs(slope + 0.5) <= 0.05


def test_point_outside_support_decays_fast():
    # rho / sqrt(2) < 1/2: x = 1 lies outside [rho, 2 rho]
    rho = 0.3
    lams = (100.0, 1e3, 1e4)
    vals = [abs(stationary_integral(GAMMA, lam, rho, sign=-1)) for lam in lams]
    # faster than lam^-5 once past the first decade
    assert lams[2] ** 5 * vals[2] < 1e-6 * lams[1] ** 5 * vals[1]
    for A in range(1, 6):
        assert vals[2] < decay_bound(GAMMA, lams[2], rho, 2.0, A)
