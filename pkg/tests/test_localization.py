import math

import numpy as np
import pytest

from gl4lab.oscillatory.localization import (
    LocalizationScales,
    omega_components,
    scenario_for,
    stationary_prediction,
    verify_localization,
)


def test_scale_examples():
    s = LocalizationScales(H=2, d1=1, d2=1, q=1, N=100, n2=1, tau=1.0, T=10, eps=0.0)
    assert s.N_flat == pytest.approx(0.16)
    s = LocalizationScales(H=1, d1=1, d2=1, q=1, N=100, n2=1, tau=0.01, T=10, eps=0.0)
    assert s.N_natural == pytest.approx(1e-2)
    s = LocalizationScales(H=1, d1=1, d2=1, q=1, N=100, n2=2, tau=1.0, T=10, eps=0.0)
    assert s.modulus_and_scale(4) == (2.0, 64.0)


def test_scales_reject_nonpositive():
    with pytest.raises(ValueError):
        LocalizationScales(H=1, d1=1, d2=1, q=0, N=100, n2=1, tau=1.0, T=10, eps=0.0)


def test_scenario_for_hits_requested_scale():
    sc = scenario_for(30.0, 3000.0, d1=2, n2=1, q=1, h=1.0)
    assert sc.N_natural == pytest.approx(30.0, rel=1e-12)
    c, _ = sc.modulus_and_scale(1.0)
    assert sc.N * sc.tau / (c * sc.q) == pytest.approx(3000.0)


def test_single_scenario_localizes(sym3_spec):
    sc = scenario_for(30.0, 3000.0, 2, 1, 1, 1, 1.0)
    rep = verify_localization(sym3_spec, sc, 1.0)
    assert rep.out_band_max < 1e-6 * rep.in_band_peak
    assert rep.phase_rel_error <= 0.02
    assert rep.passed


def test_stationary_value_predicted(sym3_spec):
    sc = scenario_for(100.0, 3000.0)
    c, g = sc.modulus_and_scale(1.0)
    r = sc.tau / (c * sc.q)
    y = 3 * 100.0 / g
    om = omega_components(sym3_spec, sc.N, [y], r)
    pred = stationary_prediction(sym3_spec, sc.N, y, r)
    assert abs(om[-1][0] / pred - 1) < 0.01


def test_degenerate_band_reported(sym3_spec):
    sc = LocalizationScales(H=1, d1=1, d2=1, q=1, N=100, n2=1, tau=0.01, T=10, eps=0.0)
    rep = verify_localization(sym3_spec, sc, 1.0)
    assert not rep.passed and "degenerate" in rep.note
