import math

import numpy as np
import pytest

from gl4lab.oscillatory.calibration import classical_bessel, degree1_fourier_check
from gl4lab.oscillatory.gamma_ratio import (
    gamma_ratio,
    gamma_ratio_mp,
    generic_parameters,
    kernel_mp,
    pole_margin,
    residue_series,
    residue_series_direct,
)
from gl4lab.oscillatory.hankel import kernel_values
from gl4lab.oscillatory.kernel import (
    BesselSpec,
    KernelError,
    bessel_kernel,
    fit_asymptotic_coefficients,
    kernel_asymptotic,
    kernel_contour,
    kernel_interpolated,
    negative_reach,
    node_count,
    residual_slope,
)


@pytest.mark.parametrize("x", [0.5, 3.0, 11.0])
@pytest.mark.parametrize("eta", [0, 1])
def test_residue_recursion_matches_direct_sum(x, eta):
    lams = (0.3j, 0.1j, -0.1j, -0.3j)
    a = residue_series(x, lams, eta)
    b = residue_series_direct(x, lams, eta)
    assert abs(a - b) <= 1e-14 * max(1.0, abs(b))


def test_gamma_ratio_vectorized_matches_mpmath():
    lams = (0.4j, 0.2 + 0.1j, -0.2 + 0.1j, -0.4j - 0.2j)
    s = np.array([0.5 + 3j, 1.7 - 10j, -0.3 + 0.5j])
    for eta in (0, 1):
        got = gamma_ratio(s, lams, eta)
        ref = np.array([complex(gamma_ratio_mp(complex(z), lams, eta)) for z in s])
        np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_pole_margin_and_generic():
    lams = (0.3j, 0.1j, -0.1j, -0.3j)
    # poles at re = 0 and -1 (eta = 1) and further left by 2
    assert pole_margin(0.5, lams) == pytest.approx(0.5)
    assert pole_margin(-0.25, lams) == pytest.approx(0.25)
    assert generic_parameters(lams)
    assert not generic_parameters((1.0, -1.0, 0.2j, -0.2j))


def test_degree_two_against_classical_bessel():
    t = 1.3
    spec = BesselSpec((1j * t, -1j * t))
    for x in (1.0, 4.5, 12.0, 20.0):
        for sg in (1, -1):
            ref = classical_bessel(t, sg * x)
            assert abs(kernel_contour(spec, sg * x) - ref) <= 1e-12 * abs(ref)
            assert abs(bessel_kernel(spec, sg * x) - ref) <= 1e-9 * abs(ref)


def test_degree_one_is_additive_character():
    spec = BesselSpec((0j,))
    for x in (0.3, 1.7, 4.0):
        assert kernel_mp(x, spec.lambdas) == pytest.approx(np.exp(2j * np.pi * x), abs=1e-12)
        assert kernel_mp(-x, spec.lambdas) == pytest.approx(np.exp(-2j * np.pi * x), abs=1e-12)


def test_degree_one_fourier_small():
    out = degree1_fourier_check(count=2, ys=(1.0,))
    assert out["max_rel_err"] < 1e-8


def test_interpolant_matches_contour(sym3_spec):
    xs = np.array([1e-3, 0.07, 0.9, 6.3, 17.0, 29.5])
    for sg in (1, -1):
        got = kernel_interpolated(sym3_spec, sg * xs)
        ref = np.array([kernel_contour(sym3_spec, sg * x) for x in xs])
        # absolute: the negative side falls far below the interpolation floor
        assert np.max(np.abs(got - ref)) < 1e-12 * np.max(np.abs(ref))


def test_asymptotic_overlap(sym3_spec):
    xs = np.linspace(20, 50, 13)
    ref = np.array([kernel_contour(sym3_spec, x) for x in xs])
    asym = kernel_asymptotic(sym3_spec, xs)
    assert np.max(np.abs(asym - ref) / np.abs(ref).max()) < 1e-5


def test_exponent_shift(sym3_spec):
    # x^(-3/8) amplitude: rho in t = x^(1/4) is -(d - 1)/2
    assert sym3_spec.rho == pytest.approx(-1.5)
    assert abs(sym3_spec.coeffs[1][0]) > 0


def test_kernel_bounded_small_and_large(sym3_spec):
    x = np.geomspace(1e-4, 1.0, 25)
    for sg in (1, -1):
        v = np.abs(np.sqrt(x) * kernel_values(sym3_spec, sg * x))
        assert np.all(np.isfinite(v)) and v.max() < 1.0
    x = np.geomspace(1.0, 1e4, 40)
    v = np.abs(kernel_values(sym3_spec, x)) * np.sqrt(x) / (1 + x**0.125)
    assert v.max() < 1.0


def test_negative_side_decays(sym3_spec):
    xs = np.array([40.0, 80.0, 160.0])
    v = np.abs([kernel_contour(sym3_spec, -x) for x in xs])
    assert v[0] > v[1] > v[2]
    assert v[2] < 1e-20


def test_reach_and_nodes():
    assert negative_reach(BesselSpec((0.1j, -0.1j))) > negative_reach(BesselSpec((0j,)))
    assert node_count(1, 30.0) > node_count(4, 30.0) >= 256


def test_fit_ill_conditioned_raises(sym3_spec):
    xs = np.linspace(100.0, 100.5, 6)
    with pytest.raises(KernelError):
        fit_asymptotic_coefficients(sym3_spec, 3, xs)


def test_residual_slope_of_power_law():
    x = np.geomspace(10, 1000, 200)
    res = x ** (-0.375 - 0.5) * (1 + 0.2 * np.cos(x))
    assert residual_slope(x, res) == pytest.approx(-0.5, abs=0.05)


def test_spec_validation():
    with pytest.raises(ValueError):
        BesselSpec(())
