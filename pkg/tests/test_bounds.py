import numpy as np
import pytest

from gl4lab.bounds import (
    BoundCheckResult,
    THETA,
    check_average_bounds,
    check_individual_bound,
    check_kim_sarnak,
    check_lrs_exterior,
    exterior_coefficients,
    theta_draws,
)
from gl4lab.hecke import complete_homogeneous_batch, partition_of, random_table, schur_batch


def test_theta_draws_respect_exponents():
    for p in (2, 7, 31):
        al = theta_draws(p, 200, seed=3)
        assert np.max(np.abs(al)) <= p ** float(THETA.theta4) * (1 + 1e-12)
        pair = np.abs(al[:, :, None] * al[:, None, :])
        iu = np.triu_indices(4, 1)
        assert np.max(pair[:, iu[0], iu[1]]) <= p ** float(THETA.theta6) * (1 + 1e-12)
        assert np.max(np.abs(np.prod(al, axis=1) - 1)) < 1e-12


def test_exterior_coefficients_equal_schur_nu_nu():
    al = theta_draws(5, 100, seed=0)
    ext = exterior_coefficients(al, 6)
    h = complete_homogeneous_batch(al, 20)
    for nu in range(1, 7):
        sch = schur_batch(h, partition_of(0, nu, 0))
        assert np.max(np.abs(ext[:, nu] - sch) / np.maximum(1, np.abs(sch))) < 1e-12


def test_uncorrected_exterior_differs():
    # without the e4 h_{nu-2} correction the coefficient is not the Schur value
    res = check_lrs_exterior([5], 6, 200)
    assert res.details["uncorrected_gap"] > 1e-3
    assert res.details["schur_mismatch"] < 1e-12


def test_nu_zero_ratio_is_exactly_one():
    res = check_kim_sarnak([2], 0, 10)
    assert res.worst_ratio == pytest.approx(1.0, abs=1e-15)
    assert res.passed


def test_small_sweeps_pass():
    for fn in (check_kim_sarnak, check_lrs_exterior, check_individual_bound):
        r = fn([2, 3, 5], 4, 200)
        assert r.passed, (fn.__name__, r.worst_ratio, r.witness)
        assert r.details["nonconstant_ratio" if fn is not check_individual_bound else "full_ratio"] < 1


def test_result_pass_flag_tracks_ratio():
    assert not BoundCheckResult("x", 1.5, None, True).passed
    assert BoundCheckResult("x", 0.5, None, False).passed


def test_average_bounds_chain(rng):
    tab = random_table(rng)
    res = check_average_bounds(tab, 10, 10, 200, 4, 3)
    chain = res["positivity_chain"]
    assert chain.details["factorization_error"] < 1e-9
    assert chain.passed
    assert chain.details["lhs"] <= chain.details["rhs"] * (1 + 1e-12)
