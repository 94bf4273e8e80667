"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time
from importlib import resources

import numpy as np
import pytest

from gl4lab.afe import afe_sum, afe_sum_oracle, cauchy_split_bound, dyadic_grid, v_nodes
from gl4lab.arith import primes_upto
from gl4lab.bounds import sweep_all
from gl4lab.cli import main
from gl4lab.expsums import orthogonality_sweep, weil_bound_sweep
from gl4lab.hecke import CoefficientTable, eisenstein_gl2, hecke_sweep, sym3_lift
from gl4lab.oscillatory.calibration import degree1_fourier_check, degree2_bessel_check
from gl4lab.oscillatory.kernel import (
    BesselSpec,
    calibrate,
    evaluate_fit,
    fit_asymptotic_coefficients,
    kernel_asymptotic,
    kernel_contour,
    residual_slope,
)
from gl4lab.oscillatory.localization import scenario_for, verify_localization
from gl4lab.oscillatory.stationary import decay_bound, extracted_inert_factor, lam_derivative, stationary_integral
from gl4lab.oscillatory.weights import LogNormalWeight
from gl4lab.sieve import classical_trials, hybrid_trials, tau_monotonicity
from gl4lab.voronoi import VoronoiScenario, verify

pytestmark = pytest.mark.slow

SEED = 0


@pytest.fixture
def verdict(capsys):
    """Call with (criterion, ok, detail); prints the line past pytest's capture."""
    t0 = time.perf_counter()

    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({time.perf_counter() - t0:.1f} s)")
        return ok

    return emit


def test_criterion_01_hecke_relation(verdict):
    res = hecke_sweep([2, 3, 5, 7], nu_max=4, draws=1000, seed=SEED)
    ok = res["max_residual"] <= 1e-9
    assert verdict(1, ok, f"max residual {res['max_residual']:.2e} over {res['checks']} checks")


def test_criterion_02_coefficient_bounds(verdict):
    results = sweep_all(50, 6, 1000, SEED)
    ok = True
    parts = []
    for r in results:
        strict = r.details.get("nonconstant_ratio", r.details.get("full_ratio"))
        ok = ok and r.passed and strict < 1
        parts.append(f"{r.inequality_id} {r.worst_ratio:.4f} (nu>=1: {strict:.4f})")
    assert verdict(2, ok, "; ".join(parts))


def test_criterion_03_exponential_sums(verdict):
    ortho = orthogonality_sweep(30, 5)
    weil = weil_bound_sweep(100)
    r1, r2 = ortho["first"][0], ortho["second"][0]
    ok = r1 < 1e-6 and r2 < 1e-6 and weil.passed
    assert verdict(3, ok, f"{ortho['cases']} cases, residuals {r1:.1e}/{r2:.1e}; Weil max {weil.worst_ratio:.4f}")


def test_criterion_04_classical_sieve(verdict):
    res = classical_trials(500, SEED, n_max=64, c_max=64)
    ok = res["max_ratio"] <= 1 + 1e-9 and res["max_exact_ratio"] <= 1 + 1e-9
    assert verdict(4, ok, f"max ratio {res['max_ratio']:.4f}, worst-case eigenvalue ratio {res['max_exact_ratio']:.4f}")


def test_criterion_05_hybrid_sieve(verdict):
    base = json.loads(resources.files("gl4lab").joinpath("data/hybrid_baseline.json").read_text())
    ref = {round(r["gamma"], 9): r["max_ratio"] for r in base["results"]}
    ok = True
    parts = []
    for g in (1 / 3, 1.0, 2.0):
        res = hybrid_trials(g, 100, seed=7)
        b = ref[round(g, 9)]
        within = math.isfinite(res["max_ratio"]) and b / 2 <= res["max_ratio"] <= 2 * b
        ok = ok and within
        parts.append(f"gamma {g:.3g}: {res['max_ratio']:.3f} vs {b:.3f}")
    mono = tau_monotonicity(20, SEED)
    ok = ok and mono["violations"] == 0
    parts.append(f"tau violations {mono['violations']}")
    assert verdict(5, ok, "; ".join(parts))


def test_criterion_06_kernel_calibration(verdict):
    d1 = degree1_fourier_check(count=20, seed=SEED)
    d2 = degree2_bessel_check(xs=np.linspace(1.0, 20.0, 39))
    ok = d1["max_rel_err"] <= 1e-8 and d2["max_rel_err"] <= 1e-6
    assert verdict(6, ok, f"degree 1 {d1['max_rel_err']:.1e}, degree 2 {d2['max_rel_err']:.1e}")


def test_criterion_07_asymptotics(verdict, sym3_spec):
    spec = BesselSpec(tuple(0.1 * np.array([3j, 1j, -1j, -3j])))
    xs = np.geomspace(50.0, 800.0, 120)
    vals = np.array([kernel_contour(spec, x) for x in xs])
    ok = True
    parts = []
    for K in (1, 2, 3):
        fit = fit_asymptotic_coefficients(spec, K, xs, vals)
        s = residual_slope(xs, vals - evaluate_fit(spec, fit, xs))
        ok = ok and abs(s + K / 4) <= 0.3
        parts.append(f"K={K} fit {s:.2f}")
    calibrate(spec)
    for K in (1, 2, 3):
        s = residual_slope(xs, vals - kernel_asymptotic(spec, xs, nterms=K))
        ok = ok and abs(s + K / 4) <= 0.3
        parts.append(f"K={K} truncation {s:.2f}")
    band = np.linspace(20.0, 50.0, 31)
    ref = np.array([kernel_contour(sym3_spec, x) for x in band])
    overlap = float(np.max(np.abs(kernel_asymptotic(sym3_spec, band) - ref) / np.abs(ref)))
    ok = ok and overlap <= 1e-5
    neg_x = np.geomspace(20.0, 200.0, 6)
    neg = np.abs([kernel_contour(sym3_spec, -x) for x in neg_x])
    neg_slope = np.polyfit(np.log(neg_x), np.log(neg), 1)[0]
    ok = ok and bool(np.all(np.diff(neg) < 0)) and neg_slope < -5
    parts.append(f"overlap {overlap:.1e}, negative log-log slope {neg_slope:.1f}")
    assert verdict(7, ok, "; ".join(parts))


def test_criterion_08_stationary_phase(verdict):
    gamma = 4.0
    lams = np.geomspace(1e2, 1e6, 9)
    ok = True
    worst = 0.0
    for rho in (0.5, 1.0, 2.0):
        vals = np.array([abs(stationary_integral(gamma, lam, rho, sign=1)) for lam in lams])
        for A in range(1, 6):
            r = vals / np.array([decay_bound(gamma, lam, rho, 2.0, A) for lam in lams])
            # bounded: no later ratio exceeds the largest one in the first decade
            ok = ok and bool(np.all(np.isfinite(r))) and r.max() <= r[lams <= 1e3].max()
            worst = max(worst, float(r.max()))
    rho = 0.75
    grid = np.geomspace(1e2, 1e6, 5)
    v = [abs(extracted_inert_factor(gamma, lam, rho)) for lam in grid]
    dv = [abs(lam_derivative(lambda l: extracted_inert_factor(gamma, l, rho), lam, step=1e-3)) for lam in grid]
    # one-inert in lam: |lam dv/dlam| <= sup |v|
    ok = ok and max(dv) <= max(v)
    # negative control: without e(lam (gamma - 1)) the derivative grows like 2 pi (gamma - 1) |v| lam
    raw = [abs(lam_derivative(lambda l: math.sqrt(l) * stationary_integral(gamma, l, rho, sign=-1), lam, step=1e-3))
           for lam in grid]
    growth = np.polyfit(np.log(grid), np.log(raw), 1)[0]
    ok = ok and abs(growth - 1) < 0.05 and raw[-1] > 1e4 * max(v)
    assert verdict(8, ok, f"max decay ratio {worst:.2e}; max |lam dv| {max(dv):.3f} <= {max(v):.4f}; "
                          f"control slope {growth:.3f}")


def test_criterion_09_localization(verdict, sym3_spec):
    cases = [(10, 1, 1, 1, 1, 1.0), (30, 2, 1, 1, 1, 1.0), (100, 1, 1, 2, 1, 2.0),
             (300, 1, 2, 1, 2, 1.0), (1000, 1, 1, 1, 1, 3.0)]
    ok = True
    worst_band, worst_phase = 0.0, 0.0
    for Nn, d1, d2, n2, q, h in cases:
        sc = scenario_for(float(Nn), 3000.0, d1, d2, n2, q, h)
        rep = verify_localization(sym3_spec, sc, h, band_tol=1e-6, phase_tol=0.02)
        ok = ok and rep.passed
        worst_band = max(worst_band, rep.out_band_max / rep.in_band_peak)
        worst_phase = max(worst_phase, rep.phase_rel_error)
    assert verdict(9, ok, f"out-of-band/peak {worst_band:.1e}, phase error {worst_phase:.1e}")


@pytest.fixture(scope="module")
def voronoi_table():
    return CoefficientTable(sym3_lift(eisenstein_gl2(0.7, primes_upto(20000))))


def test_criterion_10_voronoi(verdict, voronoi_table):
    lams = voronoi_table.source.lambdas
    cases = [(a, c, 1, 1, N) for a, c in ((1, 1), (1, 2), (2, 3), (3, 4)) for N in (30.0, 60.0)]
    cases += [(1, 1, 2, 1, 30.0), (1, 1, 1, 2, 30.0), (1, 2, 2, 1, 30.0)]
    ok = True
    parts = []
    for a, c, q1, q2, N in cases:
        w = LogNormalWeight(1.5 * N, 0.25, tuple(1 + l for l in lams))
        rep = verify(VoronoiScenario(voronoi_table, w, a, c, q1, q2))
        tol = 1e-3 if max(q1, q2) > 1 else 1e-4
        ok = ok and rep.rel_err <= tol
        parts.append(f"c={c},q=({q1},{q2}),N={N:g}: {rep.rel_err:.1e}")
    assert verdict(10, ok, "; ".join(parts))


def test_criterion_11_afe(verdict):
    primes = primes_upto(5000)
    table = CoefficientTable(sym3_lift(eisenstein_gl2(0.7, primes)))
    gl2 = eisenstein_gl2(1.3, primes)
    worst, holds, points = 0.0, True, 0
    for P in dyadic_grid(1024.0):
        for v in v_nodes(12.0, 0.1, 9):
            a = afe_sum(table, gl2, P, v)
            b = afe_sum_oracle(table, gl2, P, v)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
            holds = holds and cauchy_split_bound(table, gl2, P, v).holds
            points += 1
    ok = holds and worst <= 1e-10
    assert verdict(11, ok, f"{points} grid points, split holds: {holds}, oracle rel err {worst:.1e}")


def test_criterion_12_determinism(verdict, tmp_path):
    runs = [["verify-hecke", "--draws", "200"],
            ["sieve-bench", "--classical-trials", "50", "--hybrid-trials", "10", "--monotone-trials", "3"],
            ["afe-toy", "--P-cap", "256"]]
    ok = True
    for args in runs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{args[0]}-{k}"
            assert main(args + ["--seed", "11", "--report-dir", str(out)]) == 0
            blobs.append((out / f"{args[0]}.jsonl").read_bytes())
        ok = ok and blobs[0] == blobs[1] and len(blobs[0]) > 0
    assert verdict(12, ok, f"{len(runs)} subcommands, reports byte-identical: {ok}")
