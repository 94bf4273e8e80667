"""Command-line driver: strict JSON config, flag overrides, JSON-lines reports.

Exit status: 0 when every hard gate passes, 1 when a gate fails, 2 on configuration,
input or resource errors.  Regression dials are reported but never affect the status.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import report

REPORT_ENV = "GL4LAB_REPORT_DIR"

COMMON = {"seed": 0, "report_dir": "reports", "budget": 10**9}

DEFAULTS: dict[str, dict] = {
    "verify-hecke": {"p_max": 7, "nu_max": 4, "draws": 100, "tol": 1e-9},
    "bounds-sweep": {"p_max": 50, "nu_max": 6, "draws": 1000},
    "expsum-check": {"cn2_max": 30, "mn_max": 5, "weil_p_max": 100, "tol": 1e-6},
    "sieve-bench": {"classical_trials": 500, "n_max": 64, "c_max": 64, "hybrid_trials": 100,
                    "gammas": [1 / 3, 1.0, 2.0], "monotone_trials": 20, "baseline": None,
                    "baseline_factor": 2.0},
    "kernel-eval": {"t": 0.7, "x": [0.5, 1.0, 5.0, 20.0, 50.0, -1.0, -20.0], "calibration": True,
                    "overlap_tol": 1e-5},
    "localize": {"t": 0.7, "lam": 3000.0, "band_tol": 1e-6, "phase_tol": 0.02,
                 "scenarios": [[10, 1, 1, 1, 1, 1.0], [30, 2, 1, 1, 1, 1.0], [100, 1, 1, 2, 1, 2.0],
                               [300, 1, 2, 1, 2, 1.0], [1000, 1, 1, 1, 1, 3.0]]},
    "verify-voronoi": {"scenario": None},
    "afe-toy": {"T": 12.0, "eps": 0.1, "P_cap": 1024.0, "nodes": 9, "spectral_csv": None, "t_form": 0.7,
                "coeff_t": 0.7, "primes_max": 5000, "oracle_tol": 1e-10},
}

SCENARIO_KEYS = {"t": 0.7, "primes_max": 20000, "gl2_csv": None, "N": 30.0, "width": 0.25, "a": 1, "c": 1,
                 "q1": 1, "q2": 1, "tol": None, "tail_rel": 1e-8}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    seed: int = 0
    report_dir: str = "reports"
    budget: int = 10**9
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in DEFAULTS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.budget <= 0:
            raise ConfigError("budget must be positive")
        for k in ("draws", "trials", "classical_trials", "hybrid_trials", "monotone_trials", "nodes"):
            if k in self.params and self.params[k] is not None and self.params[k] <= 0:
                raise ConfigError(f"{k} must be positive")

    def as_dict(self) -> dict:
        return {"subcommand": self.subcommand, "seed": self.seed, "budget": self.budget, **self.params}


def _strict_merge(base: dict, over: dict, where: str) -> dict:
    out = dict(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigError(f"{where}: unknown key {k!r} (allowed: {', '.join(sorted(base))})")
        out[k] = v
    return out


def load_config(subcommand: str, path: str | None, overrides: dict) -> ExperimentConfig:
    tree: dict = {}
    if path:
        try:
            tree = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(tree, dict):
            raise ConfigError(f"{path}: top level must be an object")
    allowed_top = set(COMMON) | set(DEFAULTS)
    for k in tree:
        if k not in allowed_top:
            raise ConfigError(f"{path}: unknown key {k!r}")
    common = _strict_merge(COMMON, {k: tree[k] for k in COMMON if k in tree}, str(path))
    params = _strict_merge(DEFAULTS[subcommand], tree.get(subcommand, {}), f"{path}:{subcommand}")
    for k, v in overrides.items():
        if v is None:
            continue
        if k in common:
            common[k] = v
        else:
            params = _strict_merge(params, {k: v}, "command line")
    if os.environ.get(REPORT_ENV) and "report_dir" not in overrides:
        common["report_dir"] = os.environ[REPORT_ENV]
    return ExperimentConfig(subcommand, int(common["seed"]), str(common["report_dir"]), int(common["budget"]), params)


# ------------------------------------------------------------------ drivers
# each returns a list of (kind, payload, gate) with gate True/False for hard gates, None for dials


def run_hecke(cfg: ExperimentConfig):
    from .arith import primes_upto
    from .hecke import hecke_sweep

    p = cfg.params
    res = hecke_sweep(primes_upto(p["p_max"]), p["nu_max"], p["draws"], cfg.seed)
    return [("hecke_relation", res, res["max_residual"] <= p["tol"])]


def run_bounds(cfg: ExperimentConfig):
    from .bounds import sweep_all

    p = cfg.params
    return [(f"bound:{r.inequality_id}", r, bool(r.passed)) for r in sweep_all(p["p_max"], p["nu_max"], p["draws"], cfg.seed)]


def run_expsum(cfg: ExperimentConfig):
    from .expsums import orthogonality_sweep, weil_bound_sweep

    p = cfg.params
    ortho = orthogonality_sweep(p["cn2_max"], p["mn_max"])
    weil = weil_bound_sweep(p["weil_p_max"])
    ok = ortho["first"][0] < p["tol"] and ortho["second"][0] < p["tol"]
    return [("orthogonality", ortho, ok), ("weil", weil, bool(weil.passed))]


def _load_baseline(path):
    if path is None:
        from importlib import resources

        return json.loads(resources.files("gl4lab").joinpath("data/hybrid_baseline.json").read_text())
    return json.loads(Path(path).read_text())


def run_sieve(cfg: ExperimentConfig):
    from .sieve import classical_trials, hybrid_trials, tau_monotonicity

    p = cfg.params
    out = []
    cl = classical_trials(p["classical_trials"], cfg.seed, p["n_max"], p["c_max"])
    out.append(("classical_ls", cl, cl["max_ratio"] <= 1 + 1e-9 and cl["max_exact_ratio"] <= 1 + 1e-9))
    mono = tau_monotonicity(p["monotone_trials"], cfg.seed)
    out.append(("hybrid_tau_monotone", mono, mono["violations"] == 0))
    base = {round(r["gamma"], 9): r for r in _load_baseline(p["baseline"])["results"]}
    for g in p["gammas"]:
        res = hybrid_trials(float(g), p["hybrid_trials"], cfg.seed)
        ref = base.get(round(float(g), 9))
        if ref is not None:
            res["baseline_max"] = ref["max_ratio"]
            res["within_factor"] = bool(ref["max_ratio"] / p["baseline_factor"] <= res["max_ratio"]
                                        <= ref["max_ratio"] * p["baseline_factor"])
        # finite ratio is a gate; closeness to the archived run is a regression dial
        out.append((f"hybrid_ls:{g:.6g}", res, bool(np.isfinite(res["max_ratio"]))))
        out.append((f"hybrid_baseline:{g:.6g}", {"within_factor": res.get("within_factor")}, None))
    return out


def _sym3_spec(t):
    from .oscillatory.kernel import BesselSpec

    return BesselSpec((3j * t, 1j * t, -1j * t, -3j * t))


def run_kernel(cfg: ExperimentConfig):
    from .oscillatory.kernel import bessel_kernel, calibrate, kernel_asymptotic, kernel_contour

    p = cfg.params
    spec = calibrate(_sym3_spec(p["t"]))
    xs = [float(x) for x in p["x"]]
    vals = [bessel_kernel(spec, x) for x in xs]
    out = [("kernel_values", {"lambdas": spec.lambdas, "x": xs, "J": vals}, None)]
    band = np.linspace(20.0, 50.0, 31)
    ref = np.array([kernel_contour(spec, x) for x in band])
    overlap = float(np.max(np.abs(kernel_asymptotic(spec, band) - ref) / np.abs(ref)))
    out.append(("asymptotic_overlap", {"max_rel_err": overlap}, overlap <= p["overlap_tol"]))
    if p["calibration"]:
        from .oscillatory.calibration import degree1_fourier_check, degree2_bessel_check

        d1 = degree1_fourier_check(seed=cfg.seed)
        d2 = degree2_bessel_check()
        out.append(("degree1_fourier", d1, d1["max_rel_err"] <= 1e-8))
        out.append(("degree2_bessel", d2, d2["max_rel_err"] <= 1e-6))
    return out


def run_localize(cfg: ExperimentConfig):
    from .oscillatory.localization import scenario_for, verify_localization

    p = cfg.params
    spec = _sym3_spec(p["t"])
    out = []
    for row in p["scenarios"]:
        Nn, d1, d2, n2, q, h = row
        sc = scenario_for(float(Nn), p["lam"], int(d1), int(d2), int(n2), int(q), float(h))
        rep = verify_localization(spec, sc, float(h), band_tol=p["band_tol"], phase_tol=p["phase_tol"])
        summary = {"scenario": row, "N": sc.N, "tau": sc.tau, "N_natural": sc.N_natural, "peak": rep.in_band_peak,
                   "out_of_band": rep.out_band_max, "plus_plus": rep.plus_plus_max,
                   "phase_rel_error": rep.phase_rel_error, "note": rep.note}
        out.append(("localization", summary, rep.passed))
    return out


def load_scenario(path) -> dict:
    if path is None:
        return dict(SCENARIO_KEYS)
    if isinstance(path, dict):
        return _strict_merge(SCENARIO_KEYS, path, "scenario")
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    return _strict_merge(SCENARIO_KEYS, raw, str(path))


def build_voronoi(sc: dict):
    from .arith import primes_upto
    from .hecke import CoefficientTable, eisenstein_gl2, read_gl2_csv, sym3_lift
    from .oscillatory.weights import LogNormalWeight
    from .voronoi import VoronoiScenario

    if sc["gl2_csv"]:
        forms = read_gl2_csv(sc["gl2_csv"])
        if not forms:
            raise ConfigError(f"{sc['gl2_csv']}: no forms")
        gl2 = forms[0]
    else:
        gl2 = eisenstein_gl2(sc["t"], primes_upto(sc["primes_max"]))
    table = CoefficientTable(sym3_lift(gl2))
    lams = table.source.lambdas
    # Mellin zeros at 1 + lambda_j remove the polar terms of a non-cuspidal (Eisenstein) lift
    w = LogNormalWeight(1.5 * sc["N"], sc["width"], tuple(1 + l for l in lams))
    return VoronoiScenario(table, w, sc["a"], sc["c"], sc["q1"], sc["q2"], tail_rel=sc["tail_rel"])


def run_voronoi(cfg: ExperimentConfig):
    from .voronoi import verify

    sc = load_scenario(cfg.params["scenario"])
    rep = verify(build_voronoi(sc), sc["tol"])
    return [("voronoi", {"scenario": sc, "report": rep}, rep.passed)]


def run_afe(cfg: ExperimentConfig):
    from .afe import afe_sum, afe_sum_oracle, cauchy_split_bound, dyadic_grid, v_nodes
    from .arith import primes_upto
    from .hecke import CoefficientTable, eisenstein_gl2, read_gl2_csv, sym3_lift

    p = cfg.params
    primes = primes_upto(p["primes_max"])
    table = CoefficientTable(sym3_lift(eisenstein_gl2(p["coeff_t"], primes)))
    if p["spectral_csv"]:
        forms = read_gl2_csv(p["spectral_csv"])
        if not forms:
            raise ConfigError(f"{p['spectral_csv']}: no forms")
        gl2 = forms[0]
    else:
        gl2 = eisenstein_gl2(p["t_form"], primes)
    worst_oracle, holds, rows = 0.0, True, 0
    for P in dyadic_grid(p["P_cap"]):
        for v in v_nodes(p["T"], p["eps"], p["nodes"]):
            a = afe_sum(table, gl2, P, v, budget=cfg.budget)
            b = afe_sum_oracle(table, gl2, P, v)
            worst_oracle = max(worst_oracle, abs(a - b) / max(abs(b), 1e-300))
            holds = holds and cauchy_split_bound(table, gl2, P, v).holds
            rows += 1
    return [("afe_oracle", {"grid_points": rows, "max_rel_err": worst_oracle}, worst_oracle <= p["oracle_tol"]),
            ("cauchy_split", {"grid_points": rows, "all_hold": holds}, holds)]


DRIVERS = {
    "verify-hecke": run_hecke,
    "bounds-sweep": run_bounds,
    "expsum-check": run_expsum,
    "sieve-bench": run_sieve,
    "kernel-eval": run_kernel,
    "localize": run_localize,
    "verify-voronoi": run_voronoi,
    "afe-toy": run_afe,
}


def run(cfg: ExperimentConfig) -> tuple[int, Path]:
    rows = DRIVERS[cfg.subcommand](cfg)
    out_dir = Path(cfg.report_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{cfg.subcommand}.jsonl"
    path.write_text("")
    failed = False
    for kind, payload, gate in rows:
        rec = report.make_record(kind, {"payload": payload, "gate": gate}, cfg.as_dict())
        report.append_jsonl(path, rec)
        failed = failed or gate is False
    return (1 if failed else 0), path


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gl4lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, defaults in DEFAULTS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config tree")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--report-dir", dest="report_dir")
        sp.add_argument("--budget", type=int)
        for key, val in defaults.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(val, bool):
                sp.add_argument(flag, dest=key, type=lambda s: s.lower() in ("1", "true", "yes"))
            elif isinstance(val, int):
                sp.add_argument(flag, dest=key, type=int)
            elif isinstance(val, float):
                sp.add_argument(flag, dest=key, type=float)
            elif isinstance(val, list):
                sp.add_argument(flag, dest=key, type=json.loads, help="JSON list")
            else:
                sp.add_argument(flag, dest=key)
    return ap


def main(argv=None) -> int:
    from .arith import ResourceError
    from .hecke import DataError

    args = vars(_parser().parse_args(argv))
    name = args.pop("subcommand")
    path = args.pop("config")
    try:
        cfg = load_config(name, path, args)
        status, out = run(cfg)
    except (ConfigError, DataError, ResourceError, OSError) as exc:
        print(f"gl4lab {name}: error: {exc}", file=sys.stderr)
        return 2
    print(f"gl4lab {name}: {'PASS' if status == 0 else 'FAIL'} -> {out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
