"""Classical, hybrid and spectral large-sieve quantities at desk scale."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import ResourceError, e_frac_array, units

DEFAULT_BUDGET = 2 * 10**8


class QuadratureError(RuntimeError):
    def __init__(self, msg, achieved):
        super().__init__(f"{msg} (achieved error estimate {achieved:.3g})")
        self.achieved = achieved


@dataclass
class CoefficientSequence:
    """Values a_n on the integer interval (start, start + len(values)]."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("need a nonempty 1-d value array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sequence values must be finite")
        self.norm2 = float(np.sum(np.abs(self.values) ** 2))

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.start + 1, self.start + self.N + 1, dtype=np.int64)

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, start: int = 0):
        return cls(start, rng.standard_normal(N) + 1j * rng.standard_normal(N))


@dataclass
class SieveReport:
    lhs: float
    rhs_terms: dict
    ratio: float = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        tot = sum(self.rhs_terms.values())
        self.ratio = self.lhs / tot if tot > 0 else (0.0 if self.lhs == 0 else math.inf)


def _frac_sums(seq: CoefficientSequence, c: int) -> np.ndarray:
    """Rows b_a[n] = a_n e(a n / c) for reduced residues a mod c."""
    a = np.array(units(c), dtype=np.int64)
    return seq.values[None, :] * e_frac_array(np.outer(a, seq.n), c)


def _check_budget(seq, C, budget):
    cost = seq.N * sum(len(units(c)) for c in range(1, int(C) + 1))
    if cost > budget:
        raise ResourceError(f"enumeration needs {cost} terms, budget {budget}")


def classical_ls(seq: CoefficientSequence, C: float, budget: int = DEFAULT_BUDGET) -> SieveReport:
    """sum_{c<=C} sum*_a |sum a_n e(an/c)|^2 against (C^2 + N) sum |a_n|^2."""
    _check_budget(seq, C, budget)
    lhs = 0.0
    for c in range(1, int(C) + 1):
        b = _frac_sums(seq, c).sum(axis=1)
        lhs += float(np.sum(np.abs(b) ** 2))
    return SieveReport(lhs, {"modulus_term": C**2 * seq.norm2, "length_term": seq.N * seq.norm2},
                       meta={"N": seq.N, "C": C})


def classical_worst_ratio(N: int, C: int, start: int = 0) -> float:
    """Exact supremum of the classical ratio over all sequences of length N:
    largest eigenvalue of sum_c sum*_a e(a(n-m)/c) divided by C^2 + N."""
    seq = CoefficientSequence(start, np.ones(N))
    n = seq.n
    G = np.zeros((N, N), dtype=complex)
    for c in range(1, int(C) + 1):
        E = e_frac_array(np.outer(np.array(units(c), dtype=np.int64), n), c)
        G += E.conj().T @ E
    return float(np.linalg.eigvalsh(G)[-1]) / (C**2 + N)


def _freqs(seq, c, v, gamma):
    return seq.n.astype(float) ** gamma / (c * v)


def _hybrid_core(seq, v, tau, C, gamma, weight_c=True) -> float:
    """sum_c (1/c) sum*_a int_{-tau}^{tau} |sum_n b_n e(w_n t)|^2 dt using the exact Gram matrix
    int e((w_n - w_m) t) dt = 2 tau sinc(2 tau (w_n - w_m))."""
    total = 0.0
    for c in range(1, int(C) + 1):
        w = _freqs(seq, c, v, gamma)
        G = 2 * tau * np.sinc(2 * tau * (w[:, None] - w[None, :]))
        B = _frac_sums(seq, c)
        val = float(np.real(np.einsum("an,nm,am->", B, G, B.conj())))
        total += val / c if weight_c else val
    return total


def hybrid_lhs_quadrature(seq, v, tau, C, gamma, tol: float = 1e-9, max_panels: int = 1 << 16) -> tuple[float, float]:
    """Same integral by composite Gauss-Legendre in t, panels refined until two levels agree."""
    xg, wg = np.polynomial.legendre.leggauss(16)

    def at(panels):
        edges = np.linspace(-tau, tau, panels + 1)
        mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
        t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        wt = (half[:, None] * wg[None, :]).ravel()
        total = 0.0
        for c in range(1, int(C) + 1):
            w = _freqs(seq, c, v, gamma)
            ph = np.exp(2j * np.pi * np.outer(w - w.mean(), t))  # centred to keep phases small
            S = _frac_sums(seq, c) @ ph
            total += float(np.sum(np.abs(S) ** 2 * wt[None, :])) / c
        return total

    spread = max(float(np.ptp(_freqs(seq, 1, v, gamma))), 1e-12)
    panels = max(1, int(math.ceil(2 * tau * spread)))
    prev = at(panels)
    while panels < max_panels:
        panels *= 2
        cur = at(panels)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise QuadratureError("t-quadrature did not converge", err)


def hybrid_ls(seq: CoefficientSequence, v: float, tau: float, C: float, gamma: float,
              budget: int = DEFAULT_BUDGET, cross_check: bool = False) -> SieveReport:
    """Integrated large sieve with the twist e(n^gamma t / (c v)); RHS (tau C + v N^(1-gamma) log C) sum|a|^2."""
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    _check_budget(seq, C, budget)
    lhs = _hybrid_core(seq, v, tau, C, gamma)
    meta = {"N": seq.N, "C": C, "tau": tau, "v": v, "gamma": gamma}
    if cross_check:
        q, err = hybrid_lhs_quadrature(seq, v, tau, C, gamma)
        meta["quadrature_value"] = q
        meta["quadrature_error"] = err
    Nscale = seq.start + seq.N
    return SieveReport(lhs, {"tau_term": tau * C * seq.norm2,
                             "length_term": v * Nscale ** (1 - gamma) * math.log(C) * seq.norm2 if C > 1 else 0.0},
                       meta=meta)


def spectral_ls_quantities(spectral, seq: CoefficientSequence, T: float, M: float, eps: float = 0.1,
                           A: float = 3.0, q_const: float = 1.0, c_const: float = 1.0,
                           t_const: float = 1.0, budget: int = DEFAULT_BUDGET) -> SieveReport:
    """S = sum_{T < t_j <= T+M} |sum a_n lambda_j(n) n^{i t_j}|^2 and the three majorants.

    ``spectral`` is any iterable of objects with ``spectral_t`` and ``eigenvalue(n)``.
    """
    window = [f for f in spectral if T < f.spectral_t <= T + M]
    n = seq.n
    Nscale = float(n[-1])
    S = 0.0
    for f in window:
        lam = np.array([f.eigenvalue(int(k)) for k in n])
        S += abs(np.sum(seq.values * lam * np.exp(1j * f.spectral_t * np.log(n)))) ** 2
    D = M * T * seq.norm2
    E = Nscale ** (1.5 + eps) * T ** (-A) * seq.norm2
    P = 0.0
    tau = t_const * M**eps / M
    qmax = int(q_const * Nscale / T)
    for q in range(1, qmax + 1):
        cmax = int(c_const * Nscale / (T * q))
        if cmax >= 1:
            _check_budget(seq, cmax, budget)
            P += _hybrid_core(seq, q, tau, cmax, 1.0) / q
    P *= M * T
    te = T**eps
    meta = {"window_size": len(window), "empty_window": not window, "T": T, "M": M, "eps": eps, "A": A,
            "M_in_range": bool(T**eps <= M <= T ** (1 - eps)), "S": S}
    rep = SieveReport(S, {"diagonal": te * D, "tail": te * E, "poisson": te * P}, meta=meta)
    return rep


def hybrid_trials(gamma: float, trials: int, seed: int, n_max: int = 128, c_max: int = 12) -> dict:
    """Random hybrid trials for one exponent; returns the max/median ratio and the witness."""
    rng = np.random.default_rng([seed, int(round(1000 * gamma))])
    ratios, witness = [], None
    for _ in range(trials):
        N = int(rng.integers(8, n_max + 1))
        seq = CoefficientSequence.random(rng, N, start=N)
        C = int(rng.integers(1, c_max + 1))
        tau = float(rng.uniform(0.1, 5.0))
        v = float(rng.uniform(0.5, 4.0))
        r = hybrid_ls(seq, v, tau, C, gamma).ratio
        if not ratios or r > max(ratios):
            witness = {"N": N, "C": C, "tau": tau, "v": v}
        ratios.append(r)
    return {"gamma": gamma, "max_ratio": max(ratios), "median_ratio": float(np.median(ratios)), "witness": witness}


def classical_trials(trials: int, seed: int, n_max: int = 64, c_max: int = 64, exact_every: int = 10) -> dict:
    """Random classical trials; every ``exact_every``-th trial also gets the exact worst case
    over all sequences (top eigenvalue), which must itself stay below 1."""
    rng = np.random.default_rng([seed, 1])
    worst, worst_exact, witness = 0.0, 0.0, None
    for i in range(trials):
        N = int(rng.integers(1, n_max + 1))
        C = int(rng.integers(1, c_max + 1))
        start = int(rng.integers(0, 1000))
        r = classical_ls(CoefficientSequence.random(rng, N, start), C).ratio
        if r > worst:
            worst, witness = r, {"N": N, "C": C, "start": start}
        if exact_every and i % exact_every == 0:
            worst_exact = max(worst_exact, classical_worst_ratio(N, C, start))
    return {"trials": trials, "max_ratio": worst, "max_exact_ratio": worst_exact, "witness": witness}


def tau_monotonicity(trials: int, seed: int, taus=None, gamma: float = 1.0) -> dict:
    """The hybrid LHS is an integral of a nonnegative function over [-tau, tau], so it must not
    decrease along an increasing tau grid. Returns the number of violations (no tolerance)."""
    if taus is None:
        taus = np.linspace(0.1, 5.0, 25)
    rng = np.random.default_rng([seed, 2])
    violations = 0
    for _ in range(trials):
        N = int(rng.integers(8, 65))
        seq = CoefficientSequence.random(rng, N, start=N)
        C = int(rng.integers(1, 9))
        v = float(rng.uniform(0.5, 4.0))
        vals = [_hybrid_core(seq, v, float(t), C, gamma) for t in taus]
        violations += sum(b < a for a, b in zip(vals, vals[1:]))
    return {"trials": trials, "violations": violations}
