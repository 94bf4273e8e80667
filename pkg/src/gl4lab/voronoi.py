"""Two-sided numerical check of the GL(4) Voronoi summation formula.

Left side:  sum_n A(q2, q1, n) e(abar n / c) w(n).
Right side: (c^3 q1^2 q2)^(-1) sum_{+-} sum_{d1 | c q1} sum_{d2 | c q1 q2 / d1} d1^2 d2
            sum_n A(n, d2, d1) Kl_2(a, -+n, c; q1, q2, d1, d2) Omega^{+-}(d1^3 d2^2 n / (c^4 q1^2 q2)).

The dual sums are truncated at an adaptive cutoff with a rigorous tail bound:

  |Omega^{+-}(y)| <= B(s) y^(-s)          (Mellin line moved to Re s = s > 1)
  |A(n, d2, d1)|  <= d_4(n) dim(0, d2, d1) (tempered Satake data, Pieri)
  sum_{n > N0} d_4(n) n^(-s) <= N0^(s' - s) (zeta(s')^4 - sum_{n <= N0} d_4(n) n^(-s')),  1 < s' < s

and |Kl_2| is bounded by the maximum of its exact residue table.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .arith import ResourceError, divisors, factorize, inverse_mod
from .expsums import kloosterman_general_table
from .hecke import CoefficientTable, coefficient
from .oscillatory.hankel import MellinHankel
from .oscillatory.kernel import BesselSpec

SIGMA_GRID = tuple(np.arange(1.5, 40.01, 0.5))
SIGMA_PRIME = (1.02, 1.05, 1.1, 1.2, 1.35, 1.5, 2.0, 3.0, 5.0, 8.0)


def weyl_dimension(lam) -> int:
    """Dimension of the GL(4) representation with highest weight ``lam``."""
    lam = tuple(lam) + (0,) * (4 - len(lam))
    num = 1
    den = 1
    for i in range(4):
        for j in range(i + 1, 4):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def shape_dimension(n2: int, n3: int) -> int:
    """prod_p dim(partition of (0, v_p(n2), v_p(n3))): |A(1, n2, n3)| for trivial Satake data."""
    out = 1
    for p in {p for n in (n2, n3) for p, _ in factorize(n)}:
        b = _val(n2, p)
        c = _val(n3, p)
        out *= weyl_dimension((b + c, b + c, c, 0))
    return out


def _val(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@lru_cache(maxsize=8)
def divisor4(nmax: int) -> np.ndarray:
    """d_4(n) for 0 <= n <= nmax (index 0 unused)."""
    d2 = np.zeros(nmax + 1, dtype=np.int64)
    for m in range(1, nmax + 1):
        d2[m::m] += 1
    d4 = np.zeros(nmax + 1, dtype=np.int64)
    for m in range(1, nmax + 1):
        k = nmax // m
        d4[m :: m] += d2[m] * d2[1 : k + 1]
    return d4


@lru_cache(maxsize=64)
def _zeta4(sp: float) -> float:
    return float(mpmath.zeta(sp) ** 4)


def d4_tail(N0: int, s: float, sp: float) -> float:
    """Upper bound for sum_{n > N0} d_4(n) n^(-s), via 1 < sp < s."""
    d4 = divisor4(N0)
    n = np.arange(1, N0 + 1, dtype=float)
    head = math.fsum((d4[1:] * n ** (-sp)).tolist())
    z = _zeta4(sp)
    rem = max(z - head, 0.0) + 4e-16 * z
    return N0 ** (sp - s) * rem


@dataclass
class VoronoiScenario:
    table: CoefficientTable
    weight: object  # needs __call__, mellin, support_window
    a: int = 1
    c: int = 1
    q1: int = 1
    q2: int = 1
    spec: BesselSpec | None = None
    tail_rel: float = 1e-8
    n_start: int = 1024
    n_budget: int = 1 << 17
    mellin_step: float = 0.02
    workers: int = 1

    def __post_init__(self):
        if min(self.c, self.q1, self.q2) < 1:
            raise ValueError("c, q1, q2 must be positive")
        if math.gcd(self.a, self.c) != 1:
            raise ValueError(f"a = {self.a} is not coprime to c = {self.c}")
        lams = self.table.source.lambdas
        if self.spec is None:
            self.spec = BesselSpec(lams)
        elif np.max(np.abs(np.array(self.spec.lambdas) - np.array(lams))) > 1e-12:
            raise ValueError("kernel parameters differ from the table's Langlands parameters")

    @property
    def abar(self) -> int:
        return inverse_mod(self.a % self.c, self.c) if self.c > 1 else 0

    def blocks(self) -> list[tuple[int, int]]:
        cq1 = self.c * self.q1
        return [(d1, d2) for d1 in divisors(cq1) for d2 in divisors(cq1 * self.q2 // d1)]


@dataclass
class VoronoiReport:
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tail_bound: float
    term_counts: dict = field(default_factory=dict)
    cutoff: int = 0
    tol: float = 1e-4
    passed: bool = False
    budget: dict = field(default_factory=dict)


def voronoi_lhs(sc: VoronoiScenario) -> complex:
    lo, hi = sc.weight.support_window()
    n = np.arange(max(1, math.floor(lo)), math.ceil(hi) + 1)
    if len(n) == 0:
        return 0j
    A = np.array([coefficient(sc.table, sc.q2, sc.q1, int(k)) for k in n])
    tw = np.exp(2j * np.pi * ((sc.abar * n) % sc.c) / sc.c)
    return complex(np.sum(A * tw * sc.weight(n.astype(float))))


class _DualBlock:
    """One (d1, d2) block: coefficients, Kloosterman table and scale, grown on demand."""

    def __init__(self, sc: VoronoiScenario, d1: int, d2: int):
        self.sc = sc
        self.d1, self.d2 = d1, d2
        self.m2, self.kl = kloosterman_general_table(sc.a, sc.c, sc.q1, sc.q2, d1, d2)
        self.kl_max = float(np.max(np.abs(self.kl)))
        self.scale = d1**3 * d2**2 / (sc.c**4 * sc.q1**2 * sc.q2)
        self.pref = d1**2 * d2 / (sc.c**3 * sc.q1**2 * sc.q2)
        self.dim = shape_dimension(d2, d1)
        self.A = np.zeros(0, dtype=complex)
        self.partial = {1: 0j, -1: 0j}

    def extend(self, mh: MellinHankel, upto: int):
        lo = len(self.A) + 1
        if upto < lo:
            return
        nn = np.arange(lo, upto + 1)
        newA = np.array([coefficient(self.sc.table, int(k), self.d2, self.d1) for k in nn])
        self.A = np.concatenate([self.A, newA])
        y = self.scale * nn
        for sign in (1, -1):
            kl = self.kl[(-sign * nn) % self.m2]
            self.partial[sign] += self.pref * np.sum(newA * kl * mh.omega(y, sign))

    def tail(self, N0: int, bconst) -> float:
        best = math.inf
        for s in SIGMA_GRID:
            b = bconst(s)
            if b == 0:
                return 0.0
            if not math.isfinite(b):
                continue
            for sp in SIGMA_PRIME:
                if sp >= s:
                    break
                val = b * self.scale ** (-s) * d4_tail(N0, s, sp)
                best = min(best, val)
        # both signs
        return 2 * self.pref * self.kl_max * self.dim * best


def _check_tempered(table: CoefficientTable, tol: float = 1e-9) -> bool:
    src = table.source
    if src.nontempered_primes:
        return False
    return all(max(abs(abs(a) - 1) for a in d.alphas) < tol for d in src.satake.values())


def voronoi_rhs(sc: VoronoiScenario, scale_hint: float | None = None) -> tuple[complex, float, dict, int]:
    """Dual side, its certified tail bound, per-block term counts and the final cutoff.

    The cutoff doubles from ``n_start`` until the tail bound drops below
    ``tail_rel`` times the running scale max(|partial sum|, scale_hint).
    """
    mh = MellinHankel(sc.spec.lambdas, sc.weight, step=sc.mellin_step)
    bcache: dict[float, float] = {}

    def bconst(s):
        if s not in bcache:
            with np.errstate(over="ignore", invalid="ignore"):
                bcache[s] = mh.bound_constant(s)
        return bcache[s]

    blocks = [_DualBlock(sc, d1, d2) for d1, d2 in sc.blocks()]
    N0 = sc.n_start
    pool = ThreadPoolExecutor(sc.workers) if sc.workers > 1 else None
    try:
        while True:
            if pool is None:
                for b in blocks:
                    b.extend(mh, N0)
            else:
                list(pool.map(lambda b: b.extend(mh, N0), blocks))
            # fixed summation order: blocks as listed, + before -
            total = 0j
            for b in blocks:
                total += b.partial[1]
                total += b.partial[-1]
            tempered = _check_tempered(sc.table)
            tail = sum(b.tail(N0, bconst) for b in blocks) if tempered else math.inf
            ref = max(abs(total), scale_hint or 0.0, 1e-30)
            if tail <= sc.tail_rel * ref:
                break
            if 2 * N0 > sc.n_budget:
                raise ResourceError(
                    f"dual tail bound {tail:.3g} above {sc.tail_rel:g} x {ref:.3g} at cutoff {N0}"
                    + ("" if tempered else " (non-tempered data: no certified bound)")
                )
            N0 *= 2
    finally:
        if pool is not None:
            pool.shutdown()
    counts = {f"{'+' if s > 0 else '-'},{b.d1},{b.d2}": N0 for b in blocks for s in (1, -1)}
    return total, tail, counts, N0


def verify(sc: VoronoiScenario, tol: float | None = None) -> VoronoiReport:
    if tol is None:
        tol = 1e-3 if max(sc.q1, sc.q2) > 1 else 1e-4
    lhs = voronoi_lhs(sc)
    rhs, tail, counts, N0 = voronoi_rhs(sc, scale_hint=abs(lhs))
    err = abs(lhs - rhs)
    rel = err / max(abs(lhs), abs(rhs), 1e-30)
    return VoronoiReport(
        lhs=lhs,
        rhs=rhs,
        abs_err=err,
        rel_err=rel,
        tail_bound=tail,
        term_counts=counts,
        cutoff=N0,
        tol=tol,
        passed=bool(rel <= tol),
        budget={"truncation": tail / max(abs(lhs), abs(rhs), 1e-30), "total": tol},
    )
