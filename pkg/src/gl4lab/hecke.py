"""GL(4) Hecke-Fourier coefficients from Satake parameters.

The local coefficient A(p^a, p^b, p^c) is the Schur polynomial of the
partition (a+b+c, b+c, c, 0) in the four Satake parameters at p; the global
coefficient is the product of local ones over the primes dividing n1*n2*n3.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import mpmath
import numpy as np

from .arith import ResourceError, factorize, is_prime, valuation

CONFLUENT_TOL = 1e-8


class DataError(ValueError):
    """Malformed input data (CSV rows, parameter sets)."""


@dataclass(frozen=True)
class SatakePrimeData:
    prime: int
    alphas: tuple[complex, complex, complex, complex]
    tempered_dual: bool = False

    def __post_init__(self):
        alphas = tuple(complex(a) for a in self.alphas)
        if len(alphas) != 4:
            raise DataError("need exactly four Satake parameters")
        if any(math.isnan(a.real) or math.isnan(a.imag) for a in alphas):
            raise DataError("NaN Satake parameter")
        object.__setattr__(self, "alphas", alphas)
        prod = alphas[0] * alphas[1] * alphas[2] * alphas[3]
        if abs(abs(prod) - 1.0) > 1e-12:
            raise DataError(f"|product of Satake parameters| = {abs(prod)!r} at p={self.prime}")
        if self.tempered_dual and not _closed_under_inversion(alphas):
            raise DataError(f"Satake set at p={self.prime} is not closed under z -> 1/conj(z)")


def _closed_under_inversion(alphas, tol=1e-12) -> bool:
    targets = [1 / a.conjugate() for a in alphas]
    used = [False] * 4
    for t in targets:
        for i, a in enumerate(alphas):
            if not used[i] and abs(a - t) <= tol * max(1.0, abs(a)):
                used[i] = True
                break
        else:
            return False
    return True


@dataclass
class LanglandsData:
    lambdas: tuple[complex, complex, complex, complex]
    satake: dict[int, SatakePrimeData] = field(default_factory=dict)
    generator: Callable[[int], SatakePrimeData] | None = None
    nontempered_primes: set[int] = field(default_factory=set)

    def __post_init__(self):
        self.lambdas = tuple(complex(x) for x in self.lambdas)
        if len(self.lambdas) != 4:
            raise DataError("need four Langlands parameters")
        if abs(sum(self.lambdas)) > 1e-12:
            raise DataError(f"Langlands parameters sum to {sum(self.lambdas)!r}, not 0")
        self._lock = threading.Lock()

    def at(self, p: int) -> SatakePrimeData:
        try:
            return self.satake[p]
        except KeyError:
            if self.generator is None:
                raise KeyError(f"no Satake data for p={p}") from None
        data = self.generator(p)
        with self._lock:
            self.satake.setdefault(p, data)
        return self.satake[p]


# ---------------------------------------------------------------- Schur values


def partition_of(nu1: int, nu2: int, nu3: int) -> tuple[int, int, int, int]:
    return (nu1 + nu2 + nu3, nu2 + nu3, nu3, 0)


def _complete_homogeneous(alphas, kmax: int) -> list[complex]:
    # h_k via the generating function prod (1 - a t)^{-1}
    h = [1.0 + 0j] + [0j] * kmax
    for a in alphas:
        for k in range(1, kmax + 1):
            h[k] = h[k] + a * h[k - 1]
    return h


def schur_jacobi_trudi(alphas, lam) -> complex:
    """s_lam(alphas) = det(h_{lam_i - i + j}); division free, so safe at coincident alphas."""
    n = len(lam)
    h = _complete_homogeneous(alphas, lam[0] + n)
    mat = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            k = lam[i] - i + j
            mat[i, j] = h[k] if k >= 0 else 0.0
    return complex(np.linalg.det(mat))


def schur_bialternant(alphas, lam) -> complex:
    n = len(alphas)
    a = np.asarray(alphas, dtype=complex)
    num = np.array([[x ** (lam[j] + n - 1 - j) for j in range(n)] for x in a])
    den = np.array([[x ** (n - 1 - j) for j in range(n)] for x in a])
    return complex(np.linalg.det(num) / np.linalg.det(den))


def _min_gap(alphas) -> float:
    return min(abs(x - y) for x, y in itertools.combinations(alphas, 2))


def schur_value(alphas, lam) -> complex:
    if _min_gap(alphas) < CONFLUENT_TOL * max(1.0, max(abs(a) for a in alphas)):
        return schur_jacobi_trudi(alphas, lam)
    # the bialternant loses digits when parameters cluster; fall back as well
    # when the Vandermonde is poorly conditioned
    if _min_gap(alphas) < 1e-3:
        return schur_jacobi_trudi(alphas, lam)
    return schur_bialternant(alphas, lam)


def schur_value_mp(alphas, lam, dps: int = 40) -> complex:
    """High precision Jacobi-Trudi evaluation; the arbiter for residual disputes."""
    with mpmath.workdps(dps):
        al = [mpmath.mpc(a) for a in alphas]
        kmax = lam[0] + len(lam)
        h = [mpmath.mpc(1)] + [mpmath.mpc(0)] * kmax
        for a in al:
            for k in range(1, kmax + 1):
                h[k] += a * h[k - 1]
        n = len(lam)
        m = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                k = lam[i] - i + j
                m[i, j] = h[k] if k >= 0 else 0
        return complex(mpmath.det(m))


def complete_homogeneous_batch(alphas: np.ndarray, kmax: int) -> np.ndarray:
    """h_0..h_kmax for a batch of parameter rows, shape (..., n) -> (..., kmax+1)."""
    alphas = np.asarray(alphas, dtype=complex)
    h = np.zeros(alphas.shape[:-1] + (kmax + 1,), dtype=complex)
    h[..., 0] = 1.0
    for j in range(alphas.shape[-1]):
        a = alphas[..., j]
        for k in range(1, kmax + 1):
            h[..., k] += a * h[..., k - 1]
    return h


def schur_batch(h: np.ndarray, lam) -> np.ndarray:
    """Jacobi-Trudi s_lam over a batch, given precomputed complete homogeneous values h."""
    n = len(lam)
    mat = np.zeros(h.shape[:-1] + (n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            k = lam[i] - i + j
            if k >= 0:
                mat[..., i, j] = h[..., k]
    return np.linalg.det(mat)


def schur_coefficient(data: SatakePrimeData, nu1: int, nu2: int, nu3: int) -> complex:
    """Local coefficient A(p^nu1, p^nu2, p^nu3)."""
    if min(nu1, nu2, nu3) < 0:
        raise ValueError("exponents must be nonnegative")
    if nu1 == nu2 == nu3 == 0:
        return 1.0 + 0j
    return schur_value(data.alphas, partition_of(nu1, nu2, nu3))


# ------------------------------------------------------------ coefficient table


class CoefficientTable:
    """Memoized multiplicative table of A(n1, n2, n3)."""

    def __init__(self, source: LanglandsData, budget: int = 10**9):
        self.source = source
        self.budget = budget
        self.cache: dict[tuple[int, int, int], complex] = {(1, 1, 1): 1.0 + 0j}
        self._local: dict[tuple[int, int, int, int], complex] = {}
        self._lock = threading.Lock()
        self._frozen = False

    def freeze(self):
        self._frozen = True
        return self

    def local(self, p: int, nu1: int, nu2: int, nu3: int) -> complex:
        """A(p^nu1, p^nu2, p^nu3); zero when an exponent is negative."""
        if min(nu1, nu2, nu3) < 0:
            return 0j
        key = (p, nu1, nu2, nu3)
        val = self._local.get(key)
        if val is None:
            val = schur_coefficient(self.source.at(p), nu1, nu2, nu3)
            if not self._frozen:
                with self._lock:
                    self._local[key] = val
        return val

    def __call__(self, n1: int, n2: int, n3: int) -> complex:
        return coefficient(self, n1, n2, n3)

    def export_json(self, path: str | Path):
        out = {f"{a},{b},{c}": [v.real, v.imag] for (a, b, c), v in sorted(self.cache.items())}
        Path(path).write_text(json.dumps(out, indent=0, sort_keys=True))


def coefficient(table: CoefficientTable, n1: int, n2: int, n3: int) -> complex:
    key = (n1, n2, n3)
    val = table.cache.get(key)
    if val is not None:
        return val
    if min(n1, n2, n3) < 1:
        raise ValueError("indices must be positive integers")
    if n1 * n2 * n3 > table.budget:
        raise ResourceError(f"n1*n2*n3 = {n1 * n2 * n3} exceeds budget {table.budget}")
    primes = sorted({p for n in key for p, _ in factorize(n)})
    val = 1.0 + 0j
    for p in primes:
        val *= table.local(p, valuation(n1, p), valuation(n2, p), valuation(n3, p))
    if not table._frozen:
        with table._lock:
            table.cache[key] = val
    return val


def coefficient_array(table: CoefficientTable, nmax: int, n2: int = 1, n3: int = 1) -> np.ndarray:
    """A(n, n2, n3) for n = 1..nmax (index 0 unused)."""
    out = np.zeros(nmax + 1, dtype=complex)
    for n in range(1, nmax + 1):
        out[n] = coefficient(table, n, n2, n3)
    return out


def verify_hecke_relation(table: CoefficientTable, p: int, nu1: int, nu2: int, nu3: int) -> float:
    A = table.local
    lhs = A(p, nu1, nu2, nu3)
    rhs = (
        A(p, nu1, 0, 0) * A(p, 0, nu2, nu3)
        - A(p, nu1 - 1, 0, 0) * A(p, 0, nu2, nu3 - 1)
        - A(p, nu1 - 1, 0, 0) * A(p, 0, nu2 - 1, nu3 + 1)
        + A(p, nu1 - 2, 0, 0) * A(p, 0, nu2 - 1, nu3)
    )
    return abs(lhs - rhs) / (1.0 + abs(lhs))


# ------------------------------------------------------------------- GL(2) data


@dataclass
class GL2MaassData:
    spectral_t: float
    hecke: dict[int, float]
    parity: str = "even"
    verified_bound: bool = False

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise DataError(f"parity must be even/odd, got {self.parity!r}")
        if self.verified_bound:
            for p, lam in self.hecke.items():
                if abs(lam) > p ** (7 / 64) + p ** (-7 / 64) + 1e-6:
                    raise DataError(f"|lambda({p})| = {abs(lam)} violates the GL(2) bound")

    def eigenvalue(self, n: int) -> float:
        """lambda(n) from the prime values via the GL(2) Hecke recursion."""
        out = 1.0
        for p, e in factorize(n):
            lp = self.hecke[p]
            prev, cur = 1.0, lp
            for _ in range(e - 1):
                prev, cur = cur, lp * cur - prev
            out *= cur if e >= 1 else 1.0
        return out

    def eigenvalues(self, nmax: int) -> np.ndarray:
        out = np.zeros(nmax + 1)
        for n in range(1, nmax + 1):
            out[n] = self.eigenvalue(n)
        return out


def eisenstein_gl2(t: float, primes: Iterable[int]) -> GL2MaassData:
    """Hecke eigenvalues 2cos(t log p) of the weight-0 Eisenstein series E(z, 1/2 + it)."""
    return GL2MaassData(t, {p: 2 * math.cos(t * math.log(p)) for p in primes})


def read_gl2_csv(path: str | Path) -> list[GL2MaassData]:
    """Read ``t, parity, p, lambda_p`` rows, grouped by (t, parity)."""
    forms: dict[tuple[float, str], dict[int, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "parity", "p", "lambda_p"]:
            raise DataError(f"{path}:1: expected header 't, parity, p, lambda_p', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            try:
                t = float(row[0])
                parity = row[1].strip()
                p = int(row[2])
                lam = float(row[3])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if parity not in ("even", "odd"):
                raise DataError(f"{path}:{lineno}: bad parity {parity!r}")
            if not is_prime(p):
                raise DataError(f"{path}:{lineno}: {p} is not prime")
            if not math.isfinite(lam) or not math.isfinite(t):
                raise DataError(f"{path}:{lineno}: non-finite value")
            forms.setdefault((t, parity), {})[p] = lam
    return [GL2MaassData(t, hk, parity) for (t, parity), hk in forms.items()]


def write_gl2_csv(path: str | Path, forms: Iterable[GL2MaassData]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "parity", "p", "lambda_p"])
        for f in forms:
            for p in sorted(f.hecke):
                w.writerow([repr(f.spectral_t), f.parity, p, repr(f.hecke[p])])


# ------------------------------------------------------------------ Sym^3 lift


def _sym3_at(gl2: GL2MaassData, p: int) -> tuple[SatakePrimeData, bool]:
    lam = gl2.hecke[p]
    # beta + 1/beta = lam
    disc = complex(lam * lam - 4)
    beta = (lam + np.sqrt(disc)) / 2
    if abs(beta) < 1:
        beta = 1 / beta
    nontempered = abs(lam) > 2 + 1e-15
    alphas = (beta**3, beta, 1 / beta, 1 / beta**3)
    return SatakePrimeData(p, alphas, tempered_dual=not nontempered), nontempered


def sym3_lift(gl2: GL2MaassData) -> LanglandsData:
    t = gl2.spectral_t
    data = LanglandsData((3j * t, 1j * t, -1j * t, -3j * t))

    def gen(p: int) -> SatakePrimeData:
        sat, flagged = _sym3_at(gl2, p)
        if flagged:
            data.nontempered_primes.add(p)
        return sat

    data.generator = gen
    for p in sorted(gl2.hecke):
        data.at(p)
    return data


# ------------------------------------------------------- synthetic generators

THETA4 = 9 / 22
THETA6 = 35 / 74


def random_unitary_satake(p: int, rng: np.random.Generator) -> SatakePrimeData:
    """|alpha_i| = 1 with product exactly 1."""
    phases = rng.uniform(0, 2 * np.pi, size=3)
    phases = np.append(phases, -phases.sum())
    return SatakePrimeData(p, tuple(np.exp(1j * phases)), tempered_dual=True)


def theta_bounded_satake(p: int, rng: np.random.Generator) -> SatakePrimeData:
    """Satake set {r1 e^{i f}, e^{i f}/r1, r2 e^{i g}, e^{i g}/r2}, closed under z -> 1/conj(z).

    |alpha_i| <= p^theta4 and |alpha_i alpha_j| <= p^theta6, product 1.
    """
    rmax = p**THETA4
    r1 = rng.uniform(1.0, rmax)
    r2 = rng.uniform(1.0, min(rmax, p**THETA6 / r1))
    f = rng.uniform(0, 2 * np.pi)
    g = -f + (np.pi if rng.random() < 0.5 else 0.0)
    alphas = (r1 * np.exp(1j * f), np.exp(1j * f) / r1, r2 * np.exp(1j * g), np.exp(1j * g) / r2)
    return SatakePrimeData(p, alphas, tempered_dual=True)


def random_table(rng: np.random.Generator, kind: str = "unitary", lambdas=(0, 0, 0, 0)) -> CoefficientTable:
    maker = {"unitary": random_unitary_satake, "theta": theta_bounded_satake}[kind]
    data = LanglandsData(lambdas, generator=lambda p: maker(p, rng))
    return CoefficientTable(data)


def table_from_mapping(alphas_by_prime: Mapping[int, Iterable[complex]], lambdas=(0, 0, 0, 0)) -> CoefficientTable:
    sat = {p: SatakePrimeData(p, tuple(a)) for p, a in alphas_by_prime.items()}
    return CoefficientTable(LanglandsData(lambdas, sat))


def hecke_sweep(primes: Iterable[int], nu_max: int, draws: int, seed: int = 0) -> dict:
    """Worst Hecke-relation residual over unitary Satake draws, batched over draws.

    Local coefficients come from Jacobi-Trudi determinants on a (draws, 4) array of
    parameters, so every (nu1, nu2, nu3) <= nu_max costs one vectorized determinant.
    """
    rng = np.random.default_rng(seed)
    worst, witness = 0.0, None
    checks = 0
    for p in primes:
        phases = rng.uniform(0, 2 * np.pi, size=(draws, 3))
        phases = np.concatenate([phases, -phases.sum(axis=1, keepdims=True)], axis=1)
        h = complete_homogeneous_batch(np.exp(1j * phases), 3 * nu_max + 4)
        cache: dict[tuple[int, int, int], np.ndarray] = {}

        def A(a, b, c):
            if min(a, b, c) < 0:
                return np.zeros(draws, dtype=complex)
            key = (a, b, c)
            if key not in cache:
                cache[key] = schur_batch(h, partition_of(a, b, c)) if any(key) else np.ones(draws, dtype=complex)
            return cache[key]

        for n1 in range(nu_max + 1):
            for n2 in range(nu_max + 1):
                for n3 in range(nu_max + 1):
                    lhs = A(n1, n2, n3)
                    rhs = (A(n1, 0, 0) * A(0, n2, n3) - A(n1 - 1, 0, 0) * A(0, n2, n3 - 1)
                           - A(n1 - 1, 0, 0) * A(0, n2 - 1, n3 + 1) + A(n1 - 2, 0, 0) * A(0, n2 - 1, n3))
                    res = np.abs(lhs - rhs) / (1.0 + np.abs(lhs))
                    i = int(np.argmax(res))
                    checks += draws
                    if res[i] > worst:
                        worst, witness = float(res[i]), {"p": p, "nu": (n1, n2, n3), "draw": i}
    return {"max_residual": worst, "witness": witness, "checks": checks}
