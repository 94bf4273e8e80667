"""Classical and generalized Kloosterman sums by exact enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import ResourceError, divisors, e_frac_array, inverse_mod, primes_upto, units

DEFAULT_BUDGET = 10**7


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class KloostermanSpec:
    a: int
    n: int
    c: int
    q1: int = 1
    q2: int = 1
    d1: int = 1
    d2: int = 1

    def __post_init__(self):
        for name in ("c", "q1", "q2", "d1", "d2"):
            if getattr(self, name) < 1:
                raise ConstraintError(f"{name} must be a positive integer")
        if (self.c * self.q1) % self.d1:
            raise ConstraintError(f"d1={self.d1} does not divide c*q1={self.c * self.q1}")
        if (self.c * self.q1 * self.q2 // self.d1) % self.d2:
            raise ConstraintError(
                f"d2={self.d2} does not divide c*q1*q2/d1={self.c * self.q1 * self.q2 // self.d1}"
            )

    @property
    def moduli(self) -> tuple[int, int]:
        m1 = self.c * self.q1 // self.d1
        return m1, m1 * self.q2 // self.d2


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    terms: int

    def __complex__(self):
        return complex(self.value)


def _unit_arrays(c: int) -> tuple[np.ndarray, np.ndarray]:
    u = units(c)
    return np.array(u, dtype=np.int64), np.array([inverse_mod(v, c) for v in u], dtype=np.int64)


def kloosterman_classical(m: int, n: int, c: int) -> ExpSumValue:
    """S(m, n; c) = sum over units v mod c of e((m v + n vbar)/c)."""
    v, vbar = _unit_arrays(c)
    vals = e_frac_array(m * v + n * vbar, c)
    return ExpSumValue(complex(vals.sum()), len(v))


def kloosterman_general(spec: KloostermanSpec, budget: int = DEFAULT_BUDGET) -> ExpSumValue:
    """Kl_2(a, n, c; q1, q2, d1, d2); inverses are taken modulo the respective moduli.

    The phase a v1 d1/c + vbar1 v2 d2/m1 + n vbar2/m2 is put over the common
    denominator m2 * c before the exponential is taken.
    """
    m1, m2 = spec.moduli
    v1, v1bar = _unit_arrays(m1)
    v2, v2bar = _unit_arrays(m2)
    terms = len(v1) * len(v2)
    if terms > budget:
        raise ResourceError(f"Kl_2 needs {terms} terms, budget {budget}")
    den = math.lcm(spec.c, m1, m2)
    a_part = (spec.a * v1 * spec.d1 * (den // spec.c)) % den
    mid = (np.outer(v1bar, v2 * spec.d2) % den) * (den // m1) % den
    last = (spec.n * v2bar * (den // m2)) % den
    phase = (a_part[:, None] + mid + last[None, :]) % den
    return ExpSumValue(complex(np.exp(2j * np.pi * phase / den).sum()), terms)


def kloosterman_general_literal(spec: KloostermanSpec) -> complex:
    """Scalar double loop straight from the definition (independent oracle)."""
    import cmath

    m1, m2 = spec.moduli
    tot = 0j
    for v1 in units(m1):
        v1b = inverse_mod(v1, m1)
        for v2 in units(m2):
            v2b = inverse_mod(v2, m2)
            x = spec.a * v1 * spec.d1 / spec.c + v1b * v2 * spec.d2 / m1 + spec.n * v2b / m2
            tot += cmath.exp(2j * math.pi * (x % 1.0))
    return tot


def kloosterman_general_table(a: int, c: int, q1: int, q2: int, d1: int, d2: int) -> tuple[int, np.ndarray]:
    """Kl_2(a, n, ...) for every residue n mod m2 at once: returns (m2, values)."""
    spec = KloostermanSpec(a, 0, c, q1, q2, d1, d2)
    m1, m2 = spec.moduli
    v1, v1bar = _unit_arrays(m1)
    v2, v2bar = _unit_arrays(m2)
    den = math.lcm(c, m1, m2)
    a_part = (a * v1 * d1 * (den // c)) % den
    mid = (np.outer(v1bar, v2 * d2) % den) * (den // m1) % den
    inner = np.exp(2j * np.pi * ((a_part[:, None] + mid) % den) / den).sum(axis=0)  # indexed by v2
    nn = np.arange(m2, dtype=np.int64)
    phases = e_frac_array(np.outer(nn, v2bar), m2)
    return m2, phases @ inner


def verify_orthogonality_reduction(c: int, n2: int, d1: int, d2: int, m: int, n: int, budget: int = DEFAULT_BUDGET) -> float:
    """Residual of the first a-sum reduction with q1 = n2, q2 = 1.

    LHS: sum over a mod c of Kl_2(a,-m,c;n2,1,d1,d2) * conj Kl_2(a,-n,c;n2,1,d1,d2).
    RHS: c times the unit sum restricted to v1 = u1 + c' w, c' = c/(c, d1).
    """
    if (c * n2) % (d1 * d2):
        raise ConstraintError(f"d1*d2={d1 * d2} does not divide c*n2={c * n2}")
    m1 = c * n2 // d1
    h = m1 // d2
    est = c * 2 * len(units(m1)) * len(units(h)) + len(units(m1)) ** 2 * len(units(h)) * 2
    if est > budget:
        raise ResourceError(f"orthogonality check needs ~{est} terms, budget {budget}")
    lhs = 0j
    for a in range(c):
        k1 = kloosterman_general(KloostermanSpec(a, -m, c, n2, 1, d1, d2)).value
        k2 = kloosterman_general(KloostermanSpec(a, -n, c, n2, 1, d1, d2)).value
        lhs += k1 * k2.conjugate()
    # RHS: restricted four-fold sum, the (u2, v2) sums done per u1 / v1
    u1s, u1bar = _unit_arrays(m1)
    u2s, u2bar = _unit_arrays(h)
    inner_m = e_frac_array(np.outer(u1bar, u2s) - m * u2bar[None, :], h).sum(axis=1)
    inner_n = e_frac_array(np.outer(u1bar, u2s) - n * u2bar[None, :], h).sum(axis=1)
    cp = c // math.gcd(c, d1)
    same = (u1s[:, None] - u1s[None, :]) % cp == 0
    rhs = c * np.sum(same * np.outer(inner_m, inner_n.conj()))
    scale = 1.0 + c * len(u1s) * len(u2s) ** 2
    return abs(lhs - rhs) / scale


def verify_second_orthogonality(c: int, n2: int, d1: int, d2: int, m: int, n: int) -> float:
    """sum_{a mod cn2/d1} S(a,-m;h) conj S(a,-n;h) = (cn2/d1) sum*_{u mod h} e((n-m) ubar/h), h = cn2/(d1 d2)."""
    if (c * n2) % (d1 * d2):
        raise ConstraintError(f"d1*d2={d1 * d2} does not divide c*n2={c * n2}")
    big = c * n2 // d1
    h = big // d2
    u, ubar = _unit_arrays(h)
    lhs = 0j
    for a in range(big):
        s1 = e_frac_array(a * u - m * ubar, h).sum()
        s2 = e_frac_array(a * u - n * ubar, h).sum()
        lhs += s1 * np.conj(s2)
    rhs = big * e_frac_array((n - m) * ubar, h).sum()
    return float(abs(lhs - rhs) / (1.0 + big * len(u) ** 2))


def weil_bound_sweep(p_max: int):
    """max over primes p <= p_max and a, b in [1, p-1] of |S(a,b;p)| / (2 sqrt p)."""
    from .bounds import BoundCheckResult

    worst, witness = 0.0, None
    for p in primes_upto(p_max):
        v = np.arange(1, p, dtype=np.int64)
        vbar = np.array([pow(int(x), -1, p) for x in v], dtype=np.int64)
        a = np.arange(1, p, dtype=np.int64)
        E = e_frac_array(np.outer(a, v), p)
        F = e_frac_array(np.outer(a, vbar), p)
        S = E @ F.T
        r = float(np.max(np.abs(S))) / (2 * math.sqrt(p))
        if r > worst:
            i, j = np.unravel_index(np.argmax(np.abs(S)), S.shape)
            worst, witness = r, (p, int(a[i]), int(a[j]))
    return BoundCheckResult("weil", worst, witness, worst <= 1 + 1e-9)


def orthogonality_sweep(cn2_max: int, mn_max: int = 5) -> dict:
    """Worst residual of both a-sum reductions over c*n2 <= cn2_max, d1 d2 | c n2, 1 <= m, n <= mn_max."""
    worst = {"first": (0.0, None), "second": (0.0, None)}
    count = 0
    for c in range(1, cn2_max + 1):
        for n2 in range(1, cn2_max // c + 1):
            for d1 in divisors(c * n2):
                for d2 in divisors(c * n2 // d1):
                    for m in range(1, mn_max + 1):
                        for n in range(1, mn_max + 1):
                            key = (c, n2, d1, d2, m, n)
                            r1 = verify_orthogonality_reduction(*key)
                            r2 = verify_second_orthogonality(*key)
                            count += 1
                            if r1 > worst["first"][0]:
                                worst["first"] = (r1, key)
                            if r2 > worst["second"][0]:
                                worst["second"] = (r2, key)
    return {"cases": count, "first": worst["first"], "second": worst["second"]}
