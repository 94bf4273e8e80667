"""Toy dyadic sums S^v(P) and their Cauchy split over n2.

    S^v(P) = P^(-1/2) sum_{n2, n} A(1, n2, n) lambda(n) (n2^2 n)^(-it) w_v(n2^2 n / P),
    w_v(x) = bump(x) x^(-1/2 - v),   bump supported in [1, 2].

Only the internal mechanics are checked: the double sum against a single loop
over m = n2^2 n, and the Cauchy-Schwarz step

    |S|^2 <= H * sum_{n2} (1/n2) |n2/sqrt(P) sum_n A(1, n2, n) lambda(n) n^(-it) w_v(n2^2 n / P)|^2

with H = sum_{n2 < sqrt(2P)} 1/n2 (the log factor that the T^eps dial absorbs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import ResourceError
from .hecke import GL2MaassData
from .oscillatory.inert import AFEWeight
from .oscillatory.weights import BumpWeight


@dataclass
class AFESum:
    P: float
    v: complex
    value: complex
    above_range: bool = False  # P > T^(2 + eps)


def _coef(table, n2, n):
    return table(1, n2, n)


def _support(P: float, bump: BumpWeight) -> tuple[float, float]:
    lo, hi = bump.support
    return lo * P, hi * P


def afe_inner(table, gl2: GL2MaassData, P: float, v: complex, n2: int, bump: BumpWeight = BumpWeight()) -> complex:
    """sum_n A(1, n2, n) lambda(n) n^(-it) w_v(n2^2 n / P)."""
    lo, hi = _support(P, bump)
    q = n2 * n2
    n = np.arange(max(1, math.floor(lo / q)), math.ceil(hi / q) + 1)
    n = n[(n * q > lo) & (n * q < hi)]
    if len(n) == 0:
        return 0j
    w = AFEWeight(v, bump)
    t = gl2.spectral_t
    A = np.array([_coef(table, n2, int(k)) for k in n], dtype=complex)
    lam = np.array([gl2.eigenvalue(int(k)) for k in n])
    return complex(np.sum(A * lam * np.exp(-1j * t * np.log(n)) * w(q * n / P)))


def afe_sum(table, gl2: GL2MaassData, P: float, v: complex, bump: BumpWeight = BumpWeight(), budget: int = 10**6) -> complex:
    """S^v(P) as a double sum, outer loop over n2."""
    lo, hi = _support(P, bump)
    if hi <= 1:
        return 0j
    if hi > budget:
        raise ResourceError(f"support up to {hi:g} exceeds budget {budget}")
    t = gl2.spectral_t
    total = 0j
    n2 = 1
    while n2 * n2 < hi:
        total += np.exp(-2j * t * math.log(n2)) * afe_inner(table, gl2, P, v, n2, bump)
        n2 += 1
    return total / math.sqrt(P)


def afe_sum_oracle(table, gl2: GL2MaassData, P: float, v: complex, bump: BumpWeight = BumpWeight()) -> complex:
    """S^v(P) by a single loop over m = n2^2 n, scalar arithmetic throughout."""
    lo, hi = _support(P, bump)
    t = gl2.spectral_t
    a = 0.5 + v
    total = 0j
    for m in range(max(1, math.floor(lo)), math.ceil(hi) + 1):
        x = m / P
        b = float(bump(np.array([x]))[0])
        if b == 0.0:
            continue
        wx = b * complex(math.exp(-a.real * math.log(x))) * complex(math.cos(a.imag * math.log(x)), -math.sin(a.imag * math.log(x)))
        phase = complex(math.cos(t * math.log(m)), -math.sin(t * math.log(m)))
        n2 = 1
        while n2 * n2 <= m:
            if m % (n2 * n2) == 0:
                n = m // (n2 * n2)
                total += _coef(table, n2, n) * gl2.eigenvalue(n) * phase * wx
            n2 += 1
    return total / math.sqrt(P)


@dataclass
class CauchySplit:
    lhs: float
    rhs: float
    dial: float
    holds: bool


def cauchy_split_bound(table, gl2: GL2MaassData, P: float, v: complex, bump: BumpWeight = BumpWeight()) -> CauchySplit:
    lo, hi = _support(P, bump)
    inner = []
    n2 = 1
    while n2 * n2 < hi:
        inner.append((n2, afe_inner(table, gl2, P, v, n2, bump)))
        n2 += 1
    t = gl2.spectral_t
    S = sum(np.exp(-2j * t * math.log(k)) * x for k, x in inner) / math.sqrt(P) if inner else 0j
    dial = math.fsum(1 / k for k, _ in inner)
    rhs = dial * math.fsum((1 / k) * abs(k / math.sqrt(P) * x) ** 2 for k, x in inner)
    lhs = float(abs(S) ** 2)
    return CauchySplit(lhs, rhs, dial, bool(lhs <= rhs * (1 + 1e-12)))


def dyadic_grid(cap: float) -> list[float]:
    out = []
    P = 1.0
    while P <= cap:
        out.append(P)
        P *= 2
    return out


def v_nodes(T: float, eps: float, count: int = 9) -> np.ndarray:
    """Chebyshev points on the segment eps + i[-log T, log T]."""
    k = np.arange(count)
    u = np.cos((2 * k + 1) * np.pi / (2 * count))
    return eps + 1j * math.log(T) * u


def afe_sweep(table, gl2: GL2MaassData, T: float, eps: float, P_cap: float, count: int = 9, bump: BumpWeight = BumpWeight()):
    """Cauchy split at every (P, v) grid point."""
    rows = []
    for P in dyadic_grid(P_cap):
        for v in v_nodes(T, eps, count):
            cs = cauchy_split_bound(table, gl2, P, v, bump)
            rows.append({"P": P, "v": [v.real, v.imag], "lhs": cs.lhs, "rhs": cs.rhs, "holds": cs.holds,
                         "above_range": P > T ** (2 + eps)})
    return rows
