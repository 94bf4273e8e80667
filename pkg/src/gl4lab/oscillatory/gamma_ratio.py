"""Archimedean gamma ratios of degree d and their inverse Mellin transforms.

For Langlands parameters lam_1..lam_d and a parity eta in {0, 1} put

    G_eta(s) = i^(eta d) prod_j Gamma_R(s + eta - lam_j) / Gamma_R(1 - s + eta + lam_j),

with Gamma_R(s) = pi^(-s/2) Gamma(s/2).  The Bessel kernel on the real line is

    J(x)  = (J_0(x) + J_1(x)) / 2,   J(-x) = (J_0(x) - J_1(x)) / 2,   x > 0,

where J_eta is the inverse Mellin transform of G_eta.  In degree one this gives
J(x) = e(x); in degree two with lam = (it, -it) the classical Bessel pair.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.special import loggamma

LOG_PI = math.log(math.pi)


def log_gamma_r(z):
    return -0.5 * z * LOG_PI + loggamma(0.5 * z)


def gamma_ratio(s, lambdas, eta: int) -> np.ndarray:
    """G_eta(s) evaluated with scipy's complex loggamma (vectorized in s)."""
    s = np.asarray(s, dtype=complex)
    d = len(lambdas)
    acc = np.zeros_like(s)
    for lam in lambdas:
        acc = acc + log_gamma_r(s + eta - lam) - log_gamma_r(1 - s + eta + lam)
    return (1j ** (eta * d)) * np.exp(acc)


def gamma_ratio_mp(s, lambdas, eta: int):
    d = len(lambdas)
    out = mpmath.mpc(1j) ** (eta * d)
    for lam in lambdas:
        lam = mpmath.mpc(lam)
        out *= _gamma_r_mp(s + eta - lam) / _gamma_r_mp(1 - s + eta + lam)
    return out


def _gamma_r_mp(z):
    return mpmath.pi ** (-z / 2) * mpmath.gamma(z / 2)


def pole_margin(sigma: float, lambdas) -> float:
    """Distance in real part from the line Re s = sigma to the nearest pole of G_0 or G_1."""
    best = math.inf
    for lam in lambdas:
        for eta in (0, 1):
            # poles at s = lam - eta - 2k, k >= 0
            re = complex(lam).real - eta
            k = max(0, math.ceil((re - sigma) / 2))
            for kk in (k - 1, k, k + 1):
                if kk >= 0:
                    best = min(best, abs(sigma - (re - 2 * kk)))
    return best


def generic_parameters(lambdas, tol: float = 1e-6) -> bool:
    """True when no two poles of the numerator gammas collide (lam_i - lam_j not in 2Z)."""
    for i, a in enumerate(lambdas):
        for b in lambdas[i + 1 :]:
            diff = complex(a) - complex(b)
            if abs(diff.imag) < tol and abs((diff.real / 2) - round(diff.real / 2)) * 2 < tol:
                return False
    return True


def residue_series(x, lambdas, eta: int, dps: int | None = None):
    """J_eta(x) for x > 0 as the sum of residues of G_eta(s) x^(-s) at the left poles.

    Poles sit at s = lam_j - eta - 2k. Consecutive residues in k differ by the
    rational factor -(pi^(2d) x^2) / ((k+1) prod_{i!=j}(z_i - k - 1) prod_i (w_i + k))
    with z_i = (lam_j - lam_i)/2 and w_i = (1 + 2 eta + lam_i - lam_j)/2, so gamma
    functions are evaluated only at k = 0. The working precision is raised with x
    because the terms peak near exp(2 pi d x^(1/d)) before cancelling.
    """
    d = len(lambdas)
    x = mpmath.mpf(x)
    if dps is None:
        dps = 20 + int(2 * math.pi * d * float(x) ** (1.0 / d) / math.log(10)) + 5
    with mpmath.workdps(dps):
        lams = [mpmath.mpc(complex(l)) for l in lambdas]
        phase = mpmath.mpc(1j) ** (eta * d)
        pi2d_x2 = mpmath.pi ** (2 * d) * x * x
        tiny = mpmath.mpf(10) ** (-(dps - 2))
        total = mpmath.mpc(0)
        for j, lj in enumerate(lams):
            s0 = lj - eta
            term = mpmath.mpf(2) * x ** (-s0)
            for i, li in enumerate(lams):
                if i != j:
                    term *= _gamma_r_mp(s0 + eta - li)
                term /= _gamma_r_mp(1 - s0 + eta + li)
            z = [(lj - li) / 2 for i, li in enumerate(lams) if i != j]
            w = [(1 + 2 * eta + li - lj) / 2 for li in lams]
            k = 0
            small = 0
            kmin = 2 * math.pi * float(x) ** (1.0 / d) + 5
            while True:
                total += term
                if abs(term) < tiny * max(abs(total), mpmath.mpf(10) ** -30):
                    small += 1
                    if small > 3 and k > kmin:
                        break
                else:
                    small = 0
                den = (k + 1) * mpmath.fprod(zi - k - 1 for zi in z) * mpmath.fprod(wi + k for wi in w)
                term = -term * pi2d_x2 / den
                k += 1
        return phase * total


def residue_series_direct(x, lambdas, eta: int, dps: int | None = None):
    """Residue sum with every gamma factor evaluated afresh (slow; the oracle for
    ``residue_series``)."""
    d = len(lambdas)
    x = mpmath.mpf(x)
    if dps is None:
        dps = 20 + int(2 * math.pi * d * float(x) ** (1.0 / d) / math.log(10)) + 5
    with mpmath.workdps(dps):
        lams = [mpmath.mpc(complex(l)) for l in lambdas]
        phase = mpmath.mpc(1j) ** (eta * d)
        total = mpmath.mpc(0)
        for j, lj in enumerate(lams):
            k = 0
            small = 0
            while True:
                s = lj - eta - 2 * k
                # residue of Gamma_R(s + eta - lam_j) at z = -k: 2 (-1)^k / k! * pi^(k)
                res = 2 * (-1) ** k / mpmath.factorial(k) * mpmath.pi ** (-(s + eta - lj) / 2)
                num = mpmath.mpc(1)
                for i, li in enumerate(lams):
                    if i != j:
                        num *= _gamma_r_mp(s + eta - li)
                den = mpmath.mpc(1)
                for li in lams:
                    den *= _gamma_r_mp(1 - s + eta + li)
                term = res * num / den * x ** (-s)
                total += term
                if abs(term) < mpmath.mpf(10) ** (-(dps - 2)) * max(abs(total), mpmath.mpf(10) ** -30):
                    small += 1
                    if small > 3 and k > 2 * math.pi * float(x) ** (1.0 / d) + 5:
                        break
                else:
                    small = 0
                k += 1
        return phase * total


def kernel_mp(x: float, lambdas, dps: int | None = None) -> complex:
    """J(x) for real x != 0 from the residue series (exact up to working precision)."""
    if x == 0:
        raise ValueError("kernel undefined at 0")
    ax = abs(x)
    j0 = residue_series(ax, lambdas, 0, dps)
    j1 = residue_series(ax, lambdas, 1, dps)
    val = (j0 + j1) / 2 if x > 0 else (j0 - j1) / 2
    return complex(val)
