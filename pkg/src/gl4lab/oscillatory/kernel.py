"""The Bessel kernel J(x) attached to a set of Langlands parameters.

Small |x| uses the Mellin-Barnes integral summed by residues (``gamma_ratio``);
large positive x uses the expansion

    J(x) ~ sum_{+-} e(+-d x^(1/d)) x^(rho/d) sum_k B_k^+- x^(-k/d),

whose ratios B_k/B_0 come from the formal solution of the differential
equation P(x d/dx) J = (2 pi)^(2d) x^2 J, P(D) = prod_j (lam_j + D)(1 - lam_j - D).
Only the two leading constants B_0^+- are fitted to residue-series values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .gamma_ratio import generic_parameters, kernel_mp, pole_margin

X_SWITCH = 30.0
DEFAULT_TERMS = 24


class KernelError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def formal_series(lambdas: tuple, sign: int, nterms: int, dps: int = 50):
    """Exponent rho (in t = x^(1/d)) and coefficients a_0 = 1, a_1, ... of the
    formal solution exp(c t) t^rho sum a_k t^(-k), c = sign * 2 pi d i."""
    d = len(lambdas)
    with mpmath.workdps(dps):
        c = sign * 2 * mpmath.pi * d * 1j
        lam = [mpmath.mpc(complex(l)) for l in lambdas]
        # polynomial coefficients of P(E) in E, lowest degree first
        poly = [mpmath.mpc(1)]
        for lj in lam:
            for root_const, root_lin in ((lj, 1), (1 - lj, -1)):
                new = [mpmath.mpc(0)] * (len(poly) + 1)
                for i, pc in enumerate(poly):
                    new[i] += pc * root_const
                    new[i + 1] += pc * root_lin
                poly = new
        cd = c / d
        rhs = (2 * mpmath.pi) ** (2 * d)

        def apply(m):
            # P(E) t^m as coefficients at powers m, m+1, ..., m+2d
            out = [mpmath.mpc(0)] * (2 * d + 1)
            cur = [mpmath.mpc(1)]
            for k, pk in enumerate(poly):
                if k > 0:
                    nxt = [mpmath.mpc(0)] * (len(cur) + 1)
                    for i, v in enumerate(cur):
                        nxt[i + 1] += cd * v
                        nxt[i] += (m + i) * v / d
                    cur = nxt
                for i, v in enumerate(cur):
                    out[i] += pk * v
            out[2 * d] -= rhs
            return out

        top = apply(mpmath.mpf(0))
        if abs(top[2 * d]) > mpmath.mpf(10) ** (-dps // 2):
            raise KernelError("exponential rate does not solve the leading equation")
        # coefficient at offset 2d-1 is linear in m: solve for rho
        f0 = apply(mpmath.mpf(0))[2 * d - 1]
        f1 = apply(mpmath.mpf(1))[2 * d - 1]
        rho = -f0 / (f1 - f0)
        cols = [apply(rho - k) for k in range(nterms)]
        a = [mpmath.mpc(1)]
        for j in range(1, nterms):
            # equation at power rho + 2d - 1 - j
            acc = mpmath.mpc(0)
            for k in range(max(0, j - 2 * d + 1), j):
                acc += a[k] * cols[k][2 * d - 1 - j + k]
            a.append(-acc / cols[j][2 * d - 1])
        return complex(rho), tuple(complex(v) for v in a)


@dataclass
class BesselSpec:
    lambdas: tuple
    sign: int = 1
    contour_sigma: float = 0.5
    x_switch: float = X_SWITCH
    coeffs: dict = field(default_factory=dict)  # sign -> array of B_k
    rho: complex | None = None

    def __post_init__(self):
        self.lambdas = tuple(complex(l) for l in self.lambdas)
        if not self.lambdas:
            raise ValueError("need at least one Langlands parameter")
        if abs(sum(self.lambdas)) > 1e-12:
            raise ValueError("Langlands parameters must sum to zero")
        if pole_margin(self.contour_sigma, self.lambdas) < 0.1:
            raise KernelError(f"contour Re s = {self.contour_sigma} within 0.1 of a gamma pole")

    @property
    def degree(self) -> int:
        return len(self.lambdas)

    @property
    def calibrated(self) -> bool:
        return bool(self.coeffs)


@lru_cache(maxsize=200000)
def _kernel_small(x: float, lambdas: tuple) -> complex:
    ax = abs(x)
    d = len(lambdas)
    dps = 20 + int(2 * math.pi * d * ax ** (1.0 / d) / math.log(10)) + 5
    if x < 0:
        dps += int(2 * math.pi * d * ax ** (1.0 / d) / math.log(10))
    if not generic_parameters(lambdas):
        # confluent poles: perturb symmetrically and average (error O(perturbation^2))
        eps = 1e-12
        pert = tuple(l + eps * (k - (d - 1) / 2) for k, l in enumerate(lambdas))
        with mpmath.workdps(dps + 30):
            return kernel_mp(x, pert, dps + 30)
    return kernel_mp(x, lambdas, dps)


def kernel_contour(spec: BesselSpec, x: float) -> complex:
    """Mellin-Barnes evaluation (residue summation at adaptive precision)."""
    if x == 0:
        raise ValueError("kernel undefined at 0")
    return _kernel_small(float(x), spec.lambdas)


INTERP_XMIN = 1e-4
NEG_CUTOFF = 200.0  # |J(-x)| < e^-60 beyond this; the interpolant covers [-NEG_CUTOFF, -INTERP_XMIN]


@lru_cache(maxsize=64)
def _interpolant(lambdas: tuple, sign: int, xmax: float, nodes: int):
    """Chebyshev interpolant of J(sign * e^u) for u in [log INTERP_XMIN, log xmax]."""
    cheb = np.polynomial.chebyshev
    a, b = math.log(INTERP_XMIN), math.log(xmax)
    k = np.arange(nodes)
    t = np.cos(np.pi * (k + 0.5) / nodes)
    u = 0.5 * (a + b) + 0.5 * (b - a) * t
    vals = np.array([_kernel_small(float(sign * math.exp(ui)), lambdas) for ui in u])
    cre = cheb.chebfit(t, vals.real, nodes - 1)
    cim = cheb.chebfit(t, vals.imag, nodes - 1)
    tail = float(np.max(np.abs(cre[-8:]) + np.abs(cim[-8:])))
    return a, b, cre, cim, tail


def kernel_interpolated(spec: BesselSpec, x, nodes: int | None = None) -> np.ndarray:
    """J(x) for INTERP_XMIN <= |x| <= x_switch (x > 0) or <= negative_reach (x < 0) from a cached
    Chebyshev interpolant in log|x|; zero below -NEG_CUTOFF in even degree; direct residues
    below INTERP_XMIN."""
    cheb = np.polynomial.chebyshev
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape, dtype=complex)
    for sg, xmax in ((1, spec.x_switch), (-1, negative_reach(spec))):
        m = (sg * x >= INTERP_XMIN) & (sg * x <= xmax)
        if np.any(m):
            a, b, cre, cim, _ = _interpolant(spec.lambdas, sg, float(xmax), nodes or node_count(spec.degree, xmax))
            t = (2 * np.log(sg * x[m]) - a - b) / (b - a)
            out[m] = cheb.chebval(t, cre) + 1j * cheb.chebval(t, cim)
    for i in np.nonzero(np.abs(x) < INTERP_XMIN)[0]:
        out[i] = _kernel_small(float(x[i]), spec.lambdas)
    if np.any(x > spec.x_switch):
        raise ValueError("use the asymptotic expansion beyond x_switch")
    if spec.degree % 2:
        for i in np.nonzero(x < -spec.x_switch)[0]:
            out[i] = _kernel_small(float(x[i]), spec.lambdas)
    return out


def negative_reach(spec: BesselSpec) -> float:
    """Even degree: J(-x) decays like exp(-c x^(1/d)) and is cut at NEG_CUTOFF.
    Odd degree: -1 has a real d-th root, J(-x) keeps oscillating, interpolate only to x_switch."""
    return NEG_CUTOFF if spec.degree % 2 == 0 else spec.x_switch


def node_count(d: int, xmax: float) -> int:
    """Chebyshev nodes for J(e^u): the phase 2 pi d e^(u/d) turns at rate 2 pi xmax^(1/d) at the top."""
    half = 0.5 * (math.log(xmax) - math.log(INTERP_XMIN))
    return max(256, int(1.3 * half * 2 * math.pi * xmax ** (1.0 / d)) + 64)


def interpolation_tail(spec: BesselSpec, sign: int = 1, nodes: int | None = None) -> float:
    """Size of the last Chebyshev coefficients (a convergence diagnostic)."""
    xmax = spec.x_switch if sign > 0 else negative_reach(spec)
    return _interpolant(spec.lambdas, sign, float(xmax), nodes or node_count(spec.degree, xmax))[4]


def asymptotic_basis(spec: BesselSpec, x, sign: int, nterms: int) -> np.ndarray:
    """Columns e(+-d x^(1/d)) x^((rho - k)/d), k < nterms."""
    x = np.asarray(x, dtype=float)
    d = spec.degree
    rho, _ = formal_series(spec.lambdas, sign, max(nterms, 1))
    t = x ** (1.0 / d)
    osc = np.exp(sign * 2j * np.pi * d * t)
    return np.stack([osc * t ** (rho - k) for k in range(nterms)], axis=-1)


def kernel_asymptotic(spec: BesselSpec, x, nterms: int | None = None, signs=(1, -1)) -> np.ndarray:
    if not spec.calibrated:
        raise KernelError("asymptotic coefficients not calibrated; call calibrate() first")
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for sg in signs:
        b = spec.coeffs[sg]
        k = len(b) if nterms is None else min(nterms, len(b))
        out = out + asymptotic_basis(spec, x, sg, k) @ b[:k]
    return out


def calibrate(spec: BesselSpec, x_grid=None, nterms: int = DEFAULT_TERMS) -> BesselSpec:
    """Fit B_0^+- (with exact ratios B_k/B_0) to residue-series values; freezes spec.coeffs."""
    if x_grid is None:
        x_grid = np.geomspace(60.0, 240.0, 14)
    x_grid = np.asarray(x_grid, dtype=float)
    vals = np.array([kernel_contour(spec, x) for x in x_grid])
    cols = []
    ratios = {}
    for sg in (1, -1):
        rho, a = formal_series(spec.lambdas, sg, nterms)
        ratios[sg] = np.array(a)
        cols.append(asymptotic_basis(spec, x_grid, sg, nterms) @ ratios[sg])
    design = np.stack(cols, axis=1)
    b0, *_ = np.linalg.lstsq(design, vals, rcond=None)
    spec.coeffs = {1: b0[0] * ratios[1], -1: b0[1] * ratios[-1]}
    spec.rho = formal_series(spec.lambdas, 1, 1)[0]
    return spec


def bessel_kernel(spec: BesselSpec, x) -> np.ndarray | complex:
    """J(x): residue series for |x| <= x_switch, expansion beyond; J(-x) for large x via residues."""
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape, dtype=complex)
    big = xs > spec.x_switch
    if np.any(big):
        if not spec.calibrated:
            calibrate(spec)
        out[big] = kernel_asymptotic(spec, xs[big])
    for i in np.nonzero(~big)[0]:
        out[i] = kernel_contour(spec, xs[i])
    return complex(out[0]) if scalar else out


def fit_asymptotic_coefficients(spec: BesselSpec, K: int, x_grid, values=None, weight_power: float | None = None) -> dict:
    """Least-squares fit of the K-term expansion with all 2K coefficients free.

    Rows are scaled by x^weight_power (default 3/8 + K/4, the size of the first
    omitted term), so the fit does not trade accuracy at large x for small x.
    Returns {'coeffs': {+1: B^+, -1: B^-}, 'cond': condition number}.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if values is None:
        values = np.array([kernel_contour(spec, x) for x in x_grid])
    if weight_power is None:
        weight_power = 0.375 + K / 4
    rw = x_grid**weight_power
    design = np.concatenate([asymptotic_basis(spec, x_grid, 1, K), asymptotic_basis(spec, x_grid, -1, K)], axis=1)
    design = design * rw[:, None]
    # column scaling keeps the conditioning estimate meaningful
    scale = np.linalg.norm(design, axis=0)
    sol, *_ = np.linalg.lstsq(design / scale, values * rw, rcond=None)
    sol = sol / scale
    cond = float(np.linalg.cond(design / scale))
    if cond > 1e12:
        raise KernelError(f"ill-conditioned asymptotic fit (cond {cond:.3g})")
    return {"coeffs": {1: sol[:K], -1: sol[K:]}, "cond": cond}


def residual_slope(x, residual, bins: int = 6) -> float:
    """Log-log slope of the binned maximum of residual * x^(3/8) (the envelope relative to
    the leading size x^(-3/8)); a K-term expansion should give about -K/4."""
    x = np.asarray(x, dtype=float)
    r = np.abs(np.asarray(residual)) * x**0.375
    edges = np.geomspace(x.min(), x.max() * (1 + 1e-12), bins + 1)
    cx, mx = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (x >= a) & (x < b)
        if m.any():
            cx.append(math.sqrt(a * b))
            mx.append(r[m].max())
    return float(np.polyfit(np.log(cx), np.log(mx), 1)[0])


def evaluate_fit(spec: BesselSpec, fit: dict, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    K = len(fit["coeffs"][1])
    return sum(asymptotic_basis(spec, x, sg, K) @ fit["coeffs"][sg] for sg in (1, -1))
