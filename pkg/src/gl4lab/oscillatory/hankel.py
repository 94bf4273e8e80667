"""Hankel transforms Omega(y, r) = int J(+-x y) e(x r) w(x) dx.

Two independent routes:

* ``hankel_transform``: quadrature in x with the kernel from ``bessel_kernel``
  (any weight, any r);
* ``MellinHankel``: for r = 0 and weights with a Mellin transform,
  Omega(y) = (1/2pi) int G(s) w~(1 - s) y^(-s) dtau on Re s = sigma, by the
  trapezoid rule (exponentially accurate for these analytic integrands). It
  also yields the certified bound |Omega(y)| <= B(sigma) y^(-sigma).
"""

from __future__ import annotations

import math

import numpy as np

from .gamma_ratio import gamma_ratio
from .kernel import BesselSpec, calibrate, kernel_asymptotic, kernel_interpolated

_XG, _WG = np.polynomial.legendre.leggauss(20)


class QuadratureError(RuntimeError):
    pass


def _weight_window(w):
    if hasattr(w, "support"):
        return w.support
    return w.support_window()


def kernel_values(spec: BesselSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized J(x): expansion beyond x_switch, interpolant inside, zero for x < -NEG_CUTOFF."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    big = x > spec.x_switch
    if np.any(big):
        if not spec.calibrated:
            calibrate(spec)
        out[big] = kernel_asymptotic(spec, x[big])
    if np.any(~big):
        out[~big] = kernel_interpolated(spec, x[~big])
    return out


def hankel_transform(spec: BesselSpec, w, y: float, r: float = 0.0, sign: int = 1,
                     tol: float = 1e-10, max_panels: int = 1 << 16) -> complex:
    """int J(sign x y) e(x r) w(x) dx over the support of w (y > 0)."""
    if y <= 0:
        raise ValueError("y must be positive; use sign for the reflected kernel")
    if not spec.calibrated:
        calibrate(spec)
    a, b = _weight_window(w)
    d = spec.degree
    cycles = d * (b * y) ** (1.0 / d) + abs(r) * (b - a)
    panels = int(2 * cycles) + 16

    def run(p):
        edges = np.linspace(a, b, p + 1)
        mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
        x = (mid[:, None] + half[:, None] * _XG[None, :]).ravel()
        wt = (half[:, None] * _WG[None, :]).ravel()
        kv = kernel_values(spec, sign * x * y)
        return complex(np.sum(kv * np.exp(2j * np.pi * r * x) * w(x) * wt))

    prev = run(panels)
    while panels < max_panels:
        panels *= 2
        cur = run(panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"x-quadrature did not settle: last change {abs(cur - prev):.3g}")


class MellinHankel:
    """Omega^+-(y) for a weight with ``mellin``; vectorized in y."""

    def __init__(self, lambdas, w, sigma: float = 0.5, step: float = 0.02, rel_cut: float = 1e-22):
        self.lambdas = tuple(complex(l) for l in lambdas)
        self.w = w
        self.sigma = sigma
        self.step = step
        tmax = 10.0
        while True:
            edge = self._integrand_abs(np.array([-tmax, tmax]), sigma)
            peak = self._integrand_abs(np.linspace(-tmax, tmax, 201), sigma).max()
            if peak == 0 or edge.max() < rel_cut * peak or tmax > 2000:
                break
            tmax *= 1.25
        self.tmax = tmax
        self.tau = np.arange(-tmax, tmax + step / 2, step)
        s = sigma + 1j * self.tau
        m = w.mellin(1 - s)
        self._g = {eta: gamma_ratio(s, self.lambdas, eta) * m for eta in (0, 1)}
        self._s = s

    def _integrand_abs(self, tau, sigma, eta=None):
        s = sigma + 1j * tau
        m = np.abs(self.w.mellin(1 - s))
        etas = (0, 1) if eta is None else (eta,)
        return sum(np.abs(gamma_ratio(s, self.lambdas, e)) for e in etas) * m

    def omega(self, y, sign: int = 1, chunk: int = 256) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty(y.shape, dtype=complex)
        comb = 0.5 * (self._g[0] + sign * self._g[1]) * self.step / (2 * np.pi)
        ly = np.log(y)
        for i in range(0, len(y), chunk):
            out[i : i + chunk] = np.exp(-np.outer(ly[i : i + chunk], self._s)) @ comb
        return out

    def bound_constant(self, sigma: float) -> float:
        """B(sigma) with |Omega^+-(y)| <= B(sigma) y^(-sigma) for all y > 0 (any sigma > 0)."""
        if sigma <= 0:
            raise ValueError("sigma must be positive (poles of the gamma ratio)")
        tmax = 10.0
        while self._integrand_abs(np.array([tmax]), sigma)[0] > 1e-30 * max(
            1e-300, self._integrand_abs(np.array([0.0]), sigma)[0]
        ) and tmax < 5000:
            tmax *= 1.25
        tau = np.linspace(-tmax, tmax, 40001)
        f = 0.5 * self._integrand_abs(tau, sigma)
        # (|G_0| + |G_1|)/2 |w~| bounds both sign combinations
        return float(np.trapezoid(f, tau) / (2 * np.pi)) * 1.01
