"""I(lam) = int_rho^{2 rho} e(lam (x +- gamma x^(1/gamma))) w(x) dx.

Two quadrature routes:

* real line: composite Gauss-Legendre with panels sized to the oscillation;
* deformed contour x = s + i h phi'(s)(s - rho)(2 rho - s)/rho, on which
  Im phi >= 0 so the integrand is damped away from stationary points. The
  weight is continued analytically (``complex_eval``). Endpoints are fixed and
  the bump decays at them along any non-tangential approach, so both routes
  give the same integral. The contour route is what makes values far below
  double-precision cancellation level computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .weights import BumpWeight

_XG, _WG = np.polynomial.legendre.leggauss(20)
NEGLIGIBLE_LOG = -690.0  # panels whose integrand stays below e^-690 contribute nothing representable


class QuadratureError(RuntimeError):
    pass


@dataclass
class QuadValue:
    value: complex
    error: float
    method: str
    panels: int

    def __complex__(self):
        return complex(self.value)


def phase(x, gamma: float, sign: int):
    return x + sign * gamma * x ** (1.0 / gamma)


def phase_prime(x, gamma: float, sign: int):
    return 1.0 + sign * x ** (1.0 / gamma - 1.0)


def has_stationary_point(gamma: float, rho: float, sign: int) -> bool:
    # phi' vanishes only for sign = -1 at x = 1
    return sign < 0 and rho <= 1.0 <= 2 * rho


def _panels_needed(lam, gamma, rho, sign):
    span = abs(phase(2 * rho, gamma, sign) - phase(rho, gamma, sign))
    # two oscillations per 20-point panel; convergence is still confirmed by doubling
    return int(math.ceil(lam * span / 2)) + 8


def _integrate(f, a, b, panels, keep=None):
    """Composite Gauss-Legendre; ``keep(edges)`` may mask out panels known to be negligible."""
    edges = np.linspace(a, b, panels + 1)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    if keep is not None:
        mask = keep(edges, mid)
        mid, half = mid[mask], half[mask]
    total = 0j
    chunk = 1 << 15
    for i in range(0, len(mid), chunk):
        m, hh = mid[i : i + chunk], half[i : i + chunk]
        s = (m[:, None] + hh[:, None] * _XG[None, :]).ravel()
        wt = (hh[:, None] * _WG[None, :]).ravel()
        total += np.sum(f(s) * wt)
    return total


def _real_line(lam, gamma, rho, w, sign, panels):
    def f(x):
        return np.exp(2j * np.pi * lam * phase(x, gamma, sign)) * w(x)

    return _integrate(f, rho, 2 * rho, panels)


def _contour(lam, gamma, rho, w, sign, panels, h):
    def path(s):
        bubble = (s - rho) * (2 * rho - s) / rho
        dp = phase_prime(s, gamma, sign)
        H = h * dp * bubble
        dH = h * (_phase_second(s, gamma, sign) * bubble + dp * (3 * rho - 2 * s) / rho)
        return s + 1j * H, 1 + 1j * dH

    def logmag(s):
        z, _ = path(s)
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            lw = np.log(np.abs(w.complex_eval(z)))
        return -2 * np.pi * lam * np.imag(phase(z, gamma, sign)) + np.nan_to_num(lw, nan=-np.inf)

    def keep(edges, mid):
        le = logmag(edges)
        lm = logmag(mid)
        return (np.maximum(le[:-1], le[1:]) > NEGLIGIBLE_LOG) | (lm > NEGLIGIBLE_LOG)

    def f(s):
        z, dz = path(s)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            val = np.exp(2j * np.pi * lam * phase(z, gamma, sign)) * w.complex_eval(z) * dz
        return np.where(np.isfinite(val), val, 0.0)

    return _integrate(f, rho, 2 * rho, panels, keep)


def _phase_second(x, gamma, sign):
    return sign * (1.0 / gamma - 1.0) * x ** (1.0 / gamma - 2.0)


def stationary_integral_q(gamma: float, lam: float, rho: float, w=None, sign: int = 1,
                          method: str = "auto", tol: float = 1e-12, max_panels: int = 1 << 23) -> QuadValue:
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    if rho <= 0 or lam <= 0:
        raise ValueError("rho and lam must be positive")
    w = BumpWeight(scale=rho) if w is None else w
    if method == "auto":
        method = "contour" if hasattr(w, "complex_eval") else "real"
    # contour height: keep the continued bump tame (|Im t| <= 0.25) and damp strongly
    h = 0.5 / max(1.0, float(np.max(np.abs(phase_prime(np.linspace(rho, 2 * rho, 64), gamma, sign)))))

    def run(p):
        if method == "real":
            return _real_line(lam, gamma, rho, w, sign, p)
        return _contour(lam, gamma, rho, w, sign, p, h)

    panels = _panels_needed(lam, gamma, rho, sign)
    prev = run(panels)
    err = math.inf
    while True:
        panels *= 2
        if panels > max_panels:
            raise QuadratureError(f"no convergence at lam={lam}: last change {err:.3g}")
        cur = run(panels)
        err = abs(cur - prev)
        if err <= tol:
            return QuadValue(cur, err, method, panels)
        prev = cur


def stationary_integral(gamma: float, lam: float, rho: float, w=None, sign: int = 1, **kw) -> complex:
    return stationary_integral_q(gamma, lam, rho, w, sign, **kw).value


def decay_bound(gamma: float, lam: float, rho: float, X: float, A: int) -> float:
    """rho (X / (lam (rho + rho^(1/gamma))))^A."""
    return rho * (X / (lam * (rho + rho ** (1.0 / gamma)))) ** A


def extracted_inert_factor(gamma: float, lam: float, rho: float, w=None, with_phase: bool = True, **kw) -> complex:
    """v(lam) = e(lam (gamma - 1)) sqrt(lam) I^-(lam); with_phase=False drops e(lam(gamma-1))."""
    if not (0.5 <= rho / math.sqrt(2) <= 2):
        raise ValueError("need 1/2 <= rho/sqrt(2) <= 2")
    val = math.sqrt(lam) * stationary_integral(gamma, lam, rho, w, -1, **kw)
    if with_phase:
        # reduce lam (gamma - 1) mod 1 before exponentiating
        val *= np.exp(2j * np.pi * math.fmod(lam * (gamma - 1), 1.0))
    return complex(val)


def lam_derivative(f, lam: float, rel_step: float = 1e-4, step: float | None = None) -> complex:
    """lam * d f / d lam by a fourth-order central difference (step lam * rel_step unless given).

    A fast phase such as e(lam (gamma - 1)) needs an absolute step well below
    1/(gamma - 1); a relative step would alias it at large lam."""
    h = lam * rel_step if step is None else step
    d = (-f(lam + 2 * h) + 8 * f(lam + h) - 8 * f(lam - h) + f(lam - 2 * h)) / (12 * h)
    return lam * d
