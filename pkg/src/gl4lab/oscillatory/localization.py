"""Localization of Omega^+(n / gamma, t / (c q)) to n of size N_natural.

With the substitution c = d1 d2 h / n2 and gamma = d1 d2^2 h^4 / n2^2, the
phase 4 (x y)^(1/4) of the kernel competes with x r; a stationary point inside
the weight's support [N, 2N] exists only for n in [N_nat, 8 N_nat] (at t = tau),
where the value carries the phase e(-3 (y/r)^(1/3)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import BesselSpec, calibrate
from .weights import BumpWeight

_XG, _WG = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class LocalizationScales:
    H: float
    d1: int
    d2: int
    q: int
    N: float
    n2: int
    tau: float
    T: float
    eps: float
    N_flat: float = field(init=False)
    N_natural: float = field(init=False)

    def __post_init__(self):
        for name in ("H", "d1", "d2", "q", "N", "n2", "tau", "T"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        d1, d2, n2 = self.d1, self.d2, self.n2
        object.__setattr__(self, "N_flat", self.T**self.eps * self.H**4 * d1 * d2**2 / (self.N * n2**2))
        object.__setattr__(self, "N_natural", self.N**3 * n2**2 * self.tau**4 / (d1**3 * d2**2 * self.q**4))

    def modulus_and_scale(self, h: float) -> tuple[float, float]:
        """(c, gamma) = (d1 d2 h / n2, d1 d2^2 h^4 / n2^2)."""
        return self.d1 * self.d2 * h / self.n2, self.d1 * self.d2**2 * h**4 / self.n2**2


def localization_scales(H, d1, d2, q, N, n2, tau, T, eps) -> LocalizationScales:
    return LocalizationScales(H, d1, d2, q, N, n2, tau, T, eps)


def omega_components(spec: BesselSpec, N: float, y, r: float, w=None, nterms: int | None = None,
                     cycles_per_panel: float = 2.0) -> dict:
    """Omega^+(y, r) = int J(x y) e(x r) w(x / N) dx split by the sign of the kernel's
    exponential, using the large-argument expansion (requires N y > x_switch).

    Returns {+1: array, -1: array} over y. Everything independent of y is computed
    once; each y then costs one complex exponential per node.
    """
    if not spec.calibrated:
        calibrate(spec)
    w = BumpWeight() if w is None else w
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(N * y <= spec.x_switch):
        raise ValueError("argument below the asymptotic regime")
    a, b = w.support
    d = spec.degree
    cyc = d * (b * N * float(y.max())) ** (1.0 / d) + abs(r) * N * (b - a)
    panels = int(cyc / cycles_per_panel) + 32
    edges = np.linspace(a, b, panels + 1)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    u = (mid[:, None] + half[:, None] * _XG[None, :]).ravel()
    wt = (half[:, None] * _WG[None, :]).ravel() * w(u) * N
    keep = wt != 0
    u, wt = u[keep], wt[keep]
    rho = spec.rho
    if nterms is None:
        # smallest K whose first omitted term is below 1e-13 relative at the smallest argument
        tmin = (a * N * float(y.min())) ** (1.0 / d)
        bk = np.abs(spec.coeffs[1])
        nterms = next((k for k in range(1, len(bk)) if bk[k] / bk[0] * tmin ** (-k) < 1e-13), len(bk))
    s = (N * u) ** (1.0 / d)
    base = np.exp(2j * np.pi * np.fmod(N * r * u, 1.0)) * wt * s**rho
    out = {1: np.empty(y.shape, complex), -1: np.empty(y.shape, complex)}
    for i, yy in enumerate(y):
        yq = yy ** (1.0 / d)
        t = s * yq
        inv = 1.0 / t
        osc = np.exp(2j * np.pi * d * np.fmod(t, 1.0))
        amp_scale = yq**rho
        for sg in (1, -1):
            bk = spec.coeffs[sg][:nterms]
            poly = np.full(t.shape, bk[-1], dtype=complex)
            for k in range(nterms - 2, -1, -1):
                poly = poly * inv + bk[k]
            o = osc if sg > 0 else osc.conj()
            out[sg][i] = amp_scale * np.sum(o * poly * base)
    return out


@dataclass
class LocalizationReport:
    scales: LocalizationScales
    h: float
    c: float
    gamma: float
    r: float
    lam: float
    n_grid: list
    magnitudes: list
    in_band_peak: float
    out_band_max: float
    plus_plus_max: float
    phase_rel_error: float
    band_ok: bool
    phase_ok: bool
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.band_ok and self.phase_ok


def verify_localization(spec: BesselSpec, scales: LocalizationScales, h: float, t: float | None = None,
                        steps_per_octave: int = 4, octaves: int = 6, band_tol: float = 1e-6,
                        phase_tol: float = 0.02, phase_points: int = 12) -> LocalizationReport:
    """Scan n over a log grid around N_natural; check out-of-band smallness and the in-band phase."""
    t = scales.tau if t is None else t
    c, gamma = scales.modulus_and_scale(h)
    r = t / (c * scales.q)
    Nn = scales.N_natural * (t / scales.tau) ** 4
    lam = scales.N * r
    if Nn < 1:
        return LocalizationReport(scales, h, c, gamma, r, lam, [], [], 0.0, 0.0, 0.0, math.nan, False, False,
                                  note="degenerate scenario: N_natural below 1, band empty")
    lo, hi = Nn / 8, 8 * Nn
    # half-step offset keeps the band edges N_nat/8 and 8 N_nat strictly between samples
    k = np.arange(-(octaves + 3) * steps_per_octave, (octaves + 3) * steps_per_octave) + 0.5
    n_grid = Nn * 2.0 ** (k / steps_per_octave)
    comps = omega_components(spec, scales.N, n_grid / gamma, r)
    total = comps[1] + comps[-1]
    mags = np.abs(total)
    inb = (n_grid >= lo) & (n_grid <= hi)
    peak = float(mags[inb].max()) if inb.any() else 0.0
    out = float(mags[~inb].max()) if (~inb).any() else 0.0
    pp = float(np.abs(comps[1]).max())

    # phase: at interior centres n, compare arg Omega(n (1 + delta)) - arg Omega(n) with the
    # increment of -6 pi (y/r)^(1/3); delta is chosen so the predicted step is 1.5 rad
    centres = np.geomspace(Nn * 1.5, Nn * 6.0, phase_points)
    yc = centres / gamma
    rate = 2 * np.pi * (yc / r) ** (1.0 / 3.0)  # |d phase / d log n|
    y2 = yc * (1 + 1.5 / rate)
    v1 = omega_components(spec, scales.N, yc, r)
    v2 = omega_components(spec, scales.N, y2, r)
    meas = np.angle((v2[1] + v2[-1]) / (v1[1] + v1[-1]))
    pred = -6 * np.pi * ((y2 / r) ** (1.0 / 3.0) - (yc / r) ** (1.0 / 3.0))
    rel = float(np.max(np.abs(meas - pred) / np.abs(pred)))
    return LocalizationReport(
        scales, h, c, gamma, r, lam, n_grid.tolist(), mags.tolist(), peak, out, pp, float(rel),
        band_ok=bool(out < band_tol * peak and pp < band_tol * peak), phase_ok=bool(rel <= phase_tol),
    )


def scenario_for(N_natural: float, lam: float, d1: int = 1, d2: int = 1, n2: int = 1, q: int = 1,
                 h: float = 1.0, T: float = 10.0, eps: float = 0.1, H: float | None = None) -> LocalizationScales:
    """Scales with the requested N_natural and oscillation count lam = N tau / (c q).

    From N_nat = n2^2 lam^4 c^4 / (N d1^3 d2^2) with c = d1 d2 h / n2.
    """
    c = d1 * d2 * h / n2
    N = n2**2 * lam**4 * c**4 / (N_natural * d1**3 * d2**2)
    tau = lam * c * q / N
    return LocalizationScales(H if H is not None else h, d1, d2, q, N, n2, tau, T, eps)


def stationary_prediction(spec: BesselSpec, N: float, y: float, r: float, w=None) -> complex:
    """Leading stationary-phase value of the e(-4(xy)^(1/4)) part of Omega^+(y, r):
    B_0^- y^(-3/8) x0^(-3/8) w(x0/N) e(phi(x0) + 1/8) / sqrt(phi''(x0)), x0 = y^(1/3) r^(-4/3).
    Its modulus is of size 1 / (N r^2)."""
    if not spec.calibrated:
        calibrate(spec)
    w = BumpWeight() if w is None else w
    x0 = y ** (1.0 / 3.0) * r ** (-4.0 / 3.0)
    phi = -3.0 * (y / r) ** (1.0 / 3.0)
    phi2 = 0.75 * y**0.25 * x0 ** (-1.75)
    amp = spec.coeffs[-1][0] * (x0 * y) ** (spec.rho.real / 4) * complex(w(np.array([x0 / N]))[0])
    return complex(amp * np.exp(2j * np.pi * (math.fmod(phi, 1.0) + 0.125)) / math.sqrt(phi2))


def flat_profile(spec: BesselSpec, N: float, y, r: float = 0.0, w=None) -> np.ndarray:
    """v(y) = Omega^+(y, r) sqrt(y / N) for N y <= 1 (x-side quadrature; w scaled to [N, 2N]).

    The small-argument bound |J(x)| << |x|^(-1/2) makes v bounded and inert there."""
    from .hankel import hankel_transform

    w = BumpWeight(scale=N) if w is None else w
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return np.array([hankel_transform(spec, w, yy, r) * math.sqrt(yy / N) for yy in y])
