"""Low-degree cross-checks that pin the kernel normalization.

Degree 1 (lambda = 0): J(x) = e(x), so the transform of a weight is its Fourier
transform,  int J(x y) w(x) dx = w^(-y).
Degree 2 (lambda = +-it):  J(x) = -pi / sin(pi i t) (J_{2it}(z) - J_{-2it}(z)),
J(-x) = 4 cosh(pi t) K_{2it}(z),  z = 4 pi sqrt(x).
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.integrate import quad

from .hankel import hankel_transform
from .kernel import BesselSpec, bessel_kernel
from .weights import BumpWeight


def fourier_reference(w, y: float) -> complex:
    """int w(x) e(x y) dx by adaptive quadrature on the bump support."""
    a, b = w.support
    f = lambda x, trig: float(w(np.array([x]))[0]) * trig(2 * math.pi * x * y)  # noqa: E731
    kw = dict(limit=400, epsabs=1e-14, epsrel=1e-13)
    re = quad(f, a, b, args=(math.cos,), **kw)[0]
    im = quad(f, a, b, args=(math.sin,), **kw)[0]
    return complex(re, im)


def calibration_weights(count: int = 20, seed: int = 0) -> list[BumpWeight]:
    rng = np.random.default_rng(seed)
    return [BumpWeight(scale=float(rng.uniform(0.5, 3.0)), shift=float(rng.uniform(0.0, 2.0)),
                       amplitude=float(rng.uniform(0.5, 2.0))) for _ in range(count)]


def degree1_fourier_check(count: int = 20, ys=(0.3, 1.0, 2.5), seed: int = 0) -> dict:
    """Max error of the degree-1 transform against the Fourier transform, relative to int |w|."""
    spec = BesselSpec((0j,))
    worst, witness = 0.0, None
    for i, w in enumerate(calibration_weights(count, seed)):
        for y in ys:
            for sg in (1, -1):
                got = hankel_transform(spec, w, y, sign=sg, tol=1e-12)
                ref = fourier_reference(w, sg * y)
                # |w^| <= int |w|, the natural scale of the transform
                err = abs(got - ref) / w.mass()
                if err > worst:
                    worst, witness = err, (i, y, sg)
    return {"max_rel_err": worst, "witness": witness, "weights": count}


def classical_bessel(t: float, x: float) -> complex:
    """Degree-2 kernel at lambda = (it, -it) from Bessel functions (mpmath, 40 digits)."""
    with mpmath.workdps(40):
        z = 4 * mpmath.pi * mpmath.sqrt(abs(x))
        nu = 2j * t
        if x > 0:
            v = -mpmath.pi / mpmath.sin(mpmath.pi * 1j * t) * (mpmath.besselj(nu, z) - mpmath.besselj(-nu, z))
        else:
            v = 4 * mpmath.cosh(mpmath.pi * t) * mpmath.besselk(nu, z)
        return complex(v)


def degree2_bessel_check(t: float = 1.3, xs=None) -> dict:
    if xs is None:
        xs = np.linspace(1.0, 20.0, 39)
    spec = BesselSpec((1j * t, -1j * t))
    worst, witness = 0.0, None
    for x in xs:
        for sg in (1, -1):
            got = bessel_kernel(spec, sg * float(x))
            ref = classical_bessel(t, sg * float(x))
            err = abs(got - ref) / abs(ref)
            if err > worst:
                worst, witness = err, sg * float(x)
    return {"max_rel_err": worst, "witness": witness, "t": t}
