"""Smooth test weights with analytic derivatives and Mellin transforms.

Two families:

* ``BumpWeight``: exp(-1/(1-t^2)) with t = 2(x-shift)/scale - 3, supported on
  [shift + scale, shift + 2 scale]; derivatives come from the polynomial
  recursion Q_{n+1} = Q_n' (1-t^2)^2 + (4nt(1-t^2) - 2t) Q_n.
* ``LogNormalWeight``: P(x d/dx) applied to exp(-(log(x/center))^2 / (2 width^2)).
  Its Mellin transform is Gaussian in the imaginary direction, which makes
  dual sums short; the operator P places Mellin zeros where requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import eval_hermitenorm


def _bump_polys(order: int) -> list[np.ndarray]:
    one_minus_t2 = np.array([1.0, 0.0, -1.0])
    sq = P.polymul(one_minus_t2, one_minus_t2)
    polys = [np.array([1.0])]
    for n in range(order):
        q = polys[-1]
        a = P.polymul(P.polyder(q) if len(q) > 1 else np.array([0.0]), sq)
        b = P.polymul(P.polymul(np.array([0.0, 4.0 * n]), one_minus_t2), q)
        c = P.polymul(np.array([0.0, -2.0]), q)
        polys.append(P.polyadd(P.polyadd(a, b), c))
    return polys


_BUMP_POLYS = _bump_polys(12)
_BUMP_MASS = 0.443993816168079  # integral of exp(-1/(1-t^2)) over [-1, 1]


@dataclass(frozen=True)
class BumpWeight:
    """exp(-1/(1-t^2)), t = 2(x - shift)/scale - 3; support [shift+scale, shift+2*scale]."""

    scale: float = 1.0
    shift: float = 0.0
    amplitude: float = 1.0

    @property
    def support(self) -> tuple[float, float]:
        return (self.shift + self.scale, self.shift + 2 * self.scale)

    def _t(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - self.shift) / self.scale - 3.0

    def derivative(self, x, order: int = 0) -> np.ndarray:
        t = self._t(x)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        ti = t[inside]
        u = 1.0 - ti * ti
        base = np.exp(-1.0 / u)
        q = P.polyval(ti, _BUMP_POLYS[order])
        with np.errstate(under="ignore"):
            out[inside] = q * base / u ** (2 * order)
        return self.amplitude * out * (2.0 / self.scale) ** order

    def __call__(self, x) -> np.ndarray:
        return self.derivative(x, 0)

    def complex_eval(self, x) -> np.ndarray:
        """Analytic continuation off the real axis (used on deformed contours)."""
        t = 2.0 * (np.asarray(x, dtype=complex) - self.shift) / self.scale - 3.0
        return self.amplitude * np.exp(-1.0 / (1.0 - t * t))

    @cached_property
    def derivative_bounds(self) -> dict[int, float]:
        """sup |w^(j)| for j <= 8, from dense sampling, padded by 5%."""
        a, b = self.support
        x = np.linspace(a, b, 200001)
        return {j: 1.05 * float(np.max(np.abs(self.derivative(x, j)))) for j in range(9)}

    def mass(self) -> float:
        return self.amplitude * _BUMP_MASS * self.scale / 2


@dataclass(frozen=True)
class LogNormalWeight:
    """P(x d/dx) g(x), g(x) = exp(-(log(x/center))^2/(2 width^2)).

    ``zeros`` lists points s0 where the Mellin transform must vanish; each one
    contributes the factor (x d/dx + s0), i.e. (s0 - s) on the Mellin side.
    """

    center: float
    width: float
    zeros: tuple[complex, ...] = ()
    amplitude: float = 1.0

    @cached_property
    def _op(self) -> np.ndarray:
        # coefficients c_k of prod (D + s0), D = d/du, u = log x
        coeffs = np.array([1.0 + 0j])
        for s0 in self.zeros:
            coeffs = P.polymul(coeffs, np.array([s0, 1.0], dtype=complex))
        if np.allclose(coeffs.imag, 0):
            coeffs = coeffs.real
        return coeffs

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=np.result_type(self._op, float))
        pos = x > 0
        z = (np.log(x[pos]) - math.log(self.center)) / self.width
        g = np.exp(-0.5 * z * z)
        acc = np.zeros_like(z, dtype=out.dtype)
        for k, ck in enumerate(self._op):
            # D^k g = (-1/width)^k He_k(z) g
            acc = acc + ck * (-1.0 / self.width) ** k * eval_hermitenorm(k, z)
        out[pos] = self.amplitude * acc * g
        return out

    def mellin(self, s) -> np.ndarray:
        """int_0^inf w(x) x^(s-1) dx."""
        s = np.asarray(s, dtype=complex)
        base = math.sqrt(2 * math.pi) * self.width * np.exp(s * math.log(self.center) + 0.5 * (self.width * s) ** 2)
        poly = np.ones_like(s)
        for s0 in self.zeros:
            poly = poly * (s0 - s)
        return self.amplitude * poly * base

    def support_window(self, tail: float = 1e-17) -> tuple[float, float]:
        """Interval outside which |w| is below ``tail`` times its scale."""
        deg = len(self.zeros)
        z = 2.0
        while math.exp(-0.5 * z * z) * (1 + z) ** deg * max(1.0, np.max(np.abs(self._op))) * (1 / self.width) ** deg > tail:
            z += 0.25
        return (self.center * math.exp(-z * self.width), self.center * math.exp(z * self.width))

    def scaled(self, factor: float) -> "LogNormalWeight":
        return LogNormalWeight(self.center, self.width, self.zeros, self.amplitude * factor)


@dataclass(frozen=True)
class CombinedWeight:
    """Finite linear combination of weights (used for linearity checks)."""

    parts: tuple = field(default_factory=tuple)
    coeffs: tuple = field(default_factory=tuple)

    def __call__(self, x):
        return sum(c * w(x) for c, w in zip(self.coeffs, self.parts))

    def mellin(self, s):
        return sum(c * w.mellin(s) for c, w in zip(self.coeffs, self.parts))

    def support_window(self, tail: float = 1e-17):
        wins = [w.support_window(tail) for w in self.parts]
        return (min(a for a, _ in wins), max(b for _, b in wins))
