"""Measured inertness: sup_x |x^j w^(j)(x)| / X^j on a box."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from .weights import BumpWeight


@dataclass
class InertProfile:
    X: float
    max_order: int
    measured_constants: dict  # (j,) -> sup |x^j w^(j)| / X^j
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.X < 1:
            raise ValueError("X must be >= 1")

    def is_inert(self, ceiling) -> bool:
        """ceiling: a number, or a map order -> number."""
        for (j,), c in self.measured_constants.items():
            lim = ceiling[j] if isinstance(ceiling, dict) else ceiling
            if not math.isfinite(c) or c > lim:
                return False
        return True


@dataclass(frozen=True)
class ConstantWeight:
    value: complex = 1.0

    def derivative(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, self.value if order == 0 else 0.0, dtype=complex)


@dataclass(frozen=True)
class AFEWeight:
    """x^(-1/2 - v) * bump(x); derivatives by the Leibniz rule, exactly."""

    v: complex
    bump: BumpWeight = BumpWeight()

    def derivative(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        a = 0.5 + self.v
        out = np.zeros(x.shape, dtype=complex)
        for k in range(order + 1):
            # (x^-a)^(k) = (-a)(-a-1)...(-a-k+1) x^(-a-k)
            falling = complex(np.prod([-a - i for i in range(k)])) if k else 1.0
            out += math.comb(order, k) * falling * x ** (-a - k) * self.bump.derivative(x, order - k)
        return out

    def __call__(self, x):
        return self.derivative(x, 0)


@dataclass(frozen=True)
class PhaseWeight:
    """e(freq * x) * bump(x)."""

    freq: float
    bump: BumpWeight = BumpWeight()

    def derivative(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        k2 = 2j * math.pi * self.freq
        ph = np.exp(k2 * x)
        out = np.zeros(x.shape, dtype=complex)
        for k in range(order + 1):
            out += math.comb(order, k) * k2**k * self.bump.derivative(x, order - k)
        return out * ph

    def __call__(self, x):
        return self.derivative(x, 0)


def _fd_derivative(f, x, order, h):
    # central differences of the given order, step h
    coeffs = np.array([(-1) ** k * math.comb(order, k) for k in range(order + 1)], dtype=float)
    offs = (order / 2 - np.arange(order + 1)) * h
    return sum(c * f(x + o) for c, o in zip(coeffs, offs)) / h**order


def measure_inert(w, X: float, box=(1.0, 2.0), max_order: int = 4, samples: int = 4001,
                  fd_tol: float = 1e-3) -> InertProfile:
    """Per-order constants sup |x^j w^(j)(x)| / X^j on the box.

    Uses w.derivative(x, j) when available; otherwise central differences at two
    step sizes, flagging orders whose two estimates disagree by more than fd_tol.
    """
    x = np.linspace(box[0], box[1], samples)
    consts, flags = {}, []
    analytic = hasattr(w, "derivative")
    for j in range(max_order + 1):
        if analytic:
            d = np.asarray(w.derivative(x, j))
        else:
            h = (box[1] - box[0]) * 1e-3
            d1 = _fd_derivative(w, x, j, h)
            d2 = _fd_derivative(w, x, j, h / 2)
            scale = max(float(np.max(np.abs(d2))), 1e-300)
            err = float(np.max(np.abs(d1 - d2))) / scale
            if err > fd_tol:
                flags.append({"order": j, "achieved_relative_accuracy": err})
            d = d2
        consts[(j,)] = float(np.max(np.abs(x**j * d))) / X**j
    return InertProfile(X, max_order, consts, flags)
