"""Small exact-arithmetic helpers shared by the number-theoretic modules."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np


class ResourceError(RuntimeError):
    """Raised when a requested computation exceeds its configured budget."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


@lru_cache(maxsize=65536)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n >= 1`` as ``((p, e), ...)`` with p increasing."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def valuation(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def units(c: int) -> list[int]:
    """Reduced residues modulo ``c``; for c = 1 this is ``[0]``."""
    if c == 1:
        return [0]
    return [v for v in range(1, c) if math.gcd(v, c) == 1]


def inverse_mod(v: int, c: int) -> int:
    if c == 1:
        return 0
    return pow(v, -1, c)


def e_frac(num: int, den: int) -> complex:
    """e(num/den) = exp(2 pi i num/den) with the fraction reduced exactly first."""
    r = num % den
    return cmath.exp(2j * math.pi * r / den)


def e_frac_array(num: np.ndarray, den: int) -> np.ndarray:
    r = np.mod(np.asarray(num, dtype=np.int64), den)
    return np.exp(2j * np.pi * r / den)
