"""Hurwitz zeta, digamma and Dirichlet L-values by Euler-Maclaurin summation.

One evaluator covers every s != 1 and every height |t|: the direct sum runs
to N ~ |s|/2 and the Bernoulli correction series then shrinks by roughly
(1/pi)^2 per term.  Error estimates are the size of the first omitted
correction, i.e. heuristic, not rigorous.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, loggamma

_TERMS = 14


@lru_cache(maxsize=1)
def _bernoulli_coefficients() -> np.ndarray:
    # B_{2j} / (2j)! for j = 1 .. _TERMS + 1
    b = bernoulli(2 * _TERMS + 2)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, _TERMS + 2)])


def _cutoff(s: complex) -> int:
    return 20 + int(abs(s) / 2)


def hurwitz_zeta(s: complex, a: float, N: int | None = None) -> tuple[complex, float]:
    """(zeta(s, a), error estimate) for s != 1, a > 0."""
    s = complex(s)
    if s == 1:
        raise ZeroDivisionError("pole of zeta(s, a) at s = 1")
    if a <= 0:
        raise ValueError("a must be positive")
    if N is None:
        N = _cutoff(s)
    k = np.arange(N, dtype=np.float64) + a
    head = np.exp(-s * np.log(k)).sum()
    w = N + a
    lw = math.log(w)
    wms = np.exp(-s * lw)  # w^(-s)
    tail = w * wms / (s - 1) + 0.5 * wms
    coef = _bernoulli_coefficients()
    rising = s  # s (s+1) ... (s+2j-2)
    power = wms / w  # w^(-s-2j+1) for j = 1
    term = 0j
    for j in range(1, _TERMS + 2):
        term = coef[j - 1] * rising * power
        if j <= _TERMS:
            tail += term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= w * w
    value = complex(head + tail)
    roundoff = 1e-15 * (N + abs(value)) * max(1.0, w ** (-s.real) * N)
    return value, abs(term) + roundoff


def digamma(x: float, N: int = 20) -> tuple[float, float]:
    """(psi(x), error estimate) for x > 0."""
    if x <= 0:
        raise ValueError("x must be positive")
    head = -np.sum(1.0 / (np.arange(N, dtype=np.float64) + x))
    w = N + x
    val = math.log(w) - 0.5 / w
    coef = _bernoulli_coefficients()
    term = 0.0
    for j in range(1, _TERMS + 2):
        # B_{2j} / (2j w^(2j)) = coef * (2j-1)! / w^(2j)
        term = coef[j - 1] * math.factorial(2 * j - 1) / w ** (2 * j)
        if j <= _TERMS:
            val -= term
    return float(head + val), abs(term) + 1e-15 * abs(head)


def riemann_zeta(s: complex) -> tuple[complex, float]:
    return hurwitz_zeta(s, 1.0)


def dirichlet_L(chi: np.ndarray, s: complex) -> tuple[complex, float]:
    """L(s, chi) for a primitive character given as its table chi[0..q-1], q > 1.

    L(s, chi) = q^(-s) sum_a chi(a) zeta(s, a/q); at s = 1 the poles cancel
    and L(1, chi) = -(1/q) sum_a chi(a) psi(a/q).
    """
    q = len(chi)
    s = complex(s)
    if s == 1:
        total, err = 0.0, 0.0
        for a in range(1, q):
            if chi[a]:
                v, e = digamma(a / q)
                total += chi[a] * v
                err += e
        return complex(-total / q), err / q
    total, err = 0j, 0.0
    for a in range(1, q):
        if chi[a]:
            v, e = hurwitz_zeta(s, a / q)
            total += chi[a] * v
            err += e
    scale = math.exp(-s.real * math.log(q))
    phase = complex(math.cos(-s.imag * math.log(q)), math.sin(-s.imag * math.log(q)))
    return total * scale * phase, err * scale


def log_gamma(z: complex) -> complex:
    return complex(loggamma(complex(z)))


def beta(x: complex, y: complex) -> complex:
    return complex(np.exp(loggamma(complex(x)) + loggamma(complex(y)) - loggamma(complex(x) + complex(y))))
