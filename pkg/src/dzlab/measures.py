"""The discrete measures m_q(f), their limit m(f), error curves and exponent fits.

m_q(f) = q * sum_m S_phi(m) f(sqrt(q) m), where S_phi(m) is the sum of phi_K
over ideals of norm m, and m(f) = kappa / zeta_K(2) * int_0^inf f(t) t dt.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, InsufficientData, TableTooSmall
from .fields import FieldInvariants
from .sieve import CoeffTable, SieveTables, TableKind


class FunctionKind(str, Enum):
    INDICATOR = "indicator"
    POLYBUMP = "polybump"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class TestFunction:
    """Indicator of [a, b], F_r(t) = (1 - t)^r on (0, 1], or exp(-1/((t-a)(b-t))) on (a, b).

    ``scale`` is lambda in f_lambda(t) = f(lambda t).
    """

    __test__ = False  # not a pytest class

    kind: FunctionKind
    a: float = 0.0
    b: float = 1.0
    r: int = 0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigError("scale must be positive")
        if self.kind is FunctionKind.POLYBUMP:
            if self.r < 1:
                raise ConfigError("PolyBump needs r >= 1")
        elif self.kind is FunctionKind.INDICATOR:
            # a = 0 stands for the half-open (0, b]
            if not 0 <= self.a < self.b:
                raise ConfigError(f"Indicator needs 0 <= a < b, got ({self.a}, {self.b})")
        elif not 0 < self.a < self.b:
            raise ConfigError(f"SmoothBump needs 0 < a < b, got ({self.a}, {self.b})")

    @classmethod
    def indicator(cls, a: float, b: float) -> "TestFunction":
        return cls(FunctionKind.INDICATOR, float(a), float(b))

    @classmethod
    def polybump(cls, r: int) -> "TestFunction":
        return cls(FunctionKind.POLYBUMP, 0.0, 1.0, int(r))

    @classmethod
    def smooth(cls, a: float, b: float) -> "TestFunction":
        return cls(FunctionKind.SMOOTH, float(a), float(b))

    def dilate(self, lam: float) -> "TestFunction":
        """t -> f(lam t) composed with the current scale."""
        return TestFunction(self.kind, self.a, self.b, self.r, self.scale * lam)

    @property
    def smoothness_l(self) -> float | None:
        if self.kind is FunctionKind.INDICATOR:
            return None
        if self.kind is FunctionKind.POLYBUMP:
            return self.r - 1
        return math.inf

    @property
    def support_lo(self) -> float:
        return self.a / self.scale

    @property
    def support_hi(self) -> float:
        return self.b / self.scale

    def eval(self, t):
        u = self.scale * np.asarray(t, dtype=np.float64)
        if self.kind is FunctionKind.INDICATOR:
            lo = (u > 0) if self.a == 0 else (u >= self.a)
            return (lo & (u <= self.b)).astype(np.float64)
        if self.kind is FunctionKind.POLYBUMP:
            inside = (u > 0) & (u <= 1)
            return np.where(inside, (1 - np.where(inside, u, 0.0)) ** self.r, 0.0)
        inside = (u > self.a) & (u < self.b)
        w = np.where(inside, u, 0.5 * (self.a + self.b))
        return np.where(inside, np.exp(-1 / ((w - self.a) * (self.b - w))), 0.0)

    def __call__(self, t):
        return self.eval(t)

    @property
    def spec(self) -> str:
        if self.kind is FunctionKind.POLYBUMP:
            body = f"polybump:{self.r}"
        else:
            body = f"{self.kind.value}:{self.a:g},{self.b:g}"
        return body if self.scale == 1 else f"{body}@{self.scale:g}"

    def __str__(self) -> str:
        return self.spec


_F_RE = re.compile(r"^(indicator|smooth):([0-9.eE+-]+),([0-9.eE+-]+)$|^polybump:(\d+)$")


def parse_function_spec(spec: str) -> TestFunction:
    """``indicator:1,2``, ``polybump:2`` or ``smooth:1,2``."""
    m = _F_RE.match(spec)
    if not m:
        raise ConfigError(f"malformed function spec {spec!r}")
    if m.group(4):
        return TestFunction.polybump(int(m.group(4)))
    try:
        a, b = float(m.group(2)), float(m.group(3))
    except ValueError:
        raise ConfigError(f"malformed function spec {spec!r}") from None
    if m.group(1) == "indicator":
        return TestFunction.indicator(a, b)
    return TestFunction.smooth(a, b)


@dataclass(frozen=True)
class LinearCombination:
    """sum_i c_i f_i, usable wherever a TestFunction is evaluated pointwise."""

    terms: tuple[tuple[float, TestFunction], ...] = field(default_factory=tuple)

    def eval(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        for c, f in self.terms:
            out = out + c * f.eval(t)
        return out

    @property
    def support_hi(self) -> float:
        return max(f.support_hi for _, f in self.terms)


# --------------------------------------------------------------------------
# Limit measure
# --------------------------------------------------------------------------

def _smooth_moment(f: TestFunction, s: complex) -> complex:
    """int f(t) t^(2s-1) dt for the smooth bump, in v = log t with oscillatory weights."""
    lo, hi = math.log(f.support_lo), math.log(f.support_hi)
    sigma, tau = complex(s).real, complex(s).imag

    def g(v):
        return float(f.eval(math.exp(v))) * math.exp(2 * sigma * v)

    opts = dict(epsabs=1e-15, epsrel=1e-12, limit=1000)
    if tau == 0:
        return complex(quad(g, lo, hi, **opts)[0], 0.0)
    re_part = quad(g, lo, hi, weight="cos", wvar=2 * tau, **opts)[0]
    im_part = quad(g, lo, hi, weight="sin", wvar=2 * tau, **opts)[0]
    return complex(re_part, im_part)


def moment_integral(f: TestFunction, s: complex) -> complex:
    """int_0^inf f(t) t^(2s-1) dt, for Re(s) > 0."""
    s = complex(s)
    lam_factor = complex(np.exp(-2 * s * math.log(f.scale)))
    if f.kind is FunctionKind.INDICATOR:
        z = 2 * s
        base = (f.b ** z - (f.a ** z if f.a > 0 else 0.0)) / z
    elif f.kind is FunctionKind.POLYBUMP:
        # Beta(r + 1, 2s) = r! / (2s (2s+1) ... (2s+r))
        base = complex(math.factorial(f.r))
        for k in range(f.r + 1):
            base /= 2 * s + k
    else:
        return _smooth_moment(f, s)
    return complex(base) * lam_factor


def m_limit(invariants: FieldInvariants, f) -> float:
    """kappa / zeta_K(2) * int f(t) t dt."""
    if isinstance(f, LinearCombination):
        return sum(c * m_limit(invariants, g) for c, g in f.terms)
    return invariants.density * moment_integral(f, 1).real


# --------------------------------------------------------------------------
# m_q
# --------------------------------------------------------------------------

def _totient_table(tables) -> CoeffTable:
    if isinstance(tables, SieveTables):
        return tables.totient_sum
    if tables.kind is not TableKind.TOTIENT_SUM:
        raise ValueError(f"need a TotientSum table, got {tables.kind.value}")
    return tables


def _last_norm(sq, hi: float, scale: float = 1.0):
    """Largest m with scale * (sq * m) <= hi, in the same float arithmetic as eval."""
    sq = np.asarray(sq, dtype=np.float64)
    m = np.floor(hi / (scale * sq))
    for _ in range(2):
        m = np.where(scale * (sq * (m + 1)) <= hi, m + 1, m)
        m = np.where(scale * (sq * m) > hi, m - 1, m)
    return m.astype(np.int64)


def required_X(f, q: float) -> int:
    """Largest norm m with f(sqrt(q) m) possibly nonzero."""
    return int(_last_norm(math.sqrt(q), f.support_hi))


def m_q(tables, f, q: float) -> float:
    """q * sum_m S_phi(m) f(sqrt(q) m) with exactly rounded summation."""
    if not q > 0:
        raise ValueError("q must be positive")
    table = _totient_table(tables)
    sq = math.sqrt(q)
    M = required_X(f, q)
    if M < 1:
        return 0.0
    if M > table.X:
        raise TableTooSmall(M, table.X)
    w = f.eval(sq * np.arange(1, M + 1, dtype=np.float64))
    nz = np.nonzero(w)[0]
    S = table.values[1 : M + 1][nz].astype(np.float64)
    return q * math.fsum(S * w[nz])


@lru_cache(maxsize=32)
def _moment_prefix(table: CoeffTable, k: int) -> np.ndarray:
    """float(sum_{m <= M} S_phi(m) m^k) for M = 0..X, from exact integer sums."""
    m = np.arange(table.X + 1, dtype=object)
    terms = table.values.astype(object) * m**k
    return np.cumsum(terms).astype(np.float64)


def m_q_batch(tables, f: TestFunction, qs) -> np.ndarray:
    """m_q(f) for many q at once.

    Indicator uses exact prefix sums (the same numbers the scalar route adds),
    PolyBump expands (1 - c m)^r in moments of S_phi, SmoothBump sums directly.
    """
    table = _totient_table(tables)
    qs = np.asarray(qs, dtype=np.float64)
    sq = np.sqrt(qs)
    M = _last_norm(sq, f.b, f.scale)
    if M.size and M.max() > table.X:
        raise TableTooSmall(int(M.max()), table.X)
    M = np.maximum(M, 0)
    if f.kind is FunctionKind.INDICATOR:
        prefix = table.prefix
        if f.a > 0:
            L = _last_norm(sq, f.a, f.scale)
            L = np.where(f.scale * (sq * np.maximum(L, 0)) >= f.a, L - 1, L)
            L = np.clip(L, 0, None)
        else:
            L = np.zeros_like(M)
        L = np.minimum(L, M)
        # exact Python-int differences, rounded once
        diff = np.array([int(prefix[hi]) - int(prefix[lo]) for lo, hi in zip(L.tolist(), M.tolist())],
                        dtype=np.float64)
        return qs * diff
    if f.kind is FunctionKind.POLYBUMP:
        c = f.scale * sq
        out = np.zeros_like(qs)
        for k in range(f.r + 1):
            out += math.comb(f.r, k) * (-c) ** k * _moment_prefix(table, k)[M]
        return qs * out
    out = np.empty_like(qs)
    for i, q in enumerate(qs):
        out[i] = m_q(table, f, float(q)) if M[i] >= 1 else 0.0
    return out


# --------------------------------------------------------------------------
# Error curves and exponents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSample:
    q: float
    m_q: float
    m_limit: float
    error: float

    @property
    def error_over_sqrt_q(self) -> float:
        return self.error / math.sqrt(self.q)


def geometric_grid(hi: float, lo: float, per_decade: int) -> np.ndarray:
    """hi, hi 10^(-1/k), ... down to lo; decreasing, endpoints included."""
    if not (hi > lo > 0 and per_decade >= 1):
        raise ConfigError("need hi > lo > 0 and per_decade >= 1")
    steps = round(math.log10(hi / lo) * per_decade)
    return 10.0 ** (math.log10(hi) - np.arange(steps + 1) / per_decade)


def error_curve(tables, invariants: FieldInvariants, f, q_grid) -> list[MeasureSample]:
    """E_f(q) = m_q(f) - m(f) on the grid, sorted by decreasing q."""
    table = _totient_table(tables)
    qs = sorted((float(q) for q in q_grid), reverse=True)
    need = max(required_X(f, q) for q in qs)
    if need > table.X:
        raise TableTooSmall(need, table.X)
    lim = m_limit(invariants, f)
    out = []
    for q in qs:
        v = m_q(table, f, q)
        out.append(MeasureSample(q, v, lim, v - lim))
    return out


@dataclass(frozen=True)
class ExponentFit:
    alpha_hat: float
    stderr: float
    q_range: tuple[float, float]
    n_points: int
    intercept: float = 0.0


def exponent_fit(samples, floor: float = 1e-13) -> ExponentFit:
    """Least-squares slope of log|E| against log q."""
    pts = [(s.q, abs(s.error)) for s in samples
           if s.error != 0 and abs(s.error) >= floor * abs(s.m_limit)]
    if len(pts) < 8:
        raise InsufficientData(f"{len(pts)} usable samples, need at least 8")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(x) - 2
    s2 = float(resid @ resid) / dof
    stderr = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
    qs = [p[0] for p in pts]
    return ExponentFit(float(coef[0]), stderr, (min(qs), max(qs)), len(pts), float(coef[1]))


@dataclass(frozen=True)
class ExponentScan:
    q: np.ndarray
    running_max: dict

    def growth(self, alpha: float, q_start: float, q_end: float) -> float:
        """running max at q_end over running max at q_start (q_end < q_start)."""
        rm = self.running_max[alpha]
        i0 = int(np.argmin(np.abs(np.log(self.q / q_start))))
        i1 = int(np.argmin(np.abs(np.log(self.q / q_end))))
        return float(rm[i1] / rm[i0]) if rm[i0] > 0 else math.inf


def critical_exponent_scan(samples, alphas) -> ExponentScan:
    """For each alpha, running max of q^-alpha |E(q)| as q decreases."""
    qs = np.array([s.q for s in samples])
    if np.any(np.diff(qs) > 0):
        raise ValueError("samples must be sorted by decreasing q")
    err = np.abs([s.error for s in samples])
    out = {}
    for alpha in alphas:
        out[alpha] = np.maximum.accumulate(qs ** (-alpha) * err)
    return ExponentScan(qs, out)
