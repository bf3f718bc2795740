"""Mellin transform of q -> m_q(f) / q: numeric quadrature, closed form, decay, inversion.

M_f(s) = int_0^inf m_q(f) q^(s-2) dq
       = 2 zeta_K(2s-1) / zeta_K(2s) * int_0^inf f(t) t^(2s-1) dt.

The numeric route integrates the sieved m_q(f) over q; the closed route uses
the zeta ratio and the kernel integral.  They share no code beyond f itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import special
from .errors import DivisionNearZero, DomainError, TailTooLarge, TableTooSmall
from .fields import FieldInvariants, FieldKind, NumberField
from .measures import FunctionKind, TestFunction, m_limit, m_q, m_q_batch, moment_integral, _totient_table
from .zeta import ComplexValue, completed_zeta, phi_ratio

NUMERIC_MIN_SIGMA = 1.1
# Without a vectorized m_q route the smallest q is capped by this many norms.
DIRECT_SUM_NORMS = 20000


class MellinMethod(str, Enum):
    NUMERIC = "NumericIntegral"
    CLOSED = "ClosedForm"


@dataclass(frozen=True)
class MellinPoint:
    s: complex
    value: ComplexValue
    method: MellinMethod

    def __post_init__(self):
        if complex(self.s).real <= 1 and self.method is not MellinMethod.CLOSED:
            raise DomainError("the defining integral diverges for Re(s) <= 1; only the closed form applies")


def kernel_integral(f: TestFunction, s: complex) -> complex:
    """int_0^inf f(t) t^(2s-1) dt."""
    return moment_integral(f, s)


def beta_identity_defect(r: int, s: complex) -> float:
    """|B(r+1, 2s) (2s)(2s+1)...(2s+r) - r!| / r!, with B from log-gamma."""
    z = 2 * complex(s)
    prod = 1 + 0j
    for k in range(r + 1):
        prod *= z + k
    fact = math.factorial(r)
    return abs(special.beta(r + 1, z) * prod - fact) / fact


def mellin_closed(field: NumberField, f: TestFunction, s: complex, tables=None) -> MellinPoint:
    """2 phi_K(s) int f(t) t^(2s-1) dt."""
    s = complex(s)
    ratio = phi_ratio(field, s, _ideal_table_or_none(tables))
    I = kernel_integral(f, s)
    v = 2 * ratio.value * I
    return MellinPoint(s, ComplexValue.of(v, 2 * abs(I) * ratio.abs_err + 1e-14 * abs(v)), MellinMethod.CLOSED)


def _ideal_table_or_none(tables):
    if tables is None:
        return None
    return getattr(tables, "ideal_count", tables)


def _breakpoints(f: TestFunction, max_norm: int) -> np.ndarray:
    """q where some term f(sqrt(q) m) switches on, off, or loses smoothness."""
    m = np.arange(1, max_norm + 1, dtype=np.float64)
    if f.kind is FunctionKind.INDICATOR:
        pts = [(f.support_hi / m) ** 2]
        if f.a > 0:
            pts.append((f.support_lo / m) ** 2)
        return np.concatenate(pts)
    if f.kind is FunctionKind.POLYBUMP:
        return (f.support_hi / m) ** 2
    return np.zeros(0)


def _gauss_panels(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * x[None, :]
    return nodes.ravel(), (half * w[None, :]).ravel()


def mellin_numeric(tables, invariants: FieldInvariants, f: TestFunction, s: complex,
                   h: float = 0.02, nodes: int = 8, break_norms: int = 20000) -> MellinPoint:
    """int_0^(T*) m_q(f) q^(s-2) dq by Gauss-Legendre panels in u = log q.

    Panels are cut at every q where a term of m_q(f) switches on or off (for
    norms up to ``break_norms``) and are at most ``h`` wide.  Below the
    smallest q the table supports, m_q(f) is replaced by m(f); the error of
    that head is estimated from |m_q(f) - m(f)| at the cut.
    """
    s = complex(s)
    if s.real < NUMERIC_MIN_SIGMA:
        raise DomainError(f"Re(s) = {s.real} < {NUMERIC_MIN_SIGMA}: use mellin_closed")
    table = _totient_table(tables)
    hi = f.support_hi
    vectorized = f.kind in (FunctionKind.INDICATOR, FunctionKind.POLYBUMP)
    cap = table.X if vectorized else min(table.X, DIRECT_SUM_NORMS)
    if cap < 1:
        raise TableTooSmall(1, table.X)
    q0 = (hi / cap) ** 2 * (1 + 1e-12)
    q_top = hi * hi
    u0, u1 = math.log(q0), math.log(q_top)
    bp = _breakpoints(f, min(cap, break_norms))
    bp = np.log(bp[(bp > q0) & (bp < q_top)])
    uniform = np.linspace(u0, u1, max(2, int(math.ceil((u1 - u0) / h)) + 1))
    edges = np.unique(np.concatenate([uniform, bp]))

    def rule(n):
        u, w = _gauss_panels(edges, n)
        q = np.exp(u)
        vals = m_q_batch(table, f, q)
        return complex(np.sum(w * vals * np.exp((s - 1) * u)))

    body = rule(nodes)
    quad_err = abs(body - rule(max(2, nodes // 2 + 1)))
    lim = m_limit(invariants, f)
    q0s = complex(np.exp((s - 1) * u0))
    head = lim * q0s / (s - 1)
    e0 = abs(m_q(table, f, q0) - lim)
    head_err = e0 * abs(q0s) / (s.real - 1)
    return MellinPoint(s, ComplexValue.of(body + head, quad_err + head_err), MellinMethod.NUMERIC)


def residue_limit(field: NumberField, f: TestFunction, offsets=(1e-2, 1e-3, 1e-4), tables=None):
    """Richardson extrapolation of (s-1) M_f(s) as s -> 1+ along the reals.

    Returns (extrapolated limit, list of raw products).
    """
    eps = np.array(offsets, dtype=np.float64)
    g = np.array([e * mellin_closed(field, f, 1 + e, tables).value.value.real for e in eps])
    # polynomial through (eps_i, g_i) evaluated at 0 (Neville)
    p = g.copy()
    n = len(eps)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (eps[i + k] * p[i] - eps[i] * p[i + 1]) / (eps[i + k] - eps[i])
    return float(p[0]), g.tolist()


def completed_transform(field: NumberField, f: TestFunction, s: complex) -> complex:
    """xi_K(2s-1) int f(t) t^(2s-1) dt (no leading 2)."""
    s = complex(s)
    return completed_zeta(field, 2 * s - 1).value * kernel_integral(f, s)


def completed_symmetry_defect(field: NumberField, s: complex) -> float:
    """Relative defect of xi_K(2s-1) under s -> 3/2 - s, the reflection it actually obeys."""
    s = complex(s)
    a = completed_zeta(field, 2 * s - 1).value
    b = completed_zeta(field, 2 * (1.5 - s) - 1).value
    return abs(a - b) / max(abs(a), abs(b))


@dataclass(frozen=True)
class DecayProfile:
    sigma: float
    t: np.ndarray
    values: np.ndarray
    slope: float
    intercept: float
    skipped: tuple[float, ...]


def decay_profile(field: NumberField, f: TestFunction, sigma: float, t_grid=None) -> DecayProfile:
    """|M_f(sigma + it)| on a t-grid and the least-squares slope of log|M| against log t."""
    if field.kind not in (FieldKind.QUADRATIC, FieldKind.RATIONAL):
        raise DomainError("decay_profile uses the continuation route (quadratic fields or Q)")
    if not 0.6 <= sigma <= 2:
        raise DomainError("sigma must lie in [0.6, 2]")
    if t_grid is None:
        t_grid = np.exp(np.linspace(math.log(2), math.log(100), 60))
    ts, vals, skipped = [], [], []
    for t in t_grid:
        if t <= 0:
            raise DomainError("t-grid must be positive")
        try:
            v = abs(mellin_closed(field, f, complex(sigma, t)).value)
        except DivisionNearZero:
            skipped.append(float(t))
            continue
        ts.append(float(t))
        vals.append(v)
    ts, vals = np.array(ts), np.array(vals)
    slope, intercept = np.polyfit(np.log(ts), np.log(vals), 1)
    return DecayProfile(float(sigma), ts, vals, float(slope), float(intercept), tuple(skipped))


def mellin_inverse(func, q: float, b: float, t_max: float, h: float | None = None) -> float:
    """(1/2 pi i) int_{b - i t_max}^{b + i t_max} func(s) q^(1-s) ds for func with conjugate symmetry.

    Trapezoid in t on [0, t_max]; the negative half is the complex conjugate.
    """
    lq = math.log(q)
    if h is None:
        h = min(0.05, 0.2 / (abs(lq) + 1))
    n = int(math.ceil(t_max / h))
    t = np.linspace(0.0, t_max, n + 1)
    vals = np.array([func(complex(b, ti)) for ti in t])
    integrand = (vals * np.exp((1 - b - 1j * t) * lq)).real
    return float(np.trapezoid(integrand, t) / math.pi)


@dataclass(frozen=True)
class InversionResult:
    q: float
    reconstructed: float
    direct: float
    defect: float
    tail_estimate: float
    t_max: float


def inversion_check(tables, invariants: FieldInvariants, field: NumberField, f: TestFunction, q: float,
                    b: float = 1.5, t_max: float = 200.0, tol: float | None = None) -> InversionResult:
    """Rebuild m_q(f) from M_f on Re(s) = b truncated at |t| <= t_max and compare with the direct sum."""
    if not 1.1 < b <= 2:
        raise DomainError("b must lie in (1.1, 2]")
    if q > f.support_hi ** 2:
        return InversionResult(q, 0.0, 0.0, 0.0, 0.0, t_max)
    direct = m_q(tables, f, q)
    tail_grid = np.exp(np.linspace(math.log(t_max / 4), math.log(t_max), 12))
    prof = decay_profile(field, f, b, tail_grid)
    if prof.slope >= -1:
        raise TailTooLarge(f"|M_f| decays like t^{prof.slope:.2f}; the truncated integral does not converge")
    tail = float(prof.values[-1]) * t_max / (-prof.slope - 1) * q ** (1 - b) / math.pi
    if tol is not None and tail > tol:
        raise TailTooLarge(f"estimated tail {tail:.3g} exceeds tolerance {tol:.3g}")
    fs = f.support_hi
    lq = abs(math.log(q)) + 2 * abs(math.log(fs)) + 2 * abs(math.log(max(f.support_lo, 1e-300))) * (f.support_lo > 0)
    h = min(0.05, 0.2 / (lq + 1))
    rec = mellin_inverse(lambda s: mellin_closed(field, f, s, tables).value.value, q, b, t_max, h)
    return InversionResult(q, rec, direct, abs(rec - direct), tail, t_max)
