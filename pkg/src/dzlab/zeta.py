"""Dedekind zeta values, the residue kappa, zeta_K(2), phi_K and growth probes.

Two evaluation routes:

* the Dirichlet series over a sieved IdealCount table (any field, Re s > 1),
  with the tail past X replaced by its main term and the remainder bounded
  through the observed size of N(x) - kappa x;
* analytic continuation for quadratic fields (and Q) through
  zeta_K(s) = zeta(s) L(s, chi_D), valid for every s != 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import special
from .errors import CapabilityError, DivisionNearZero, DomainError, PoleAt1, PoleProximity
from .fields import FieldInvariants, FieldKind, KappaMethod, NumberField
from .sieve import CoeffTable, SieveTables, TableKind
from .splitting import PrimeIdealClassList, character_table, prime_ideals_up_to

SERIES_MIN_SIGMA = 1.01
POLE_TOL = 1e-9


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float
    abs_err: float

    def __post_init__(self):
        if not (math.isfinite(self.abs_err) and self.abs_err >= 0):
            raise ValueError(f"abs_err must be finite and >= 0, got {self.abs_err}")

    @classmethod
    def of(cls, z: complex, err: float) -> "ComplexValue":
        z = complex(z)
        return cls(z.real, z.imag, float(err))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.value

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class KappaEstimate:
    value: float
    method: KappaMethod
    error_bar: float


def _has_continuation(field: NumberField) -> bool:
    return field.kind in (FieldKind.RATIONAL, FieldKind.QUADRATIC)


def _ideal_table(tables) -> CoeffTable:
    if isinstance(tables, SieveTables):
        return tables.ideal_count
    if tables.kind is not TableKind.IDEAL_COUNT:
        raise ValueError(f"need an IdealCount table, got {tables.kind.value}")
    return tables


# --------------------------------------------------------------------------
# Continuation route (quadratic fields and Q)
# --------------------------------------------------------------------------

def zeta_K_quadratic(field: NumberField, s: complex) -> ComplexValue:
    """zeta_K(s) = zeta(s) L(s, chi_D) for s != 1 (zeta(s) itself for Q)."""
    if not _has_continuation(field):
        raise CapabilityError(f"no continuation for {field.spec}; use zeta_K_series with Re(s) > 1")
    s = complex(s)
    if abs(s - 1) < POLE_TOL:
        raise PoleAt1(f"|s - 1| = {abs(s - 1):.3g} < {POLE_TOL}")
    z, ez = special.riemann_zeta(s)
    if field.kind is FieldKind.RATIONAL:
        return ComplexValue.of(z, ez)
    L, eL = special.dirichlet_L(character_table(field.discriminant_D), s)
    return ComplexValue.of(z * L, abs(z) * eL + abs(L) * ez + ez * eL)


def dirichlet_L_value(field: NumberField, s: complex) -> ComplexValue:
    if field.kind is not FieldKind.QUADRATIC:
        raise CapabilityError("L(s, chi_D) needs a quadratic field")
    v, e = special.dirichlet_L(character_table(field.discriminant_D), s)
    return ComplexValue.of(v, e)


# --------------------------------------------------------------------------
# Series route
# --------------------------------------------------------------------------

def _remainder_constant(table: CoeffTable, kappa: float) -> float:
    """max |N(x) - kappa x| / x^theta over integers x in [X/10, X], theta = 1 - 1/n."""
    X = table.X
    lo = max(1, X // 10)
    x = np.arange(lo, X + 1, dtype=np.float64)
    N = table.prefix[lo : X + 1].astype(np.float64)
    theta = 1 - 1 / table.field.degree_n
    # floor(x) - x for Q is bounded by 1 but vanishes on integers; count it.
    return float(np.max(np.abs(N - kappa * x) / x ** theta)) + 1.0


def zeta_K_series(field: NumberField, s: complex, table, kappa: float | None = None,
                  kappa_error: float | None = None) -> ComplexValue:
    """sum_{m <= X} a_K(m) m^-s plus the kappa-main term of the tail.

    abs_err bounds |s| int_X^inf |N(x) - kappa x| x^(-sigma-1) dx using the
    largest |N(x) - kappa x| / x^(1-1/n) seen on [X/10, X], plus the effect of
    the uncertainty in kappa.  Heuristic, like every error bar here.
    """
    table = _ideal_table(table)
    s = complex(s)
    sigma = s.real
    if sigma <= SERIES_MIN_SIGMA:
        hint = " use zeta_K_quadratic" if _has_continuation(field) else ""
        raise DomainError(f"Re(s) = {sigma} <= {SERIES_MIN_SIGMA}: series tail bound is useless;{hint}")
    if kappa is None:
        est = residue_kappa(field, table)
        kappa, kappa_error = est.value, est.error_bar
    kappa_error = kappa_error or 0.0
    X = table.X
    m = np.arange(1, X + 1, dtype=np.float64)
    a = table.values[1:].astype(np.float64)
    nz = a != 0
    terms = a[nz] * np.exp(-s * np.log(m[nz]))
    partial = complex(terms.sum())
    NX = float(table.prefix[X])
    Xs = complex(np.exp(-s * math.log(X)))  # X^-s
    tail = s * kappa * X * Xs / (s - 1) - NX * Xs
    theta = 1 - 1 / field.degree_n
    C = _remainder_constant(table, kappa)
    err = abs(s) * C * X ** (theta - sigma) / (sigma - theta)
    err += abs(s) * kappa_error * X ** (1 - sigma) / abs(s - 1)
    err += 1e-16 * float(np.abs(terms).sum())
    return ComplexValue.of(partial + tail, err)


def _log1m(z: np.ndarray) -> np.ndarray:
    """log(1 - z) for |z| < 1, accurate for tiny z."""
    out = np.log(1 - z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = -(zs + zs**2 / 2 + zs**3 / 3 + zs**4 / 4)
    return out


def euler_product(field: NumberField, s: complex, primes: PrimeIdealClassList | None = None,
                  X: int | None = None) -> ComplexValue:
    """prod over prime ideals of norm <= X of (1 - N(p)^-s)^-1, for Re s > 1."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError("Euler product needs Re(s) > 1")
    if primes is None:
        primes = prime_ideals_up_to(field, X)
    X = primes.X
    norm = primes.norm.astype(np.float64)
    z = np.exp(-s * np.log(norm))
    logv = -np.sum(primes.multiplicity * _log1m(z))
    value = complex(np.exp(logv))
    # Prime ideals of norm > X: at most n per rational prime, sum p^-sigma over p > X.
    sigma = s.real
    bound = 1.02 * field.degree_n * X ** (1 - sigma) / ((sigma - 1) * math.log(X))
    return ComplexValue.of(value, abs(value) * math.expm1(bound) + 1e-15 * abs(value))


def zeta_K(field: NumberField, s: complex, table=None) -> ComplexValue:
    """Best available route: continuation when the field has one, else the series."""
    if _has_continuation(field):
        return zeta_K_quadratic(field, s)
    if table is None:
        raise CapabilityError(f"{field.spec} needs a sieved IdealCount table for zeta_K")
    return zeta_K_series(field, s, table)


# --------------------------------------------------------------------------
# Residue, zeta_K(2), invariants
# --------------------------------------------------------------------------

def kappa_regression(table, lo_frac: float = 0.1) -> KappaEstimate:
    """Least-squares slope of N(x) against x over integer x in [lo_frac X, X].

    For a uniform design the slope moves by at most 3 R / L for residuals
    bounded by R on an interval of length L; the bar doubles that.
    """
    table = _ideal_table(table)
    X = table.X
    lo = max(1, int(X * lo_frac))
    x = np.arange(lo, X + 1, dtype=np.float64)
    N = table.prefix[lo : X + 1].astype(np.float64)
    xm = x.mean()
    dx = x - xm
    slope = float(np.dot(dx, N - N.mean()) / np.dot(dx, dx))
    resid = N - N.mean() - slope * dx
    L = float(X - lo) or 1.0
    return KappaEstimate(slope, KappaMethod.REGRESSION, 6.0 * float(np.max(np.abs(resid))) / L)


def residue_kappa(field: NumberField, table=None) -> KappaEstimate:
    if field.kind is FieldKind.RATIONAL:
        return KappaEstimate(1.0, KappaMethod.EXACT, 0.0)
    if field.kind is FieldKind.QUADRATIC:
        v = dirichlet_L_value(field, 1)
        return KappaEstimate(v.re, KappaMethod.CHARACTER_SERIES, v.abs_err)
    if table is None:
        raise CapabilityError(f"{field.spec}: kappa needs a sieved IdealCount table")
    return kappa_regression(table)


def compute_invariants(field: NumberField, tables=None) -> FieldInvariants:
    k = residue_kappa(field, tables)
    if _has_continuation(field):
        z2 = zeta_K_quadratic(field, 2)
    else:
        z2 = zeta_K_series(field, 2, tables, k.value, k.error_bar)
    return FieldInvariants.from_values(k.value, k.method, k.error_bar, z2.re, z2.abs_err)


def phi_ratio(field: NumberField, s: complex, table=None, route: str | None = None) -> ComplexValue:
    """zeta_K(2s-1) / zeta_K(2s).

    route "continuation" (quadratic fields and Q) or "series" (needs an
    IdealCount table and Re(2s-1) > 1.01); the default prefers continuation.
    """
    s = complex(s)
    if route is None:
        route = "continuation" if _has_continuation(field) else "series"
    if route == "continuation":
        num = zeta_K_quadratic(field, 2 * s - 1)
        den = zeta_K_quadratic(field, 2 * s)
    elif route == "series":
        if table is None:
            raise CapabilityError("series route needs an IdealCount table")
        k = residue_kappa(field, table)
        num = zeta_K_series(field, 2 * s - 1, table, k.value, k.error_bar)
        den = zeta_K_series(field, 2 * s, table, k.value, k.error_bar)
    else:
        raise ValueError(f"unknown route {route!r}")
    if abs(den) < 10 * den.abs_err:
        raise DivisionNearZero(f"|zeta_K(2s)| = {abs(den):.3g} at s = {s}, error {den.abs_err:.3g}")
    r = num.value / den.value
    err = abs(r) * (num.abs_err / max(abs(num), 1e-300) + den.abs_err / abs(den))
    return ComplexValue.of(r, err)


# --------------------------------------------------------------------------
# Completed zeta and the functional equation
# --------------------------------------------------------------------------

def log_gamma_factor(field: NumberField, s: complex) -> complex:
    """log Lambda(s) = log(2^(-r2 s) |D|^(s/2) pi^(-n s/2) Gamma(s/2)^r1 Gamma(s)^r2)."""
    s = complex(s)
    r1, r2 = field.signature
    n = field.degree_n
    out = -r2 * s * math.log(2) + 0.5 * s * math.log(abs(field.discriminant_D)) - 0.5 * n * s * math.log(math.pi)
    if r1:
        out += r1 * special.log_gamma(s / 2)
    if r2:
        out += r2 * special.log_gamma(s)
    return out


def completed_zeta(field: NumberField, s: complex) -> ComplexValue:
    """xi_K(s) = Lambda(s) zeta_K(s)."""
    z = zeta_K_quadratic(field, s)
    lam = complex(np.exp(log_gamma_factor(field, s)))
    return ComplexValue.of(lam * z.value, abs(lam) * z.abs_err)


def functional_equation_check(field: NumberField, s: complex) -> float:
    """|xi_K(s) - xi_K(1-s)| / max(|xi_K(s)|, |xi_K(1-s)|)."""
    s = complex(s)
    if min(abs(s), abs(s - 1)) < 1e-3:
        raise PoleProximity(f"s = {s} within 1e-3 of a pole of xi_K")
    a = completed_zeta(field, s).value
    b = completed_zeta(field, 1 - s).value
    return abs(a - b) / max(abs(a), abs(b))


# --------------------------------------------------------------------------
# Phragmen-Lindelof growth probe
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LindelofFit:
    sigma: float
    nu_hat: float
    intercept: float
    T: float
    samples: int
    tau: float


def quantile_regression(x: np.ndarray, y: np.ndarray, tau: float) -> tuple[float, float]:
    """(intercept, slope) minimizing the tau-quantile check loss, as a linear program."""
    n = len(x)
    # variables: b0, b1 (free), u >= 0, v >= 0 with b0 + b1 x + u - v = y
    c = np.concatenate([[0.0, 0.0], np.full(n, tau), np.full(n, 1 - tau)])
    eye = sparse.identity(n, format="csr")
    A = sparse.hstack([sparse.csr_matrix(np.column_stack([np.ones(n), x])), eye, -eye], format="csr")
    bounds = [(None, None), (None, None)] + [(0, None)] * (2 * n)
    res = linprog(c, A_eq=A, b_eq=y, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"quantile regression failed: {res.message}")
    return float(res.x[0]), float(res.x[1])


def probe_heights(T: float, samples: int) -> np.ndarray:
    """Deterministic log-uniform heights in [2, T]."""
    return np.exp(np.linspace(math.log(2.0), math.log(T), samples))


def lindelof_probe(field: NumberField, sigma: float, T: float = 1e4, samples: int = 1500,
                   tau: float = 0.95) -> LindelofFit:
    """Upper-quantile slope of log|zeta_K(sigma + it)| against log t over t in [2, T]."""
    if not _has_continuation(field):
        raise CapabilityError("lindelof_probe needs a quadratic field (or Q)")
    if T > 1e4:
        raise DomainError("T is capped at 1e4")
    t = probe_heights(T, samples)
    y = np.array([math.log(abs(zeta_K_quadratic(field, complex(sigma, ti)))) for ti in t])
    b0, b1 = quantile_regression(np.log(t), y, tau)
    return LindelofFit(float(sigma), b1, b0, float(T), samples, tau)


@dataclass(frozen=True)
class LindelofReport:
    fits: tuple[LindelofFit, ...]
    nonnegative: bool
    monotone: bool
    convexity_defect: float
    tolerance: float

    @property
    def sigmas(self) -> list[float]:
        return [f.sigma for f in self.fits]

    @property
    def nu_hats(self) -> list[float]:
        return [f.nu_hat for f in self.fits]


def lindelof_grid(field: NumberField, sigmas, T: float = 1e4, samples: int = 1500,
                  tol: float = 0.05) -> LindelofReport:
    fits = tuple(lindelof_probe(field, s, T, samples) for s in sorted(sigmas))
    nu = np.array([f.nu_hat for f in fits])
    sg = np.array([f.sigma for f in fits])
    monotone = bool(np.all(np.diff(nu) <= tol))
    nonneg = bool(np.all(nu >= -tol))
    defect = 0.0
    for i in range(1, len(fits) - 1):
        w = (sg[i] - sg[i - 1]) / (sg[i + 1] - sg[i - 1])
        chord = (1 - w) * nu[i - 1] + w * nu[i + 1]
        defect = max(defect, float(nu[i] - chord))
    return LindelofReport(fits, nonneg, monotone, defect, tol)
