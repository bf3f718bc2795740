"""Norm-indexed Dirichlet coefficient tables for zeta_K, 1/zeta_K and zeta_K(s-1)/zeta_K(s).

Every table is an Euler-product convolution sieve over prime-ideal norm
classes.  For a class of norm P the local factor is applied as an in-place
Dirichlet multiplication along multiples of P; geometric factors
1/(1 - c y) with y = x^P are applied as prod_j (1 + c^(2^j) y^(2^j)), so each
step reads old values only (numpy makes overlapping slice updates behave as
if the right-hand side were copied first).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import cached_property
from math import isqrt

import numpy as np

from .errors import OutOfRange, Overflow
from .fields import NumberField
from .splitting import PrimeIdealClassList, character_table, kronecker, prime_ideals_up_to

log = logging.getLogger(__name__)

DEFAULT_X = 10**6
WARN_X = 10**7
HARD_CAP_X = 10**8
_INT64_SAFE = 2**62
_INT128_MAX = 2**127 - 1


class TableKind(str, Enum):
    IDEAL_COUNT = "IdealCount"
    TOTIENT_SUM = "TotientSum"
    MOEBIUS_SUM = "MoebiusSum"


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """values[m] for m = 1..X (values[0] is always 0)."""

    field: NumberField
    X: int
    kind: TableKind
    values: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False

    def __getitem__(self, m):
        return self.values[m]

    @cached_property
    def prefix(self) -> np.ndarray:
        """prefix[x] = sum_{m <= x} values[m] (exact)."""
        if self.values.dtype == object:
            out = np.cumsum(self.values)
        else:
            # |prefix| <= X * max|values|
            bound = int(np.abs(self.values).max()) * (self.X + 1)
            out = np.cumsum(self.values.astype(object) if bound >= _INT64_SAFE else self.values)
        out.flags.writeable = False
        return out

    def summatory(self, x) -> int:
        xi = math.floor(x)
        if xi < 1 or xi > self.X:
            raise OutOfRange(f"x={x} outside [1, {self.X}]")
        return int(self.prefix[xi])

    def same_values(self, other: "CoeffTable") -> bool:
        return (
            self.kind == other.kind and self.X == other.X
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )


@dataclass(frozen=True, eq=False)
class SieveTables:
    field: NumberField
    X: int
    ideal_count: CoeffTable
    totient_sum: CoeffTable
    moebius_sum: CoeffTable
    primes: PrimeIdealClassList | None = dc_field(default=None)

    def table(self, kind: TableKind) -> CoeffTable:
        return {
            TableKind.IDEAL_COUNT: self.ideal_count,
            TableKind.TOTIENT_SUM: self.totient_sum,
            TableKind.MOEBIUS_SUM: self.moebius_sum,
        }[TableKind(kind)]


def _check_bound(X: int) -> None:
    if X < 1:
        raise OutOfRange("X must be >= 1")
    if X > HARD_CAP_X:
        raise OutOfRange(f"X={X} exceeds the hard cap {HARD_CAP_X}")
    if X > WARN_X:
        log.warning("X=%d above %d: expect several GB of memory", X, WARN_X)


def _apply_geometric(vals: np.ndarray, P: int, c: int, X: int) -> None:
    # multiply by 1/(1 - c*y), y = x^P, truncated at X
    step, w = P, c
    while step <= X:
        top = X // step
        if w == 1:
            vals[step::step] += vals[1 : top + 1]
        else:
            vals[step::step] += w * vals[1 : top + 1]
        if step > X // step:
            break
        step *= step
        w *= w


def _apply_one_minus(vals: np.ndarray, P: int, X: int) -> None:
    vals[P::P] -= vals[1 : X // P + 1]


def _apply_local(vals: np.ndarray, kind: TableKind, P: int, X: int) -> None:
    if kind is TableKind.IDEAL_COUNT:
        _apply_geometric(vals, P, 1, X)
    elif kind is TableKind.MOEBIUS_SUM:
        _apply_one_minus(vals, P, X)
    else:
        # sum_k (P^k - P^(k-1)) y^k = (1 - y) / (1 - P y)
        _apply_one_minus(vals, P, X)
        _apply_geometric(vals, P, P, X)


def _sieve(primes: PrimeIdealClassList, X: int, kind: TableKind, dtype) -> np.ndarray:
    vals = np.zeros(X + 1, dtype=dtype)
    vals[1] = 1
    order = np.argsort(primes.norm, kind="stable")
    norms = primes.norm[order]
    mults = primes.multiplicity[order]
    root = isqrt(X)
    small = norms <= root
    for P, m in zip(norms[small].tolist(), mults[small].tolist()):
        for _ in range(m):
            _apply_local(vals, kind, P, X)
    # Above sqrt(X) only the first power of a class fits below X, and the
    # update reads vals[k] for k <= sqrt(X), which is already final.
    big_n = norms[~small]
    if len(big_n):
        big_c = mults[~small] * (big_n - 1) if kind is TableKind.TOTIENT_SUM else mults[~small]
        if kind is TableKind.MOEBIUS_SUM:
            big_c = -big_c
        if dtype == object:
            big_c = big_c.astype(object)
        for k in range(1, X // int(big_n[0]) + 1):
            limit = np.searchsorted(big_n, X // k, side="right")
            if limit == 0 or vals[k] == 0:
                continue
            # classes with equal norm (several primes above p) are merged already
            vals[big_n[:limit] * k] += big_c[:limit] * vals[k]
    return vals


def _merge_equal_norms(primes: PrimeIdealClassList) -> PrimeIdealClassList:
    # Distinct rows can share a norm only for distinct p^f coincidences, which
    # cannot happen; merge anyway so the large-prime fast path stays exact.
    uniq, inv = np.unique(primes.norm, return_inverse=True)
    if len(uniq) == len(primes.norm):
        return primes
    mult = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(mult, inv, primes.multiplicity)
    p = np.zeros(len(uniq), dtype=np.int64)
    p[inv] = primes.p
    return PrimeIdealClassList(primes.X, p, uniq, mult)


def _fits_int128(vals: np.ndarray) -> bool:
    return max(abs(int(vals.max())), abs(int(vals.min()))) <= _INT128_MAX


def build_table(
    field: NumberField,
    X: int,
    kind: TableKind | str,
    primes: PrimeIdealClassList | None = None,
    skip_primes=(),
) -> CoeffTable:
    """Coefficient table of the requested kind for m = 1..X."""
    kind = TableKind(kind)
    X = int(X)
    _check_bound(X)
    if primes is None:
        primes = prime_ideals_up_to(field, X, skip_primes=skip_primes)
    primes = _merge_equal_norms(primes)
    dtype = np.int64
    if kind is TableKind.TOTIENT_SUM:
        # |intermediate| <= 2 m a_K(m); a_K(m) <= d(m)^n with d(m) < 2 m^(1/2)
        worst = 2 * X * (2 * isqrt(X) + 2) ** field.degree_n
        if worst >= _INT64_SAFE:
            counts = _sieve(primes, X, TableKind.IDEAL_COUNT, np.int64)
            worst = 4 * X * int(counts.max())
        if worst >= _INT64_SAFE:
            log.info("TotientSum at X=%d switched to wide integers", X)
            dtype = object
    vals = _sieve(primes, X, kind, dtype)
    if dtype == object and not _fits_int128(vals):
        raise Overflow(f"{kind.value} coefficients exceed 128 bits at X={X}")
    return CoeffTable(field, X, kind, vals)


def build_tables(field: NumberField, X: int = DEFAULT_X, skip_primes=()) -> SieveTables:
    X = int(X)
    _check_bound(X)
    primes = prime_ideals_up_to(field, X, skip_primes=skip_primes)
    return SieveTables(
        field,
        X,
        build_table(field, X, TableKind.IDEAL_COUNT, primes),
        build_table(field, X, TableKind.TOTIENT_SUM, primes),
        build_table(field, X, TableKind.MOEBIUS_SUM, primes),
        primes,
    )


def summatory(table: CoeffTable, x) -> int:
    return table.summatory(x)


# --------------------------------------------------------------------------
# Mertens report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SummatoryResult:
    x: float
    value: int
    main_term: float
    error: float
    normalized: float = math.nan  # error / x^(2 - 1/n)
    normalized_lindelof: float = math.nan  # error / x^(3/2)
    normalized_circle: float = math.nan  # error / x^(3/2 - 1/(2n))


def mertens_main_term(mertens_constant: float, x) -> float:
    return mertens_constant * float(x) ** 2


def mertens_report(tables: SieveTables | CoeffTable, invariants, xs) -> list[SummatoryResult]:
    """Phi_K(x) against kappa/(2 zeta_K(2)) x^2 at each x."""
    table = tables.totient_sum if isinstance(tables, SieveTables) else tables
    n = table.field.degree_n
    c = invariants.mertens_constant
    out = []
    for x in xs:
        value = table.summatory(x)
        main = mertens_main_term(c, x)
        err = float(value - main) if abs(value) < 2**53 else float(value) - main
        xf = float(x)
        out.append(SummatoryResult(
            xf, value, main, err,
            err / xf ** (2 - 1 / n),
            err / xf ** 1.5,
            err / xf ** (1.5 - 1 / (2 * n)),
        ))
    return out


def mertens_error_array(table: CoeffTable, mertens_constant: float, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """(x, Phi_K(x) - c x^2) for every integer x in [lo, hi]."""
    if lo < 1 or hi > table.X:
        raise OutOfRange(f"[{lo}, {hi}] not inside [1, {table.X}]")
    x = np.arange(lo, hi + 1, dtype=np.float64)
    phi = table.prefix[lo : hi + 1].astype(np.float64)
    return x, phi - mertens_constant * x * x


def normalized_error_decades(table: CoeffTable, mertens_constant: float, decades) -> list[float]:
    """max |E(x)| / x^(2-1/n) over each integer range [lo, hi] in ``decades``."""
    n = table.field.degree_n
    out = []
    for lo, hi in decades:
        x, err = mertens_error_array(table, mertens_constant, lo, hi)
        out.append(float(np.max(np.abs(err) / x ** (2 - 1 / n))))
    return out


# --------------------------------------------------------------------------
# Independent oracles
# --------------------------------------------------------------------------

def oracle_quadratic_count(D: int, m: int) -> int:
    """a_K(m) = sum_{d | m} chi_D(d), by trial division."""
    if m < 1:
        raise ValueError("m must be >= 1")
    total = 0
    d = 1
    while d * d <= m:
        if m % d == 0:
            total += kronecker(D, d)
            if d * d != m:
                total += kronecker(D, m // d)
        d += 1
    return total


def oracle_quadratic_counts(D: int, X: int) -> np.ndarray:
    """Vector form of :func:`oracle_quadratic_count` for m = 0..X (divisor-sum sieve)."""
    chi = character_table(D)
    out = np.zeros(X + 1, dtype=np.int64)
    for d in range(1, X + 1):
        c = chi[d % abs(D)]
        if c:
            out[d::d] += c
    return out


def oracle_gaussian_count(x) -> int:
    """Number of ideals of Z[i] with norm <= x: nonzero lattice points in the disc / 4."""
    xi = math.floor(x)
    if xi < 1:
        return 0
    r = isqrt(xi)
    total = 0
    for a in range(-r, r + 1):
        total += 2 * isqrt(xi - a * a) + 1
    return (total - 1) // 4


def oracle_gaussian_counts(X: int) -> np.ndarray:
    """oracle_gaussian_count(x) for every integer x = 0..X."""
    r = isqrt(X)
    a = np.arange(-r, r + 1)
    norms = (a[:, None] ** 2 + a[None, :] ** 2).ravel()
    norms = norms[(norms > 0) & (norms <= X)]
    hist = np.bincount(norms, minlength=X + 1)
    return np.cumsum(hist) // 4


def dirichlet_convolve(f: np.ndarray, g: np.ndarray, X: int) -> np.ndarray:
    """(f * g)(m) = sum_{d | m} f(d) g(m/d) for m = 1..X; index 0 unused."""
    out = np.zeros(X + 1, dtype=np.result_type(f.dtype, g.dtype))
    for d in range(1, X + 1):
        fd = f[d]
        if fd:
            out[d::d] += fd * g[1 : X // d + 1]
    return out
