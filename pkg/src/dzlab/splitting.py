"""Splitting of rational primes in O_K and enumeration of prime-ideal norms."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from . import polynomials as P
from .errors import IndexDivisor
from .fields import FieldKind, NumberField


def kronecker(D: int, m: int) -> int:
    """Kronecker symbol (D/m) for m >= 1."""
    if m <= 0:
        raise ValueError("m must be positive")
    result = 1
    a = D
    while m % 2 == 0:
        m //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/m), m odd
    a %= m
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


@lru_cache(maxsize=64)
def character_table(D: int) -> np.ndarray:
    """chi_D(r) for r = 0 .. |D|-1; chi_D(m) = table[m % |D|] for m >= 1."""
    q = abs(D)
    return np.array([kronecker(D, r) if r else (1 if q == 1 else 0) for r in range(q)], dtype=np.int64)


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, isqrt(n) + 1))


@dataclass(frozen=True)
class PrimeSplit:
    p: int
    entries: tuple[tuple[int, int, int], ...]  # (f, e, count), sorted

    def sum_ef(self) -> int:
        return sum(f * e * c for f, e, c in self.entries)

    def norms(self) -> list[tuple[int, int]]:
        """(norm p^f, number of distinct primes with that norm)."""
        acc = Counter()
        for f, _, c in self.entries:
            acc[self.p ** f] += c
        return sorted(acc.items())


def _entries(pairs) -> tuple[tuple[int, int, int], ...]:
    return tuple(sorted((f, e, c) for (f, e), c in Counter(pairs).items()))


def _dedekind_split(poly_low: list[int], p: int) -> PrimeSplit:
    """Split p via the factorization of the defining polynomial mod p.

    Raises IndexDivisor when the Dedekind criterion shows p | [O_K : Z[theta]].
    """
    parts = P.fp_squarefree_decomposition(poly_low, p)
    pairs = []
    for g, e in parts:
        for k, gk in P.fp_distinct_degree(g, p):
            pairs.extend([(k, e)] * (P.degree(gk) // k))
    if all(e == 1 for _, e in parts):
        return PrimeSplit(p, _entries(pairs))
    # f = g*h + p*F with g the radical, h the cofactor; p is not an index
    # divisor iff gcd(F mod p, g, h) = 1.
    g = [1]
    h = [1]
    for gi, e in parts:
        g = P.fp_mul(g, gi, p)
        for _ in range(e - 1):
            h = P.fp_mul(h, gi, p)
    diff = P.zsub(poly_low, P.zmul(g, h))
    F = [c // p for c in diff]
    common = P.fp_gcd(P.fp_gcd(g, h, p), F, p) if F else P.fp_gcd(g, h, p)
    if P.degree(common) > 0:
        raise IndexDivisor(p)
    return PrimeSplit(p, _entries(pairs))


def split_prime(field: NumberField, p: int) -> PrimeSplit:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if field.kind is FieldKind.RATIONAL:
        return PrimeSplit(p, ((1, 1, 1),))
    if field.kind is FieldKind.QUADRATIC:
        chi = kronecker(field.discriminant_D, p)
        if chi == 1:
            return PrimeSplit(p, ((1, 1, 2),))
        if chi == -1:
            return PrimeSplit(p, ((2, 1, 1),))
        return PrimeSplit(p, ((1, 2, 1),))
    return _dedekind_split(P.from_high(field.poly), p)


@dataclass(frozen=True)
class PrimeIdealClassList:
    """Prime-ideal norms <= X, one row per (p, p^f) with the number of primes of that norm.

    Rows are grouped by p and sorted by norm within each group.
    """

    X: int
    p: np.ndarray
    norm: np.ndarray
    multiplicity: np.ndarray

    @property
    def items(self) -> list[tuple[int, int]]:
        return [(int(n), int(m)) for n, m in zip(self.norm, self.multiplicity)]

    def __len__(self) -> int:
        return len(self.norm)

    def count(self) -> int:
        """Number of prime ideals with norm <= X."""
        return int(self.multiplicity.sum())


def _frobenius_root_counts(poly_low: list[int], primes: np.ndarray) -> list[int]:
    """Number of distinct roots mod p of a monic polynomial, for many primes at once.

    x^p mod (f, p) is computed with numpy across all primes; the final
    gcd(f, x^p - x) is taken per prime.  Requires n * p^2 < 2^63.
    """
    n = P.degree(poly_low)
    k = len(primes)
    if k == 0:
        return []
    pc = primes.astype(np.int64)[:, None]
    fcoef = np.array(poly_low[:n], dtype=object)
    fmod = np.stack([np.full(k, int(c), dtype=np.int64) % primes for c in fcoef], axis=1)

    def reduce(prod):
        for d in range(prod.shape[1] - 1, n - 1, -1):
            c = prod[:, d : d + 1]
            prod[:, d - n : d] = (prod[:, d - n : d] - c * fmod) % pc
        return prod[:, :n]

    def square(a):
        prod = np.zeros((k, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                prod[:, i + j] += a[:, i] * a[:, j] % primes
        prod %= pc
        return reduce(prod)

    def times_x(a):
        prod = np.zeros((k, n + 1), dtype=np.int64)
        prod[:, 1:] = a
        return reduce(prod)

    result = np.zeros((k, n), dtype=np.int64)
    result[:, 0] = 1
    for bit in range(int(primes.max()).bit_length() - 1, -1, -1):
        result = square(result)
        mask = ((primes >> bit) & 1).astype(bool)
        if mask.any():
            result = np.where(mask[:, None], times_x(result.copy()), result)
    counts = []
    for row, p in zip(result, primes.tolist()):
        h = P.trim([int(c) for c in row])
        h = P.fp_sub(h, [0, 1], p)
        counts.append(P.degree(P.fp_gcd(P.fp(poly_low, p), h, p)))
    return counts


def prime_ideals_up_to(field: NumberField, X: int, skip_primes=()) -> PrimeIdealClassList:
    """All prime-ideal norm classes with norm <= X.

    ``skip_primes`` is the explicit override for index divisors: those rational
    primes are left out entirely (the resulting tables then describe a
    different Euler product, which is the caller's responsibility).
    """
    skip = set(int(s) for s in skip_primes)
    empty = np.zeros(0, dtype=np.int64)
    if X < 2:
        return PrimeIdealClassList(int(X), empty, empty, empty)
    ps = primes_up_to(int(X))
    if skip:
        ps = ps[~np.isin(ps, list(skip))]

    if field.kind is FieldKind.RATIONAL:
        return PrimeIdealClassList(int(X), ps, ps.copy(), np.ones_like(ps))

    rows: list[tuple[int, int, int]] = []
    if field.kind is FieldKind.QUADRATIC:
        D = field.discriminant_D
        chi = character_table(D)[ps % abs(D)]
        inert_ok = ps * ps <= X
        out_p = np.concatenate([ps[chi == 1], ps[chi == 0], ps[(chi == -1) & inert_ok]])
        out_n = np.concatenate([ps[chi == 1], ps[chi == 0], (ps * ps)[(chi == -1) & inert_ok]])
        out_m = np.concatenate([
            np.full(int((chi == 1).sum()), 2), np.ones(int((chi == 0).sum())),
            np.ones(int(((chi == -1) & inert_ok).sum())),
        ]).astype(np.int64)
        order = np.lexsort((out_n, out_p))
        return PrimeIdealClassList(int(X), out_p[order], out_n[order], out_m[order])

    poly_low = P.from_high(field.poly)
    disc = field.discriminant_D
    root = isqrt(X)
    small = [int(p) for p in ps if p <= root or disc % int(p) == 0]
    large = np.array([p for p in ps.tolist() if p > root and disc % p], dtype=np.int64)
    for p in small:
        for norm, mult in split_prime(field, p).norms():
            if norm <= X:
                rows.append((p, norm, mult))
    for p, c in zip(large.tolist(), _frobenius_root_counts(poly_low, large)):
        if c:
            rows.append((p, p, c))
    rows.sort()
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    return PrimeIdealClassList(int(X), arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())
