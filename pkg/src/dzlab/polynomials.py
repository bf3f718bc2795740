"""Exact polynomial arithmetic over Z, Q and GF(p).

Polynomials are plain lists of integers, lowest degree first: ``[a0, a1, ..., an]``.
The zero polynomial is ``[]``.  Everything public returns trimmed lists (no
trailing zeros).  Public constructors that take user input (``fields``) use the
highest-degree-first convention and convert with :func:`from_high`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list


def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def from_high(coeffs: Sequence[int]) -> Poly:
    return trim([int(c) for c in reversed(coeffs)])


def to_high(a: Poly) -> list[int]:
    return list(reversed(a))


def degree(a: Poly) -> int:
    return len(a) - 1


def derivative(a: Poly) -> Poly:
    return trim([i * a[i] for i in range(1, len(a))])


def evaluate(a: Poly, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


# --------------------------------------------------------------------------
# Z[x]
# --------------------------------------------------------------------------

def content(a: Poly) -> int:
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


def zmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def zsub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def pseudo_remainder(a: Poly, b: Poly) -> Poly:
    """lc(b)^(deg a - deg b + 1) * a  mod  b, computed in Z[x]."""
    r = list(a)
    db = degree(b)
    lb = b[-1]
    e = degree(a) - db + 1
    while r and degree(r) >= db:
        shift = degree(r) - db
        lr = r[-1]
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        trim(r)
        e -= 1
    return [c * lb ** e for c in r] if e > 0 else r


def resultant(a: Poly, b: Poly) -> int:
    """Resultant of two integer polynomials by the subresultant PRS."""
    if not a or not b:
        return 0
    da, db = degree(a), degree(b)
    if da == 0:
        return a[0] ** db
    if db == 0:
        return b[0] ** da
    ca, cb = content(a), content(b)
    A = [c // ca for c in a]
    B = [c // cb for c in b]
    t = ca ** db * cb ** da
    s = 1
    if da < db:
        A, B = B, A
        if da % 2 and db % 2:
            s = -1
    g = Fraction(1)
    h = Fraction(1)
    while True:
        dA, dB = degree(A), degree(B)
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = pseudo_remainder(A, B)
        A = B
        denom = g * h ** delta
        B = []
        for c in R:
            q = Fraction(c) / denom
            if q.denominator != 1:
                raise ArithmeticError("subresultant division not exact")
            B.append(int(q))
        trim(B)
        if not B:
            return 0
        g = Fraction(A[-1])
        h = h ** (1 - delta) * g ** delta
        if degree(B) == 0:
            dA = degree(A)
            h = h ** (1 - dA) * Fraction(B[-1]) ** dA
            val = s * t * h
            if val.denominator != 1:
                raise ArithmeticError("non-integral resultant")
            return int(val)


def discriminant(a: Poly) -> int:
    n = degree(a)
    res = resultant(a, derivative(a))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, r = divmod(sign * res, a[-1])
    if r:
        raise ArithmeticError("discriminant not integral")
    return q


def _qrem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    r = list(a)
    while r and len(r) >= len(b):
        f = r[-1] / b[-1]
        shift = len(r) - len(b)
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        trim(r)
    return r


def sturm_sequence(a: Poly) -> list[list[Fraction]]:
    seq = [[Fraction(c) for c in a], [Fraction(c) for c in derivative(a)]]
    while seq[-1] and degree(seq[-1]) > 0:
        r = _qrem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def count_real_roots(a: Poly) -> int:
    """Number of distinct real roots of a squarefree polynomial (Sturm's theorem)."""
    seq = sturm_sequence(a)

    def changes(signs):
        signs = [x for x in signs if x != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)

    at_pos = [1 if p[-1] > 0 else -1 for p in seq if p]
    at_neg = [(1 if p[-1] > 0 else -1) * (-1) ** degree(p) for p in seq if p]
    return changes(at_neg) - changes(at_pos)


def divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots_monic(a: Poly) -> list[int]:
    """Integer roots of a monic integer polynomial (all rational roots are integers)."""
    if not a:
        raise ValueError("zero polynomial")
    if a[0] == 0:
        return [0] + [r for r in rational_roots_monic(a[1:]) if r != 0]
    return [r for d in divisors(a[0]) for r in (d, -d) if evaluate(a, r) == 0]


# --------------------------------------------------------------------------
# GF(p)[x]
# --------------------------------------------------------------------------

def fp(a: Poly, p: int) -> Poly:
    return trim([c % p for c in a])


def fp_add(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def fp_sub(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def fp_mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def fp_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = degree(b)
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - db)
    while r and degree(r) >= db:
        shift = degree(r) - db
        f = r[-1] * inv % p
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] = (r[i + shift] - f * c) % p
        trim(r)
    return trim(q), r


def fp_rem(a: Poly, b: Poly, p: int) -> Poly:
    return fp_divmod(a, b, p)[1]


def fp_monic(a: Poly, p: int) -> Poly:
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def fp_gcd(a: Poly, b: Poly, p: int) -> Poly:
    a, b = fp(a, p), fp(b, p)
    while b:
        a, b = b, fp_rem(a, b, p)
    return fp_monic(a, p)


def fp_powmod(base: Poly, e: int, mod: Poly, p: int) -> Poly:
    result = [1]
    base = fp_rem(base, mod, p)
    while e:
        if e & 1:
            result = fp_rem(fp_mul(result, base, p), mod, p)
        e >>= 1
        if e:
            base = fp_rem(fp_mul(base, base, p), mod, p)
    return fp_rem(result, mod, p)


def fp_deriv(a: Poly, p: int) -> Poly:
    return trim([i * a[i] % p for i in range(1, len(a))])


def _pth_root(a: Poly, p: int) -> Poly:
    # Frobenius is the identity on GF(p), so only the exponents shrink.
    return trim([a[i] for i in range(0, len(a), p)])


def fp_squarefree_decomposition(a: Poly, p: int) -> list[tuple[Poly, int]]:
    """Return ``[(g, e), ...]`` with monic squarefree pairwise coprime g and a = prod g^e."""
    a = fp_monic(fp(a, p), p)
    if degree(a) < 1:
        return []
    out: list[tuple[Poly, int]] = []
    da = fp_deriv(a, p)
    if not da:
        return [(g, e * p) for g, e in fp_squarefree_decomposition(_pth_root(a, p), p)]
    c = fp_gcd(a, da, p)
    w = fp_divmod(a, c, p)[0]
    i = 1
    while degree(w) > 0:
        y = fp_gcd(w, c, p)
        z = fp_divmod(w, y, p)[0]
        if degree(z) > 0:
            out.append((fp_monic(z, p), i))
        i += 1
        w = y
        c = fp_divmod(c, y, p)[0]
    if degree(c) > 0:
        out.extend((g, e * p) for g, e in fp_squarefree_decomposition(_pth_root(c, p), p))
    return out


def fp_distinct_degree(a: Poly, p: int) -> list[tuple[int, Poly]]:
    """Distinct-degree factorization of a monic squarefree polynomial.

    Returns ``[(k, g_k), ...]`` where g_k is the product of all irreducible
    factors of degree k (only nonconstant g_k are listed).
    """
    g = fp_monic(fp(a, p), p)
    out: list[tuple[int, Poly]] = []
    x = [0, 1]
    h = x
    k = 0
    while degree(g) >= 2 * (k + 1):
        k += 1
        h = fp_powmod(h, p, g, p)
        d = fp_gcd(g, fp_sub(h, x, p), p)
        if degree(d) > 0:
            out.append((k, d))
            g = fp_divmod(g, d, p)[0]
            h = fp_rem(h, g, p)
    if degree(g) > 0:
        out.append((degree(g), g))
    return out


def fp_factor_degrees(a: Poly, p: int) -> list[int]:
    """Degrees of the irreducible factors of a squarefree polynomial mod p."""
    degs: list[int] = []
    for k, g in fp_distinct_degree(a, p):
        degs.extend([k] * (degree(g) // k))
    return sorted(degs)


def is_squarefree_mod(a: Poly, p: int) -> bool:
    b = fp(a, p)
    return degree(fp_gcd(b, fp_deriv(b, p), p)) == 0
