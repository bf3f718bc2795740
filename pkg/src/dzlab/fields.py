"""Number field presentations: rational baseline, quadratic fields, monogenic fields."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from itertools import islice
from math import isqrt

from . import polynomials as P
from .errors import DisallowedValue, FieldError, NotMonic, NotSquarefree, Reducible, Undecided


class FieldKind(str, Enum):
    RATIONAL = "rational"
    QUADRATIC = "quadratic"
    MONOGENIC = "monogenic"


@dataclass(frozen=True)
class NumberField:
    kind: FieldKind
    degree_n: int
    signature: tuple[int, int]
    discriminant_D: int
    d: int | None = None
    poly: tuple[int, ...] | None = None  # highest degree first
    # True when disc(poly) is not squarefree, i.e. Z[theta] may have index > 1.
    possible_index: bool = False

    def __post_init__(self):
        r1, r2 = self.signature
        if r1 + 2 * r2 != self.degree_n:
            raise FieldError(f"signature {self.signature} inconsistent with degree {self.degree_n}")

    @property
    def spec(self) -> str:
        if self.kind is FieldKind.RATIONAL:
            return "rational"
        if self.kind is FieldKind.QUADRATIC:
            return f"quad:{self.d}"
        return "poly:" + ",".join(str(c) for c in self.poly)

    @property
    def r1(self) -> int:
        return self.signature[0]

    @property
    def r2(self) -> int:
        return self.signature[1]

    def defining_polynomial(self) -> list[int]:
        """Minimal polynomial of a ring generator, highest degree first."""
        if self.kind is FieldKind.RATIONAL:
            return [1, 0]
        if self.kind is FieldKind.QUADRATIC:
            if self.d % 4 == 1:
                return [1, -1, (1 - self.d) // 4]
            return [1, 0, -self.d]
        return list(self.poly)

    def __str__(self) -> str:
        return self.spec


RATIONALS = NumberField(FieldKind.RATIONAL, 1, (1, 0), 1)


def rational_field() -> NumberField:
    return RATIONALS


def is_squarefree(m: int) -> bool:
    m = abs(m)
    if m == 0:
        return False
    k = 2
    while k * k <= m:
        if m % (k * k) == 0:
            return False
        k += 1
    return True


def make_quadratic(d: int) -> NumberField:
    if d in (0, 1):
        raise DisallowedValue(f"d={d} does not define a quadratic field")
    if not is_squarefree(d):
        raise NotSquarefree(f"d={d} is not squarefree")
    D = d if d % 4 == 1 else 4 * d
    signature = (2, 0) if d > 0 else (0, 1)
    return NumberField(FieldKind.QUADRATIC, 2, signature, D, d=d)


def _small_primes():
    p = 2
    while True:
        if all(p % q for q in range(2, isqrt(p) + 1)):
            yield p
        p += 1


def _subset_degree_sums(degs: list[int], n: int) -> set[int]:
    sums = {0}
    for k in degs:
        sums |= {s + k for s in sums}
    return {s for s in sums if 0 < s < n}


def irreducibility_witness(poly_low: list[int], n_primes: int = 5) -> str:
    """Decide irreducibility of a monic integer polynomial, or raise.

    Rational-root test first (conclusive for degree <= 3), then factor-degree
    patterns modulo ``n_primes`` primes not dividing the discriminant: a proper
    rational factor of degree k would need a subset of the degrees mod every
    prime summing to k.  Returns a short witness string; raises Reducible or
    Undecided.
    """
    roots = P.rational_roots_monic(poly_low)
    if roots:
        raise Reducible(f"rational root x={roots[0]}")
    n = P.degree(poly_low)
    if n <= 3:
        return "no rational root, degree <= 3"
    disc = P.discriminant(poly_low)
    if disc == 0:
        raise Reducible("repeated factor (zero discriminant)")
    possible = set(range(1, n))
    used = []
    for p in islice((q for q in _small_primes() if disc % q), n_primes):
        degs = P.fp_factor_degrees(poly_low, p)
        used.append((p, degs))
        possible &= _subset_degree_sums(degs, n)
        if not possible:
            return "factor degrees " + "; ".join(f"mod {q}: {d}" for q, d in used)
    raise Undecided(
        "no prime among " + ", ".join(str(q) for q, _ in used)
        + f" excludes factor degrees {sorted(possible)}"
    )


def make_monogenic(coeffs: list[int] | tuple[int, ...]) -> NumberField:
    coeffs = [int(c) for c in coeffs]
    if not coeffs or coeffs[0] != 1:
        raise NotMonic(f"leading coefficient must be 1, got {coeffs[:1]}")
    low = P.from_high(coeffs)
    n = P.degree(low)
    if n < 2:
        raise DisallowedValue("defining polynomial must have degree >= 2")
    irreducibility_witness(low)
    real_roots = P.count_real_roots(low)
    disc = P.discriminant(low)
    return NumberField(
        FieldKind.MONOGENIC,
        n,
        (real_roots, (n - real_roots) // 2),
        disc,
        poly=tuple(coeffs),
        possible_index=not is_squarefree(disc),
    )


_SPEC_RE = re.compile(r"^(quad):(-?\d+)$|^(poly):(-?\d+(?:,-?\d+)+)$|^(rational)$")


def parse_field_spec(spec: str) -> NumberField:
    """Parse ``quad:-1``, ``quad:5``, ``poly:1,0,0,-2`` or ``rational``; no whitespace."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise FieldError(f"malformed field spec {spec!r}")
    if m.group(1):
        return make_quadratic(int(m.group(2)))
    if m.group(3):
        return make_monogenic([int(c) for c in m.group(4).split(",")])
    return RATIONALS


class KappaMethod(str, Enum):
    EXACT = "Exact"
    CHARACTER_SERIES = "ExactCharacterSeries"
    REGRESSION = "RegressionEstimate"


@dataclass(frozen=True)
class FieldInvariants:
    """Residue kappa, zeta_K(2) and the Mertens constant kappa / (2 zeta_K(2))."""

    kappa: float
    kappa_method: KappaMethod
    kappa_error: float
    zeta_K_2: float
    zeta_K_2_error: float
    mertens_constant: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise FieldError(f"kappa must be positive, got {self.kappa}")
        if not self.zeta_K_2 > 1:
            raise FieldError(f"zeta_K(2) must exceed 1, got {self.zeta_K_2}")
        if self.mertens_constant != self.kappa / (2 * self.zeta_K_2):
            raise FieldError("mertens_constant must equal kappa / (2 zeta_K(2))")

    @classmethod
    def from_values(cls, kappa, kappa_method, kappa_error, zeta_K_2, zeta_K_2_error) -> "FieldInvariants":
        return cls(kappa, KappaMethod(kappa_method), kappa_error, zeta_K_2, zeta_K_2_error,
                   kappa / (2 * zeta_K_2))

    @property
    def density(self) -> float:
        """kappa / zeta_K(2), the density of the limit measure against q dq."""
        return self.kappa / self.zeta_K_2
