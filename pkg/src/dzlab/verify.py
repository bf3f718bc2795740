"""Invariant suite behind `dzlab verify`: every module's properties, scaled to the sieve bound."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from math import gcd, isqrt

import numpy as np

from . import cache
from .errors import DivisionNearZero, FieldError
from .fields import FieldKind, NumberField, make_monogenic, make_quadratic
from .measures import TestFunction, critical_exponent_scan, error_curve, geometric_grid, m_limit, m_q
from .mellin import (beta_identity_defect, completed_symmetry_defect, mellin_closed, mellin_numeric,
                     residue_limit)
from .sieve import (SieveTables, TableKind, dirichlet_convolve, normalized_error_decades,
                    oracle_gaussian_counts, oracle_quadratic_counts)
from .splitting import is_prime, prime_ideals_up_to, primes_up_to, split_prime
from .zeta import (compute_invariants, euler_product, functional_equation_check, kappa_regression,
                   lindelof_grid, zeta_K, zeta_K_series)


@dataclass
class Check:
    module: str
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class VerifyReport:
    field: str
    X: int
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "field": self.field,
            "X": self.X,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": sum(not c.passed for c in self.checks),
            "checks": [asdict(c) for c in self.checks],
        }


def _num(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class _Runner:
    def __init__(self):
        self.checks: list[Check] = []

    def run(self, module: str, name: str, fn):
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, {"exception": f"{type(exc).__name__}: {exc}"}
        detail = {k: _num(v) for k, v in detail.items()}
        self.checks.append(Check(module, name, bool(passed), detail, round(time.perf_counter() - t0, 3)))


# --------------------------------------------------------------------------
# field_core
# --------------------------------------------------------------------------

def _field_checks(r: _Runner, fld: NumberField, rng):
    r.run("field_core", "degree equals r1 + 2 r2",
          lambda: (fld.degree_n == fld.r1 + 2 * fld.r2, {"n": fld.degree_n, "signature": list(fld.signature)}))

    def agree():
        a, b = make_monogenic([1, 0, 1]), make_quadratic(-1)
        same = (a.degree_n, a.signature, a.discriminant_D) == (b.degree_n, b.signature, b.discriminant_D)
        return same, {"monogenic": [a.degree_n, list(a.signature), a.discriminant_D]}

    r.run("field_core", "x^2+1 and quad:-1 agree", agree)

    def sturm():
        done, bad = 0, []
        while done < 20:
            n = int(rng.integers(3, 5))
            coeffs = [1] + [int(c) for c in rng.integers(-6, 7, size=n)]
            try:
                K = make_monogenic(coeffs)
            except FieldError:
                continue
            roots = np.roots(coeffs)
            real = int(np.sum(np.abs(roots.imag) < 1e-9))
            if K.r1 != real or K.degree_n - K.r1 != 2 * K.r2:
                bad.append(coeffs)
            done += 1
        return not bad, {"polynomials": done, "mismatches": bad}

    r.run("field_core", "Sturm real-root count matches numeric roots", sturm)


# --------------------------------------------------------------------------
# prime_splitter
# --------------------------------------------------------------------------

def _splitting_checks(r: _Runner, fld: NumberField, X: int, rng):
    def sum_ef():
        ps = primes_up_to(min(X, 10**5))
        sample = ps if len(ps) <= 1000 else rng.choice(ps, 1000, replace=False)
        bad = [int(p) for p in sample if split_prime(fld, int(p)).sum_ef() != fld.degree_n]
        return not bad, {"primes": len(sample), "bad": bad[:10]}

    r.run("prime_splitter", "sum e f = n", sum_ef)

    def quad_vs_mono():
        a, b = make_quadratic(-1), make_monogenic([1, 0, 1])
        ps = primes_up_to(min(X, 10**4))
        bad = [int(p) for p in ps if split_prime(a, int(p)).entries != split_prime(b, int(p)).entries]
        return not bad, {"primes": len(ps), "bad": bad[:10]}

    r.run("prime_splitter", "quadratic and monogenic splitting agree for x^2+1", quad_vs_mono)

    def gaussian_primes():
        Y = min(X, 10**4)
        pl = prime_ideals_up_to(make_quadratic(-1), Y)
        # Gaussian primes a+bi with a > 0, b >= 0 (one per associate class), by norm
        count = 0
        for a in range(1, isqrt(Y) + 1):
            for b in range(0, isqrt(Y - a * a) + 1):
                nrm = a * a + b * b
                if b == 0:
                    count += is_prime(a) and a % 4 == 3 and a * a <= Y
                elif is_prime(nrm):
                    count += 1
        counts = [prime_ideals_up_to(make_quadratic(-1), y).count() for y in (Y // 4, Y // 2, Y)]
        mono = counts == sorted(counts)
        return pl.count() == count and mono, {"ideals": pl.count(), "lattice": count}

    r.run("prime_splitter", "Q(i) prime-ideal count equals Gaussian-prime enumeration", gaussian_primes)


# --------------------------------------------------------------------------
# dirichlet_sieve
# --------------------------------------------------------------------------

def _sieve_checks(r: _Runner, fld: NumberField, tables: SieveTables, inv, rng):
    X = tables.X
    a = tables.ideal_count.values
    phi = tables.totient_sum.values
    mu = tables.moebius_sum.values
    Y = min(X, 10**4)

    def moebius():
        conv = dirichlet_convolve(mu, a, Y)
        target = np.zeros(Y + 1, dtype=conv.dtype)
        target[1] = 1
        return bool(np.all(conv[1:] == target[1:])), {"m_max": Y}

    def totient():
        na = a[: Y + 1] * np.arange(Y + 1)
        conv = dirichlet_convolve(mu, na, Y)
        return bool(np.all(conv[1:] == phi[1 : Y + 1])), {"m_max": Y}

    r.run("dirichlet_sieve", "sum_{d|m} S_mu(d) a(m/d) = [m=1]", moebius)
    r.run("dirichlet_sieve", "S_phi = S_mu * (m a)", totient)

    def multiplicative():
        bad, tried = [], 0
        while tried < 1000 and X >= 6:
            m = int(rng.integers(2, max(3, isqrt(X) + 1)))
            n = int(rng.integers(2, max(3, X // m + 1)))
            if gcd(m, n) != 1 or m * n > X:
                continue
            tried += 1
            if a[m * n] != a[m] * a[n]:
                bad.append((m, n))
        return not bad, {"pairs": tried, "bad": bad[:10]}

    r.run("dirichlet_sieve", "a_K multiplicative on coprime pairs", multiplicative)

    if fld.kind is FieldKind.QUADRATIC:
        def oracle():
            Z = min(X, 10**5)
            ref = oracle_quadratic_counts(fld.discriminant_D, Z)
            return bool(np.array_equal(a[1 : Z + 1], ref[1:])), {"m_max": Z}

        r.run("dirichlet_sieve", "a_K equals sum_{d|m} chi_D(d)", oracle)
    if fld.kind is FieldKind.QUADRATIC and fld.d == -1:
        def lattice():
            Z = min(X, 10**4)
            ref = oracle_gaussian_counts(Z)
            return bool(np.array_equal(tables.ideal_count.prefix[1 : Z + 1], ref[1:])), {"x_max": Z}

        r.run("dirichlet_sieve", "N(x) equals Gaussian lattice count / 4", lattice)

    r.run("dirichlet_sieve", "Phi_K nondecreasing",
          lambda: (bool(np.all(np.diff(tables.totient_sum.prefix.astype(np.float64)) >= 0)), {}))

    def ideal_count_remainder():
        theta = 1 - 1 / fld.degree_n
        xs = [10**k for k in range(2, 9) if 10**k <= X]
        vals = [abs(tables.ideal_count.summatory(x) - inv.kappa * x) / x ** theta for x in xs]
        return max(vals) < 10, {"x": xs, "normalized": vals}

    r.run("dirichlet_sieve", "|N(x) - kappa x| / x^(1-1/n) bounded", ideal_count_remainder)

    def mertens():
        decades = [(10**k, 10 ** (k + 1)) for k in range(1, 8) if 10 ** (k + 1) <= X][-2:]
        if len(decades) < 2:
            return True, {"skipped": "X too small"}
        vals = normalized_error_decades(tables.totient_sum, inv.mertens_constant, decades)
        rel = abs(tables.totient_sum.summatory(X) / X**2 - inv.mertens_constant)
        return vals[-1] <= 3 * vals[0] and rel < 5e-3 * max(1, 1e6 / X) ** 0.5, {
            "decade_max": vals, "relative_gap_at_X": rel}

    r.run("dirichlet_sieve", "Mertens: Phi_K(x)/x^2 -> kappa/(2 zeta_K(2)), error non-exploding", mertens)


# --------------------------------------------------------------------------
# zeta_engine
# --------------------------------------------------------------------------

def _zeta_checks(r: _Runner, fld: NumberField, tables: SieveTables, inv, rng):
    quad = fld.kind in (FieldKind.QUADRATIC, FieldKind.RATIONAL)
    primes = prime_ideals_up_to(fld, tables.X)

    def series_vs_product():
        worst = 0.0
        for _ in range(20):
            s = complex(rng.uniform(2, 4), rng.uniform(-30, 30))
            a = zeta_K_series(fld, s, tables.ideal_count, inv.kappa, inv.kappa_error)
            b = euler_product(fld, s, primes)
            worst = max(worst, abs(a.value - b.value) / (a.abs_err + b.abs_err + 1e-14))
        return worst <= 1, {"worst_gap_over_tolerance": worst}

    r.run("zeta_engine", "series equals Euler product within tails", series_vs_product)

    def conjugation():
        bad = 0
        for s in (2.5 + 3j, 1.7 - 11j, 3 + 0.5j):
            a = zeta_K(fld, s, tables.ideal_count).value
            b = zeta_K(fld, s.conjugate(), tables.ideal_count).value
            bad += a.conjugate() != b
        return bad == 0, {"mismatches": bad}

    r.run("zeta_engine", "zeta_K(conj s) = conj zeta_K(s)", conjugation)

    def kappa():
        reg = kappa_regression(tables.ideal_count)
        ok = inv.kappa > 0 and abs(reg.value - inv.kappa) <= reg.error_bar + inv.kappa_error
        return ok, {"kappa": inv.kappa, "method": inv.kappa_method.value, "regression": reg.value,
                    "error_bar": reg.error_bar}

    r.run("zeta_engine", "kappa positive; regression agrees with the primary estimate", kappa)

    def zeta2():
        b = euler_product(fld, 2, primes)
        ok = inv.zeta_K_2 > 1 and abs(inv.zeta_K_2 - b.re) <= inv.zeta_K_2_error + b.abs_err
        return ok, {"zeta_K_2": inv.zeta_K_2, "euler_product": b.re, "tolerance": inv.zeta_K_2_error + b.abs_err}

    r.run("zeta_engine", "zeta_K(2) > 1 and equals the Euler product", zeta2)

    if quad:
        def lindelof():
            rep = lindelof_grid(fld, [0, 0.25, 0.5, 0.75, 1, 1.5], T=1e4, samples=400)
            return rep.monotone and rep.nonnegative and rep.nu_hats[-1] <= 0.05, {
                "sigma": rep.sigmas, "nu_hat": rep.nu_hats, "convexity_defect": rep.convexity_defect}

        r.run("zeta_engine", "Lindelof profile nonnegative and nonincreasing", lindelof)

        def hecke():
            d = {str(s): functional_equation_check(fld, s) for s in (0.25 + 3j, 0.3, 0.7 + 1j)}
            return max(d.values()) < 1e-6, d

        r.run("zeta_engine", "Hecke functional equation", hecke)


# --------------------------------------------------------------------------
# measure_lab
# --------------------------------------------------------------------------

def _measure_checks(r: _Runner, fld: NumberField, tables: SieveTables, inv):
    T = tables.totient_sum
    X = tables.X
    q_min = max(1e-5, (4 / X) ** 2)
    qs = geometric_grid(1e-1, q_min, 12)
    fns = [TestFunction.indicator(1, 2), TestFunction.polybump(2), TestFunction.smooth(1, 2)]

    def dilation():
        worst = 0.0
        for f in fns:
            for lam in (2.0, 1 / 3):
                for q in qs[::4]:
                    if (f.support_hi / lam) / math.sqrt(q) > X or f.support_hi / math.sqrt(lam * lam * q) > X:
                        continue
                    a = m_q(T, f.dilate(lam), q)
                    b = m_q(T, f, lam * lam * q) / lam**2
                    worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
            for lam in (2.0, 1 / 3):
                la, lb = m_limit(inv, f.dilate(lam)), m_limit(inv, f) / lam**2
                worst = max(worst, abs(la - lb) / abs(lb))
        return worst < 1e-9, {"worst_relative": worst}

    r.run("measure_lab", "dilation covariance", dilation)

    def linearity():
        from .measures import LinearCombination
        f, g = fns[1], fns[2]
        h = LinearCombination(((2.5, f), (-0.75, g)))
        worst = max(abs(m_q(T, h, q) - (2.5 * m_q(T, f, q) - 0.75 * m_q(T, g, q))) for q in qs)
        return worst < 1e-12, {"worst_abs": worst}

    r.run("measure_lab", "linearity", linearity)

    def monotone():
        f, g = TestFunction.indicator(1, 2), TestFunction.indicator(0.5, 2)
        bad = [q for q in qs if m_q(T, f, q) > m_q(T, g, q)]
        return not bad, {"violations": len(bad)}

    r.run("measure_lab", "monotonicity", monotone)

    def mertens_tie():
        f = TestFunction.indicator(0, 2)
        bad = 0
        for q in qs:
            M = int(np.floor(2 / math.sqrt(q)))
            bad += m_q(T, f, q) != q * float(T.summatory(M))
        return bad == 0, {"mismatches": bad}

    r.run("measure_lab", "indicator(0+, b) equals q Phi_K bit-exactly", mertens_tie)

    if fld.kind is not FieldKind.MONOGENIC:
        def regime_b():
            grid = geometric_grid(1e-1, 1e-5, 12)
            if (required := max(int(2 / math.sqrt(q)) for q in grid)) > X:
                return True, {"skipped": f"needs X >= {required}"}
            ec = error_curve(T, inv, TestFunction.smooth(1, 2), grid)
            v = [abs(s.error_over_sqrt_q) for s in ec]
            return v[-1] <= 0.5 * v[0] and max(v) < 10, {"first": v[0], "last": v[-1], "sup": max(v)}

        r.run("measure_lab", "smooth f: q^(-1/2) |E| decays", regime_b)

        def indicator_scan():
            grid = geometric_grid(1e-1, 1e-5, 24)
            ec = error_curve(T, inv, TestFunction.indicator(1, 2), grid)
            sc = critical_exponent_scan(ec, [0.75])
            g = sc.growth(0.75, 1e-1, 1e-5)
            return g >= 10, {"growth_alpha_0.75": g}

        r.run("measure_lab", "indicator: q^(-3/4)|E| running max grows", indicator_scan)


# --------------------------------------------------------------------------
# mellin_engine
# --------------------------------------------------------------------------

def _mellin_checks(r: _Runner, fld: NumberField, tables: SieveTables, inv, rng):
    quad = fld.kind in (FieldKind.QUADRATIC, FieldKind.RATIONAL)
    fns = [TestFunction.indicator(1, 2), TestFunction.polybump(2), TestFunction.polybump(3)]

    def rs_identity():
        worst = 0.0
        for f in fns:
            for s in (1.5, 2.0, 1.25 + 1j, 2 + 3j):
                try:
                    c = mellin_closed(fld, f, s, tables).value.value
                except DivisionNearZero:
                    continue
                a = mellin_numeric(tables, inv, f, s).value.value
                worst = max(worst, abs(a - c) / abs(c))
        return worst < 1e-3, {"worst_relative": worst}

    r.run("mellin_engine", "numeric transform equals closed form", rs_identity)

    def conj():
        f = fns[1]
        a = mellin_closed(fld, f, 1.5 + 2j, tables).value.value
        b = mellin_closed(fld, f, 1.5 - 2j, tables).value.value
        return abs(a.conjugate() - b) <= 1e-14 * abs(a), {"gap": abs(a.conjugate() - b)}

    r.run("mellin_engine", "conjugate symmetry", conj)

    def beta():
        worst = max(beta_identity_defect(rr, complex(rng.uniform(0.1, 3), rng.uniform(-20, 20)))
                    for rr in range(1, 7) for _ in range(20))
        return worst < 1e-12, {"worst": worst}

    r.run("mellin_engine", "Beta identity", beta)

    if quad:
        def residue():
            f = fns[1]
            lim, raw = residue_limit(fld, f)
            target = m_limit(inv, f)
            return abs(lim - target) < 1e-4, {"extrapolated": lim, "m_limit": target, "raw": raw}

        r.run("mellin_engine", "pole residue equals m(f)", residue)

    if fld.kind is FieldKind.QUADRATIC:
        r.run("mellin_engine", "completed numerator symmetric under s -> 3/2 - s",
              lambda: ((d := completed_symmetry_defect(fld, 0.7 + 1j)) < 1e-5, {"defect": d}))


def _cache_checks(r: _Runner, tables: SieveTables):
    def roundtrip():
        back = cache.loads(cache.dumps(tables))
        same = all(tables.table(k).same_values(back.table(k)) for k in TableKind)
        return same, {"bytes": len(cache.dumps(tables))}

    r.run("cli_report", "cache round-trip bit-identical", roundtrip)


def run_suite(fld: NumberField, tables: SieveTables, seed: int = 20240531) -> VerifyReport:
    rng = np.random.default_rng(seed)
    inv = compute_invariants(fld, tables.ideal_count)
    r = _Runner()
    _field_checks(r, fld, rng)
    _splitting_checks(r, fld, tables.X, rng)
    _sieve_checks(r, fld, tables, inv, rng)
    _zeta_checks(r, fld, tables, inv, rng)
    _measure_checks(r, fld, tables, inv)
    _mellin_checks(r, fld, tables, inv, rng)
    _cache_checks(r, tables)
    return VerifyReport(fld.spec, tables.X, r.checks)
