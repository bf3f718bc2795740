import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dzlab.errors import ConfigError, InsufficientData, TableTooSmall
from dzlab.fields import FieldInvariants
from dzlab.measures import (FunctionKind, LinearCombination, MeasureSample, TestFunction,
                            critical_exponent_scan, error_curve, exponent_fit, geometric_grid,
                            m_limit, m_q, m_q_batch, moment_integral, parse_function_spec, required_X)
from dzlab.sieve import summatory

from conftest import invariants_for, tables_for

IND = TestFunction.indicator(1, 2)


def gaussian_ideal_phi(a, b):
    """|(Z[i]/(a+bi))^*| by brute force over the box [0, N)^2, which covers each class N times."""
    N = a * a + b * b

    def divisible(x, y):  # (x + yi) / (a + bi) in Z[i]
        re, im = x * a + y * b, y * a - x * b
        return re % N == 0 and im % N == 0

    box = [(x, y) for x in range(N) for y in range(N)]
    units = sum(1 for x, y in box
                if any(divisible(x * u - y * v - 1, x * v + y * u) for u, v in box))
    return units // N


def test_gaussian_phi_oracle_sanity():
    assert gaussian_ideal_phi(1, 1) == 1
    assert gaussian_ideal_phi(2, 0) == 2
    assert gaussian_ideal_phi(2, 1) == 4
    assert gaussian_ideal_phi(3, 0) == 8


def test_m_q_examples():
    assert m_q(tables_for("rational", 10**4), IND, 0.25) == 1.25
    # q^(1/2) > support_hi
    assert m_q(tables_for("quad:-1", 10**4), IND, 9.0) == 0.0
    assert m_q(tables_for("quad:-1", 10**4), TestFunction.polybump(2), 1.5) == 0.0


def test_m_q_gaussian_enumeration():
    q = 0.25
    total = 0
    for a in range(1, 5):
        for b in range(0, 5):
            n = a * a + b * b
            if 1 <= math.sqrt(q) * n <= 2:
                total += gaussian_ideal_phi(a, b)
    t = tables_for("quad:-1", 10**4)
    assert m_q(t, IND, q) == q * total
    assert q * total == 0.25 * sum(int(t.totient_sum[m]) for m in range(2, 5))


def test_gaussian_S_phi_matches_enumeration():
    t = tables_for("quad:-1", 10**4)
    S = [0] * 41
    for a in range(1, 7):
        for b in range(0, 7):
            n = a * a + b * b
            if n <= 40:
                S[n] += gaussian_ideal_phi(a, b)
    assert [int(t.totient_sum[m]) for m in range(1, 41)] == S[1:]


def test_m_limit_examples():
    inv = invariants_for("quad:-1")
    assert m_limit(inv, IND) == pytest.approx(0.7819, abs=1e-4)
    assert m_limit(inv, IND) == pytest.approx(math.pi / 4 / inv.zeta_K_2 * 1.5, rel=1e-14)
    for spec in ("rational", "quad:5", "poly:1,0,0,-2"):
        inv = invariants_for(spec)
        assert m_limit(inv, TestFunction.polybump(2)) == pytest.approx(inv.density / 12, rel=1e-14)
    # smooth bump against an independent quadrature
    from scipy.integrate import quad
    f = TestFunction.smooth(1, 2)
    ref = quad(lambda t: float(f.eval(t)) * t, 1, 2, epsabs=1e-14)[0]
    assert moment_integral(f, 1).real == pytest.approx(ref, rel=1e-10)


def test_moment_integral_closed_forms():
    s = 1.25 + 1j
    assert moment_integral(IND, s) == pytest.approx((2 ** (2 * s) - 1) / (2 * s), rel=1e-14)
    assert moment_integral(TestFunction.polybump(2), s) == pytest.approx(2 / (2 * s * (2 * s + 1) * (2 * s + 2)), rel=1e-14)


def test_function_validation_and_parsing():
    with pytest.raises(ConfigError):
        TestFunction.indicator(2, 2)
    with pytest.raises(ConfigError):
        TestFunction.smooth(0, 1)
    with pytest.raises(ConfigError):
        TestFunction.polybump(0)
    f = parse_function_spec("indicator:1,2")
    assert f == IND and f.smoothness_l is None and f.support_hi == 2
    g = parse_function_spec("polybump:3")
    assert g.smoothness_l == 2 and g.support_hi == 1
    assert parse_function_spec("smooth:1,2").smoothness_l == math.inf
    for bad in ("indicator:1", "poly:2", "smooth:a,b", "indicator:1,2 "):
        with pytest.raises(ConfigError):
            parse_function_spec(bad)
    t = np.linspace(0, 5, 501)
    for f in (IND, g, TestFunction.smooth(1, 2), IND.dilate(3)):
        assert np.all(f.eval(t[t > f.support_hi]) == 0)


def test_required_X_and_table_too_small():
    assert required_X(IND, 0.25) == 4
    assert required_X(IND, 1e-4) == 200
    t = tables_for("quad:-1", 10**4)
    with pytest.raises(TableTooSmall) as info:
        m_q(t, IND, 1e-9)
    assert info.value.required == required_X(IND, 1e-9)
    with pytest.raises(TableTooSmall):
        m_q_batch(t, IND, [1e-9])


@pytest.mark.parametrize("lam", [2.0, 1 / 3])
@pytest.mark.parametrize("f", [IND, TestFunction.polybump(2), TestFunction.smooth(1, 2)])
def test_dilation_covariance(lam, f):
    t = tables_for("quad:-1", 10**5)
    inv = invariants_for("quad:-1")
    for q in geometric_grid(1e-1, 1e-4, 5):
        lhs = m_q(t, f.dilate(lam), q)
        rhs = lam**-2 * m_q(t, f, lam * lam * q)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)
    assert m_limit(inv, f.dilate(lam)) == pytest.approx(lam**-2 * m_limit(inv, f), rel=1e-12)


def test_linearity():
    t = tables_for("quad:5", 10**5)
    f, g = TestFunction.polybump(2), TestFunction.smooth(0.5, 1.5)
    h = LinearCombination(((2.0, f), (-0.5, g)))
    inv = invariants_for("quad:5")
    for q in (1e-2, 1e-3, 1e-4):
        assert m_q(t, h, q) == pytest.approx(2 * m_q(t, f, q) - 0.5 * m_q(t, g, q), rel=1e-13)
    assert m_limit(inv, h) == pytest.approx(2 * m_limit(inv, f) - 0.5 * m_limit(inv, g), rel=1e-14)


@given(st.floats(1e-5, 1.0))
@settings(max_examples=40, deadline=None)
def test_monotonicity(q):
    t = tables_for("quad:-1", 10**5)
    # F_3 <= F_2 <= 1_(0,1] <= 1_(0,2]
    vals = [m_q(t, f, q) for f in (TestFunction.polybump(3), TestFunction.polybump(2),
                                   TestFunction.indicator(0, 1), TestFunction.indicator(0, 2))]
    assert vals == sorted(vals)


@pytest.mark.parametrize("spec", ["rational", "quad:-1", "poly:1,0,0,-2"])
def test_indicator_ties_to_mertens_bit_exact(spec):
    t = tables_for(spec, 10**4)
    for b in (1.0, 2.0, 3.7):
        f = TestFunction.indicator(0, b)
        qs = geometric_grid(1e-1, 1e-5, 7)
        batch = m_q_batch(t, f, qs)
        for q, bv in zip(qs, batch):
            x = required_X(f, q)
            assert x == math.floor(b / math.sqrt(q)) or abs(b / math.sqrt(q) - round(b / math.sqrt(q))) < 1e-9
            exact = q * float(summatory(t.totient_sum, x)) if x >= 1 else 0.0
            assert m_q(t, f, q) == exact
            assert bv == exact


@pytest.mark.parametrize("f", [IND, TestFunction.indicator(0.5, 3), TestFunction.polybump(2),
                               TestFunction.polybump(3), TestFunction.smooth(1, 2)])
def test_batch_matches_scalar(f):
    t = tables_for("quad:-1", 10**5)
    qs = geometric_grid(1e-1, 1e-5, 12)
    scalar = np.array([m_q(t, f, q) for q in qs])
    batch = m_q_batch(t, f, qs)
    if f.kind is FunctionKind.POLYBUMP:
        np.testing.assert_allclose(batch, scalar, rtol=1e-12, atol=0)
    else:
        assert np.array_equal(batch, scalar)


def test_geometric_grid():
    g = geometric_grid(1e-1, 1e-5, 48)
    assert len(g) == 193 and g[0] == 1e-1 and g[-1] == pytest.approx(1e-5, rel=1e-12)
    assert np.all(np.diff(g) < 0)
    with pytest.raises(ConfigError):
        geometric_grid(1e-5, 1e-1, 48)


def test_error_curve_properties():
    t = tables_for("quad:-1", 10**5)
    inv = invariants_for("quad:-1")
    grid = [1e-3, 10.0, 1e-1, 5.0]
    s = error_curve(t, inv, IND, grid)
    assert [x.q for x in s] == sorted(grid, reverse=True)
    assert s[0].m_q == 0 and s[1].m_q == 0
    for x in s:
        assert x.error == x.m_q - x.m_limit
        assert x.error_over_sqrt_q == x.error / math.sqrt(x.q)
    s = error_curve(t, inv, IND, geometric_grid(1e-1, 1e-5, 48))
    signs = {np.sign(x.error) for x in s}
    assert signs == {-1.0, 1.0}
    with pytest.raises(TableTooSmall):
        error_curve(tables_for("quad:-1", 10**4), inv, IND, [1e-9])


def _synthetic(alpha, c=0.3, n=40):
    qs = geometric_grid(1e-1, 1e-6, 8)[:n]
    return [MeasureSample(q, 1 + c * q**alpha, 1.0, c * q**alpha) for q in qs]


def test_exponent_fit_synthetic():
    fit = exponent_fit(_synthetic(0.5))
    assert abs(fit.alpha_hat - 0.5) < 1e-6
    assert fit.n_points == 40 and fit.q_range[0] < fit.q_range[1]
    with pytest.raises(InsufficientData):
        exponent_fit(_synthetic(0.5, n=7))
    # below the float floor the point is dropped
    samples = _synthetic(0.5, n=10)
    samples[3] = MeasureSample(samples[3].q, 1.0, 1.0, 1e-15)
    assert exponent_fit(samples).n_points == 9


def test_scan_synthetic():
    sc = critical_exponent_scan(_synthetic(0.5), [0.0, 0.4, 0.75])
    assert np.all(np.diff(sc.running_max[0.4]) >= 0)
    # q^-0.4 * c q^0.5 decreases, so the running max is the first value
    assert sc.running_max[0.4][-1] == sc.running_max[0.4][0]
    assert sc.growth(0.75, 1e-1, 1e-6) > 10
    with pytest.raises(ValueError):
        critical_exponent_scan(list(reversed(_synthetic(0.5))), [0.5])


def test_indicator_exponent_band():
    t = tables_for("quad:-1", 10**5)
    inv = invariants_for("quad:-1")
    s = error_curve(t, inv, IND, geometric_grid(1e-1, 1e-6, 48))
    fit = exponent_fit(s)
    assert 0.20 <= fit.alpha_hat <= 0.55
    sc = critical_exponent_scan(s, [0.0, 0.75])
    assert sc.growth(0.75, 1e-2, 1e-6) >= 10
    assert sc.growth(0.0, 1e-2, 1e-6) == 1.0


def test_polybump_exponent():
    t = tables_for("quad:-1", 10**5)
    inv = invariants_for("quad:-1")
    s = error_curve(t, inv, TestFunction.polybump(2), geometric_grid(1e-1, 1e-6, 48))
    assert exponent_fit(s).alpha_hat >= 0.45


def test_smooth_decay_trend():
    t = tables_for("quad:-1", 10**6)
    inv = invariants_for("quad:-1")
    f = TestFunction.smooth(1, 2)
    s = error_curve(t, inv, f, geometric_grid(1e-1, 1e-5, 12))
    v = np.abs([x.error_over_sqrt_q for x in s])
    assert np.all(np.isfinite(v))
    assert v[-1] <= 0.5 * v[0]
    assert v[-13:].max() < v[:13].max()


def test_field_invariants_drive_density():
    inv = FieldInvariants.from_values(2.0, "Exact", 0.0, 4.0, 0.0)
    assert m_limit(inv, IND) == pytest.approx(0.5 * 1.5)
