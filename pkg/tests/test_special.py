import mpmath
import numpy as np
import pytest

from dzlab import special
from dzlab.splitting import character_table

mpmath.mp.dps = 30


@pytest.mark.parametrize("s", [2, 3.5, 0.5, 0.25 + 3j, 1.5 + 20j, 0.5 + 300j, 2 + 1000j, -0.5 + 1j])
@pytest.mark.parametrize("a", [1.0, 0.25, 0.75, 0.2])
def test_hurwitz_against_mpmath(s, a):
    v, err = special.hurwitz_zeta(s, a)
    ref = complex(mpmath.zeta(mpmath.mpc(s), a))
    assert abs(v - ref) <= max(10 * err, 1e-12 * abs(ref))


def test_hurwitz_large_height():
    v, _ = special.hurwitz_zeta(0.5 + 1e4j, 1.0)
    ref = complex(mpmath.zeta(mpmath.mpc(0.5, 1e4)))
    assert abs(v - ref) < 1e-9


@pytest.mark.parametrize("x", [0.25, 0.2, 1.0, 0.75, 3.3])
def test_digamma(x):
    v, _ = special.digamma(x)
    assert v == pytest.approx(float(mpmath.digamma(x)), abs=1e-13)


@pytest.mark.parametrize("D", [-4, -3, 5, 8, -23])
@pytest.mark.parametrize("s", [2, 0.5, 0.3 + 2j])
def test_dirichlet_L_against_mpmath(D, s):
    chi = character_table(D)
    v, _ = special.dirichlet_L(chi, s)
    ref = complex(mpmath.dirichlet(mpmath.mpc(s), [int(c) for c in chi]))
    assert abs(v - ref) < 1e-11


def test_log_gamma_and_beta():
    for z in (0.5, 2.5 + 1j, 0.1 + 30j, 7.0):
        assert abs(special.log_gamma(z) - complex(mpmath.loggamma(z))) < 1e-12
    assert special.beta(3, 2).real == pytest.approx(1 / 12, rel=1e-14)
    b = special.beta(1.5 + 2j, 3)
    assert abs(b - complex(mpmath.beta(mpmath.mpc(1.5, 2), 3))) < 1e-13


def test_riemann_zeta_known_values():
    v, err = special.riemann_zeta(2)
    assert abs(v - np.pi**2 / 6) < 1e-14 and err < 1e-12
    v, _ = special.riemann_zeta(0.5)
    assert v.real == pytest.approx(float(mpmath.zeta(0.5)), abs=1e-13)


@pytest.mark.parametrize("D,ref", [
    (-4, np.pi / 4),
    (-3, np.pi / (3 * np.sqrt(3))),
    (5, 2 * np.log((1 + np.sqrt(5)) / 2) / np.sqrt(5)),
    (8, np.log(1 + np.sqrt(2)) / np.sqrt(2)),
    (-23, 3 * np.pi / np.sqrt(23)),  # class number 3
])
def test_L_at_one_class_number_formula(D, ref):
    v, _ = special.dirichlet_L(character_table(D), 1)
    assert v.real == pytest.approx(ref, abs=1e-12)
