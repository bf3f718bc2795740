import numpy as np
import pytest

from dzlab.errors import DisallowedValue, FieldError, NotMonic, NotSquarefree, Reducible, Undecided
from dzlab.fields import (FieldInvariants, FieldKind, KappaMethod, NumberField, make_monogenic,
                          make_quadratic, parse_field_spec, rational_field)


def test_quadratic_examples():
    K = make_quadratic(-1)
    assert (K.discriminant_D, K.signature, K.degree_n) == (-4, (0, 1), 2)
    K = make_quadratic(5)
    assert (K.discriminant_D, K.signature) == (5, (2, 0))
    assert make_quadratic(2).discriminant_D == 8
    assert make_quadratic(-3).discriminant_D == -3
    with pytest.raises(NotSquarefree):
        make_quadratic(12)
    for d in (0, 1):
        with pytest.raises(DisallowedValue):
            make_quadratic(d)


def test_monogenic_examples():
    K = make_monogenic([1, 0, 0, -2])
    assert (K.degree_n, K.signature, K.discriminant_D) == (3, (1, 1), -108)
    assert K.possible_index
    K = make_monogenic([1, 0, 1])
    Q = make_quadratic(-1)
    assert (K.degree_n, K.signature, K.discriminant_D) == (Q.degree_n, Q.signature, Q.discriminant_D)
    with pytest.raises(Reducible):
        make_monogenic([1, 0, -1])
    with pytest.raises(NotMonic):
        make_monogenic([2, 0, 1])
    with pytest.raises(DisallowedValue):
        make_monogenic([1, 5])


def test_undecided_rather_than_accepting():
    # x^4 + 1 is irreducible over Q but factors modulo every prime
    with pytest.raises(Undecided):
        make_monogenic([1, 0, 0, 0, 1])
    # reducible without rational roots: (x^2+1)(x^2+2)
    with pytest.raises((Reducible, Undecided)):
        make_monogenic([1, 0, 3, 0, 2])


def test_sturm_signature_on_random_polynomials():
    rng = np.random.default_rng(7)
    done = 0
    while done < 20:
        n = int(rng.integers(3, 5))
        coeffs = [1] + [int(c) for c in rng.integers(-8, 9, size=n)]
        try:
            K = make_monogenic(coeffs)
        except FieldError:
            continue
        roots = np.roots(coeffs)
        assert K.r1 == int(np.sum(np.abs(roots.imag) < 1e-9))
        assert K.degree_n == K.r1 + 2 * K.r2
        done += 1


def test_signature_consistency_enforced():
    with pytest.raises(FieldError):
        NumberField(FieldKind.QUADRATIC, 2, (1, 1), 5, d=5)


def test_parse_field_spec():
    assert parse_field_spec("quad:-1") == make_quadratic(-1)
    assert parse_field_spec("poly:1,0,0,-2").discriminant_D == -108
    assert parse_field_spec("rational") is rational_field()
    for bad in ("quad: -1", " quad:5", "quad:5 ", "poly:1", "poly:1, 0", "cubic:2", ""):
        with pytest.raises(FieldError):
            parse_field_spec(bad)
    for spec in ("quad:-1", "quad:5", "poly:1,0,0,-2", "rational"):
        assert parse_field_spec(spec).spec == spec


def test_defining_polynomial():
    assert make_quadratic(5).defining_polynomial() == [1, -1, -1]
    assert make_quadratic(-1).defining_polynomial() == [1, 0, 1]


def test_field_invariants():
    inv = FieldInvariants.from_values(0.5, "RegressionEstimate", 0.01, 1.5, 1e-9)
    assert inv.mertens_constant == 0.5 / (2 * 1.5)
    assert inv.kappa_method is KappaMethod.REGRESSION
    with pytest.raises(FieldError):
        FieldInvariants.from_values(-1.0, "Exact", 0, 1.5, 0)
    with pytest.raises(FieldError):
        FieldInvariants.from_values(1.0, "Exact", 0, 0.9, 0)
    with pytest.raises(FieldError):
        FieldInvariants(1.0, KappaMethod.EXACT, 0, 2.0, 0, 0.3)
