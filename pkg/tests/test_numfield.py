from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from arithgroups.numfield import (QQ, AlgebraicNumber, FieldTooLarge, MixedFields, NotIrreducible, NumberField,
                                  Place, QmodZ, compositum, cyclotomic_field, embed, log_abs, quadratic_field,
                                  splitting_type, squarefree_part, trace_field, valuation)

rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def test_valuation_examples():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(1, 9), 3) == -2
    assert valuation(7, 5) == 0


@pytest.mark.parametrize("d,p,kind", [(-1, 5, "split"), (-1, 3, "inert"), (-1, 2, "ramified"),
                                      (5, 5, "ramified"), (17, 2, "split"), (5, 2, "inert"), (2, 7, "split")])
def test_splitting_type(d, p, kind):
    assert splitting_type(d, p) == kind


@given(st.integers(-60, 60).filter(lambda d: d not in (0, 1) and squarefree_part(d) == d),
       st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23]))
def test_splitting_matches_factorization_mod_p(d, p):
    # independent oracle: the number of roots of x^2 - d mod p
    roots = [x for x in range(p) if (x * x - d) % p == 0]
    kind = splitting_type(d, p)
    assert kind == {0: "inert", 1: "ramified", 2: "split"}[len(roots)]


def test_sqrt2_enclosures_contain_true_roots():
    K = quadratic_field(2)
    s = K.gen()
    with mpmath.workprec(200):
        assert embed(s, Place.real(0), 128).a <= mpmath.sqrt(2) <= embed(s, Place.real(0), 128).b
        assert embed(s, Place.real(1), 128).a <= -mpmath.sqrt(2) <= embed(s, Place.real(1), 128).b


def test_signature_and_places():
    assert quadratic_field(2).signature() == (2, 0)
    assert quadratic_field(-3).signature() == (0, 1)
    K5 = cyclotomic_field(5)
    assert K5.degree == 4 and K5.signature() == (0, 2)


def test_rejects_reducible_and_large():
    with pytest.raises(NotIrreducible):
        NumberField([-1, 0, 1])
    with pytest.raises(FieldTooLarge):
        NumberField([2] + [0] * 8 + [1])


@given(rat, rat, rat, rat)
def test_quadratic_arithmetic_matches_sympy(a, b, c, e):
    K = quadratic_field(3)
    s = K.gen()
    x, y = K(a) + s * b, K(c) + s * e
    r = sympy.sqrt(3)
    X = sympy.Rational(a.numerator, a.denominator) + sympy.Rational(b.numerator, b.denominator) * r
    Y = sympy.Rational(c.numerator, c.denominator) + sympy.Rational(e.numerator, e.denominator) * r
    for ours, ref in ((x * y, X * Y), (x + y, X + Y), (x - y, X - Y)):
        q0, q1 = ours.coords
        assert sympy.simplify(q0 + q1 * r - ref) == 0
    if not y.is_zero():
        q0, q1 = (x / y).coords
        assert sympy.simplify(q0 + q1 * r - X / Y) == 0
    assert x.norm() == Fraction(a) ** 2 - 3 * Fraction(b) ** 2


def test_mixed_fields_rejected():
    with pytest.raises(MixedFields):
        quadratic_field(2).gen() + quadratic_field(3).gen()


def test_qmodz_group_laws():
    a, b = QmodZ(Fraction(1, 3)), QmodZ(Fraction(5, 6))
    assert (a + b).value == Fraction(1, 6)
    assert (-a).value == Fraction(2, 3)
    assert (a * 3).value == 0 and a.order == 3
    assert QmodZ(Fraction(7, 2)).value == Fraction(1, 2)


def test_place_labels_round_trip():
    for v in (Place.finite(5), Place.finite(13, 1), Place.real(0), Place.complex(2)):
        assert Place.parse(v.label) == v
    assert sorted([Place.finite(7), Place.real(0), Place.finite(5)])[0] == Place.real(0)


def test_trace_fields():
    assert trace_field([[[2, 1], [1, 1]]], 3).field.is_rational
    K = quadratic_field(2)
    s = K.gen()
    g = [[1 + s, K(0)], [K(0), (1 + s).inverse()]]
    assert trace_field([g], 3).field.degree == 2
    # adjoint traces of diag(u, u^-1) with u = 1 + sqrt2 are rational: (u + 1/u)^2 - 1 = 7
    assert trace_field([g], 3, representation="adjoint").field.is_rational
    # unipotents with sqrt2 off the diagonal: traces 2 and 2 + (sqrt2)^2 = 4 are rational
    u1 = [[K(1), s], [K(0), K(1)]]
    u2 = [[K(1), K(0)], [s, K(1)]]
    assert trace_field([u1, u2], 4).field.is_rational


def test_compositum_of_two_quadratics():
    C = compositum(quadratic_field(2), quadratic_field(3))
    assert C.field.degree == 4
    a, b = C.image1, C.image2
    assert a * a == C.field(2) and b * b == C.field(3)


def test_log_abs_interval():
    K = quadratic_field(2)
    u = 1 + K.gen()
    I = log_abs(u, 0, 100)
    with mpmath.workprec(200):
        assert I.a <= mpmath.log(1 + mpmath.sqrt(2)) <= I.b
        J = log_abs(u, 1, 100)
        assert J.a <= mpmath.log(mpmath.sqrt(2) - 1) <= J.b


def test_minpoly_and_automorphism():
    K = quadratic_field(5)
    s = K.gen()
    phi = (1 + s) / 2
    assert phi.minpoly() == [-1, -1, 1]
    assert phi.apply_automorphism(-s) * phi == K(-1)
