from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithgroups.brauer import (BaseMismatch, CSAInvariants, EvenDegree, ExtensionLocalDegrees, InvalidDegree,
                                NotSplit, build_example_65, build_example_66, compare, corpus_agreement,
                                embeds_as_maximal_subfield, validate_csa)
from arithgroups.numfield import QQ, Place, QmodZ, quadratic_field

P = Place.finite


def test_validate_violations():
    assert validate_csa(CSAInvariants(QQ, 2, {P(2): Fraction(1, 2), "inf0": Fraction(1, 2)})).ok
    r = validate_csa(CSAInvariants(QQ, 2, {P(2): Fraction(1, 2)}))
    assert not r and "sum" in r.violation
    r = validate_csa(CSAInvariants(QQ, 3, {P(2): Fraction(1, 2), P(3): Fraction(1, 2)}))
    assert not r and "order" in r.violation
    r = validate_csa(CSAInvariants(QQ, 4, {"inf0": Fraction(1, 4), P(3): Fraction(3, 4)}))
    assert not r and "real" in r.violation
    K = quadratic_field(-1)
    r = validate_csa(CSAInvariants(K, 2, {"cplx0": Fraction(1, 2), P(5, 0): Fraction(1, 2)}))
    assert not r and "complex" in r.violation
    assert not validate_csa(CSAInvariants(QQ, 0, {}))


def test_invariants_are_mod_one():
    a = CSAInvariants(QQ, 3, {P(2): Fraction(4, 3), P(5): Fraction(-1, 3), P(7): 0})
    assert a.support == [P(2), P(5)]
    assert a.inv(P(2)) == a.inv(P(5)).__neg__()
    assert a.index() == 3
    assert P(7) in a.split_places() and P(2) not in a.split_places()


def test_example_65():
    a, b = build_example_65(3, [5, 7, 11, 13])
    assert compare(a, b).as_tuple() == (False, False, True, True)
    assert validate_csa(a) and validate_csa(b)
    assert corpus_agreement(a, b)[0]
    assert corpus_agreement(a, b)[1] == 2 ** 4


def test_example_65_quaternionic():
    a, b = build_example_65(4, [5, 7, 11, 13], quaternionic=True, extra_places=[P(17)])
    assert validate_csa(a) and validate_csa(b)
    assert a.inv(Place.real(0)) == QmodZ(Fraction(1, 2))
    assert compare(a, b).as_tuple() == (False, False, True, True)
    with pytest.raises(InvalidDegree):
        build_example_65(2, [5, 7, 11, 13])
    with pytest.raises(InvalidDegree):
        build_example_65(5, [5, 7, 11, 13], quaternionic=True, extra_places=[P(17)])


def test_example_65_d4_not_anti_isomorphic():
    a, b = build_example_65(4, [5, 7, 11, 13])
    assert compare(a, b).as_tuple() == (False, False, True, True)


def test_example_66():
    d1, d2, ev1, ev2 = build_example_66(3, -1, [5, 13])
    assert compare(d1.algebra, d2.algebra).as_tuple() == (False, False, True, True)
    assert validate_csa(d1.algebra) and validate_csa(d2.algebra)
    profile = {w: 3 for w in ev1.places}
    assert ev1(profile) and ev2(profile)
    profile[ev1.places[0]] = 1
    assert not ev1(profile) and not ev2(profile)
    with pytest.raises(EvenDegree):
        build_example_66(4, -1, [5, 13])
    with pytest.raises(NotSplit):
        build_example_66(3, -1, [5, 7])


def test_compare_requires_same_base():
    a = CSAInvariants(QQ, 2, {})
    with pytest.raises(BaseMismatch):
        compare(a, CSAInvariants(QQ, 3, {}))


def test_json_roundtrip():
    a, _ = build_example_65(5, [2, 3, 7, 11])
    assert CSAInvariants.from_json(a.to_json()) == a


@st.composite
def algebras(draw, d=6):
    places = [P(p) for p in (2, 3, 5, 7)]
    nums = draw(st.lists(st.integers(0, d - 1), min_size=3, max_size=3))
    inv = {v: Fraction(n, d) for v, n in zip(places, nums)}
    inv[places[3]] = -sum(inv.values())
    return CSAInvariants(QQ, d, inv)


@given(algebras())
def test_generated_algebras_valid(a):
    assert validate_csa(a)
    assert a.opposite().opposite() == a
    assert compare(a, a.opposite()).anti_isomorphic
    assert compare(a, a).as_tuple() == (True, a == a.opposite(), True, True)


@given(algebras(), algebras())
def test_corpus_agreement_matches_orders(a, b):
    same_orders = compare(a, b).same_maximal_subfields
    assert corpus_agreement(a, b)[0] == same_orders


def test_embedding_needs_full_local_degree():
    a = CSAInvariants(QQ, 4, {P(2): Fraction(1, 4), P(3): Fraction(3, 4)})
    assert embeds_as_maximal_subfield(ExtensionLocalDegrees(4, {P(2): 4, P(3): 4}), a)
    assert not embeds_as_maximal_subfield(ExtensionLocalDegrees(4, {P(2): 4, P(3): 2}), a)
