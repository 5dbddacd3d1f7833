import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithgroups import linalg
from arithgroups.mulrel import (MultiplicativeTuple, SearchBudget, ZeroValue, is_root_of_unity,
                                is_weakly_commensurable, log_ratio_rational, monomial, relation_lattice)
from arithgroups.numfield import QQ, cyclotomic_field, quadratic_field

K2 = quadratic_field(2)
S2 = K2.gen()
KI = quadratic_field(-1)
I = KI.gen()


def test_relation_examples():
    assert relation_lattice([QQ(2), QQ(4)]).basis == [[2, -1]]
    R = relation_lattice([QQ(2), QQ(3)])
    assert R.basis == [] and R.certified
    R = relation_lattice([QQ(-1), QQ(2)])
    assert R.basis == [[1, 0]] and R.torsion_orders == [2]


def test_relation_units_and_torsion():
    u = 1 + S2
    R = relation_lattice(MultiplicativeTuple([u, -(u ** 3)], K2))
    assert R.certified and R.rank == 1
    assert R.contains([3, -1]) or R.contains([-3, 1])
    R = relation_lattice(MultiplicativeTuple([I, 1 + I, KI(2)], KI))
    assert R.certified
    for row, k in zip(R.basis, R.torsion_orders):
        assert monomial([I, 1 + I, KI(2)], row, KI) ** k == KI.one()
    # (1+i)^2 = 2i, so (2, 0, -1) plus i's torsion span the lattice
    assert R.contains([1, 2, -1]) and R.contains([4, 0, 0])
    # (3+4i)/5 has absolute value 1 but is not a root of unity
    R = relation_lattice(MultiplicativeTuple([(3 + 4 * I) / 5], KI))
    assert R.rank == 0 and R.certified


def test_zero_rejected():
    with pytest.raises(ZeroValue):
        relation_lattice([QQ(0), QQ(2)])


def test_roots_of_unity():
    assert is_root_of_unity(QQ(-1)) == 2
    assert is_root_of_unity(I) == 4
    z = cyclotomic_field(5).gen()
    assert is_root_of_unity(z) == 5
    assert is_root_of_unity(-z) == 10
    assert is_root_of_unity(1 + S2) is None


nonzero_rat = st.fractions(min_value=-40, max_value=40, max_denominator=9).filter(lambda q: q != 0)


@given(st.lists(nonzero_rat, min_size=1, max_size=3))
def test_rational_lattice_matches_brute_force(vals):
    R = relation_lattice([QQ(v) for v in vals])
    for exps in itertools.product(range(-3, 4), repeat=len(vals)):
        x = Fraction(1)
        for v, e in zip(vals, exps):
            x *= Fraction(v) ** e
        assert (abs(x) == 1) == R.contains(list(exps))


def _pos_monomials(bases):
    return st.lists(st.lists(st.integers(-2, 2), min_size=len(bases), max_size=len(bases)), min_size=1, max_size=2)


@given(_pos_monomials([2, 3, 5]), _pos_monomials([2, 3, 5]), st.integers(1, 3))
def test_weak_commensurability_properties(m1, m2, k):
    bases = [QQ(2), QQ(3), QQ(5)]
    e1 = [monomial(bases, m, QQ) for m in m1]
    e2 = [monomial(bases, m, QQ) for m in m2]
    a = is_weakly_commensurable(e1, e2)
    # symmetric and stable under powers
    assert a.answer == is_weakly_commensurable(e2, e1).answer
    assert a.answer == is_weakly_commensurable([x ** k for x in e1], e2).answer
    # exact oracle: the exponent spans in Q^3 meet nontrivially
    M1 = [m for m in m1 if any(m)]
    M2 = [m for m in m2 if any(m)]
    expected = bool(M1 and M2) and linalg.rank(M1) + linalg.rank(M2) > linalg.rank(M1 + M2)
    assert a.answer == expected
    if a.answer:
        v1 = monomial(e1, a.m, QQ)
        assert v1 == monomial(e2, a.n, QQ) and is_root_of_unity(v1) is None
    else:
        assert a.completeness == "certified"


def test_weak_commensurability_examples():
    r = is_weakly_commensurable([QQ(2), QQ(Fraction(1, 2))], [QQ(8), QQ(Fraction(1, 8))])
    assert r.answer and r.common_value in (QQ(8), QQ(Fraction(1, 8)))
    r = is_weakly_commensurable([QQ(2), QQ(Fraction(1, 2))], [QQ(3), QQ(Fraction(1, 3))])
    assert not r.answer and r.completeness == "certified"
    assert is_weakly_commensurable([QQ(-1)], [QQ(-1)], mode="strict").answer
    assert not is_weakly_commensurable([QQ(-1)], [QQ(-1)], mode="neat").answer


def test_weak_commensurability_across_fields():
    K3 = quadratic_field(3)
    r = is_weakly_commensurable([1 + S2], [2 + K3.gen()])
    assert not r.answer and r.completeness == "certified"
    r = is_weakly_commensurable([1 + S2], [(1 + S2) ** 4, QQ(7)])
    assert r.answer


def test_log_ratio():
    assert log_ratio_rational(QQ(2), QQ(8)).ratio == Fraction(1, 3)
    r = log_ratio_rational(QQ(2), QQ(3))
    assert r.ratio is None and r.completeness == "certified"
    assert log_ratio_rational(QQ(5), QQ(5)).ratio == 1
    assert log_ratio_rational((1 + S2) ** 2, 3 + 2 * S2).ratio == 1


def test_small_budget_reports_bound():
    b = SearchBudget(exponent_bound=3, precision_bits=64)
    R = relation_lattice(MultiplicativeTuple([1 + S2, 3 + 2 * S2], K2), b)
    assert R.contains([2, -1])


@given(_pos_monomials([2, 3, 5]), _pos_monomials([2, 3, 5]),
       st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2))
def test_weak_commensurability_isogeny_stable(m1, m2, M):
    # a nonsingular integer map on characters of the torus of e1
    if M[0][0] * M[1][1] - M[0][1] * M[1][0] == 0 or len(m1) != 2:
        return
    bases = [QQ(2), QQ(3), QQ(5)]
    e1 = [monomial(bases, m, QQ) for m in m1]
    e2 = [monomial(bases, m, QQ) for m in m2]
    image = [monomial(e1, row, QQ) for row in M]
    assert is_weakly_commensurable(e1, e2).answer == is_weakly_commensurable(image, e2).answer
