from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithgroups import rootsys
from arithgroups.errors import SizeLimit
from arithgroups.rootsys import (NO_MATCH, SPAN_ONLY, InvalidType, NotDiagramAutomorphism, RootSystemType,
                                 StarAction, build_root_system)

TYPES = ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4"]


@pytest.mark.parametrize("t", TYPES + ["E6", "D5", "B4"])
def test_root_counts_and_reflections_close(t):
    rs = build_root_system(t)
    assert len(rs.roots) == rs.type.root_count()
    roots = set(rs.roots)
    for j in range(rs.rank):
        assert {tuple(rs.reflect(r, j)) for r in rs.roots} == roots


@pytest.mark.parametrize("t", TYPES)
def test_cartan_integrality(t):
    rs = build_root_system(t)
    for a in rs.roots:
        for b in rs.roots:
            v = Fraction(2 * rs.ip(a, b), rs.ip(b, b))
            assert v.denominator == 1 and abs(v) <= 3


def test_invalid_types():
    for bad in ["A0", "B1", "C2x", "D2", "E9", "F5", "G3", "Z2"]:
        with pytest.raises(InvalidType):
            RootSystemType.parse(bad)


@pytest.mark.parametrize("t,desc", [("A3", "order2_minus_identity"), ("D4", "S3"), ("D6", "order2_other"),
                                    ("B3", "trivial"), ("G2", "trivial"), ("E6", "order2_minus_identity")])
def test_aut_quotient(t, desc):
    rs = build_root_system(t)
    st_ = rootsys.automorphism_structure(rs)
    assert st_.quotient_descriptor == desc
    assert st_.aut_order == rs.type.weyl_order() * st_.quotient_order


def test_minus_identity():
    assert rootsys.minus_identity_in_weyl(build_root_system("B3"))
    assert not rootsys.minus_identity_in_weyl(build_root_system("A2"))
    assert rootsys.minus_identity_in_weyl(build_root_system("D4"))
    assert not rootsys.minus_identity_in_weyl(build_root_system("D5"))


def test_size_cap():
    with pytest.raises(SizeLimit):
        rootsys.weyl_group(build_root_system("E6"), cap=1000)


def test_match_examples():
    a2 = build_root_system("A2")
    assert rootsys.match_root_systems([[1, 0], [0, 1]], a2, a2) == 1
    assert rootsys.match_root_systems([[3, 0], [0, 3]], a2, a2) == Fraction(1, 3)
    b2 = build_root_system("B2")
    assert rootsys.match_root_systems([[0, 1], [2, 0]], b2, b2) == SPAN_ONLY
    assert rootsys.match_root_systems([[1, 1], [0, 1]], a2, a2) == NO_MATCH


@given(st.sampled_from(["A2", "A3", "B2", "G2"]), st.integers(0, 10 ** 6), st.integers(1, 5))
def test_match_recovers_weyl_scaling(t, seed, k):
    """A Weyl element scaled by k is matched with t = 1/k."""
    import random
    rs = build_root_system(t)
    rng = random.Random(seed)
    g = rs.identity()
    for _ in range(6):
        g = g * rs.simple_reflection(rng.randrange(rs.rank))
    M = [[k * x for x in row] for row in g.matrix]
    assert rootsys.match_root_systems(M, rs, rs) == Fraction(1, k)


def test_star_orbits():
    a3 = build_root_system("A3")
    assert rootsys.star_orbits(StarAction([(2, 1, 0)]), a3) == [[0, 2], [1]]
    d4 = build_root_system("D4")
    tri = [p for p in d4.diagram_automorphisms() if p[0] != 0 and p[2] != 2 and p[3] != 3]
    assert rootsys.star_orbits(StarAction([tri[0]]), d4) == [[0, 2, 3], [1]]
    with pytest.raises(NotDiagramAutomorphism):
        rootsys.star_orbits(StarAction([(1, 0, 2)]), a3)


def test_irreducibility_and_weyl_containment():
    rs = build_root_system("A3")
    gens = [rs.simple_reflection(j) for j in range(3)]
    assert rootsys.contains_weyl(gens, rs)
    assert not rootsys.contains_weyl(gens[:2], rs)
    assert rootsys.acts_irreducibly(gens, rs)
    assert not rootsys.acts_irreducibly(gens[:2], rs)    # fixes a line
    assert not rootsys.acts_irreducibly([rs.minus_identity()], rs)


def test_irreducible_module_oracle():
    # the regular representation of Z/3 splits over Q; the 2-dim rotation block does not
    P = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    assert not rootsys.is_irreducible_module([P], 3)
    R = [[0, -1], [1, -1]]
    assert rootsys.is_irreducible_module([R], 2)
