from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from arithgroups.geodesics import (EllipticElement, ExactLog, MissingCharacterValue, QuaternionOrderBox, RealRamified,
                                   RootValueProfile, fuchsian_sample, length, lyapunov_vector, qspan_equal,
                                   rational_ratio, single_log_length)
from arithgroups.numfield import QQ, quadratic_field
from arithgroups.rootsys import build_root_system

mpmath.mp.prec = 200


def _contains(iv, x):
    return mpmath.mpf(iv.a) <= x <= mpmath.mpf(iv.b)


def _direct(p):
    """sqrt(sum (log|alpha|)^2) straight from floats of the exact values."""
    total = mpmath.mpf(0)
    for v in p.values.values():
        q = Fraction(v.to_rational())
        total += mpmath.log(abs(mpmath.mpf(q.numerator) / q.denominator)) ** 2
    return mpmath.sqrt(total)


def test_a1_length():
    p = RootValueProfile("A1", {(1,): 4, (-1,): Fraction(1, 4)})
    L = length(p)
    assert _contains(L.approx, 2 * mpmath.sqrt(2) * mpmath.log(2))
    assert L.single_log() == (Fraction(8), QQ(2))
    # log 6 = log 2 + log 3 is rank one even though the form has a cross term
    assert length(RootValueProfile.from_simple_values("A1", [6])).single_log() == (Fraction(2), QQ(6))
    assert length(RootValueProfile.from_simple_values("A2", [2, 3])).single_log() is None


def test_from_simple_values_a2():
    p = RootValueProfile.from_simple_values("A2", [2, 3])
    assert len(p.values) == 6 and p.values[(1, 1)] == QQ(6)
    L = length(p)
    assert _contains(L.approx, _direct(p))
    assert any(i != j for (i, j) in L.form)      # log 2 log 3 cross term
    with pytest.raises(Exception):
        L.exact_form


def test_elliptic_and_missing():
    with pytest.raises(EllipticElement):
        length(RootValueProfile.from_simple_values("B2", [-1, 1]))
    p = RootValueProfile("A2", {(1, 1): 5, (-1, -1): Fraction(1, 5)})
    with pytest.raises(MissingCharacterValue):
        p.character_value([1, 0])


def test_quadratic_values_and_embeddings():
    K = quadratic_field(2)
    u = 1 + K.gen()
    p0 = RootValueProfile.from_simple_values("A1", [u * u])
    p1 = RootValueProfile.from_simple_values("A1", [u * u], embedding=1)
    l0, l1 = length(p0), length(p1)
    ref = 2 * mpmath.sqrt(2) * mpmath.log(1 + mpmath.sqrt(2))
    assert _contains(l0.approx, ref) and _contains(l1.approx, ref)


def test_period_divisor():
    p = RootValueProfile.from_simple_values("A1", [9])
    L = length(p, period_divisor=2)
    assert _contains(L.approx, mpmath.sqrt(2) * mpmath.log(9) / 2)
    doc = L.to_json()
    assert doc["n_gamma"] == 2
    lo, hi = (mpmath.mpf(x) for x in doc["interval"])
    assert lo <= mpmath.sqrt(2) * mpmath.log(9) / 2 <= hi and hi - lo < 1e-28


def test_lyapunov_vector():
    p = RootValueProfile.from_simple_values("B2", [2, 3])
    v = lyapunov_vector(p)
    assert v[0] == ExactLog(Fraction(2), QQ(2)) and v[1] == ExactLog(Fraction(1), QQ(9))


simple_vals = st.fractions(min_value=Fraction(1, 6), max_value=12, max_denominator=6).filter(lambda q: q != 1)


@given(st.sampled_from(["A2", "B2", "G2"]), st.lists(simple_vals, min_size=2, max_size=2), st.integers(2, 3))
def test_length_properties(t, vals, n):
    p = RootValueProfile.from_simple_values(t, vals)
    L = length(p)
    assert _contains(L.approx, _direct(p))
    Ln = length(p.power(n))
    assert _contains(Ln.approx, n * _direct(p))
    assert _contains(length(p.power(-1)).approx, _direct(p))


@given(st.sampled_from(["A2", "B3", "C3"]), st.lists(simple_vals, min_size=3, max_size=3), st.data())
def test_weyl_invariance(t, vals, data):
    rs = build_root_system(t)
    vals = vals[:rs.rank]
    p = RootValueProfile.from_simple_values(t, vals)
    # w.gamma has alpha(w.gamma) = (w^-1 alpha)(gamma); any Weyl element permutes the roots
    w = data.draw(st.lists(st.integers(0, rs.rank - 1), max_size=5))
    moved = {}
    for r, v in p.values.items():
        image = r
        for i in w:
            image = rs.reflect(image, i)
        moved[tuple(image)] = v
    q = RootValueProfile(t, moved)
    assert length(q).approx.mid == pytest.approx(float(length(p).approx.mid), rel=1e-12)
    assert _contains(length(q).approx, _direct(p))


def test_qspan():
    l2, l8, l3 = (single_log_length(x) for x in (2, 8, 3))
    assert qspan_equal([l2], [l8]).verdict == "equal"
    r = qspan_equal([l2], [l3])
    assert r.verdict == "not_equal" and r.witness is l2
    assert qspan_equal([l2, l3], [l8, single_log_length(9)]).verdict == "equal"
    assert rational_ratio(single_log_length(2, 2), l8) == (False, None)
    assert rational_ratio(single_log_length(2, 8), single_log_length(4, 2)) == (True, None)


def _nrd_and_trace(box, x):
    h = Fraction(1, 2)
    a, b = box.a, box.b
    if a.denominator == 1 and a.numerator % 4 == 1:
        y = [x[0] + h * x[1], h * x[1], x[2] + h * x[3], h * x[3]]
    else:
        y = [Fraction(c) for c in x]
    return y[0] ** 2 - a * y[1] ** 2 - b * y[2] ** 2 + a * b * y[3] ** 2, 2 * y[0]


def test_fuchsian_matrix_algebra():
    box = QuaternionOrderBox(1, 1, 3)
    rows = fuchsian_sample(box)
    traces = [r.trace for r in rows]
    assert len(set(traces)) == len(traces) and min(traces) == 3
    first = rows[0]
    assert _contains(first.length_std.approx, 2 * mpmath.acosh(mpmath.mpf(3) / 2))
    assert _contains(first.length_killing.approx, 2 * mpmath.sqrt(2) * mpmath.acosh(mpmath.mpf(3) / 2))
    for r in rows:
        nrd, tr = _nrd_and_trace(box, r.element)
        assert nrd == 1 and abs(tr) == r.trace
    assert [r.length_std.approx.mid for r in rows] == sorted(r.length_std.approx.mid for r in rows)


def test_fuchsian_division_algebra():
    box = QuaternionOrderBox(2, 3, 2)
    rows = fuchsian_sample(box)
    assert rows
    for r in rows:
        nrd, tr = _nrd_and_trace(box, r.element)
        assert nrd == 1 and abs(tr) == r.trace > 2


def test_fuchsian_edges():
    assert fuchsian_sample(QuaternionOrderBox(1, 1, 0)) == []
    with pytest.raises(RealRamified):
        fuchsian_sample(QuaternionOrderBox(-1, -1, 2))
    with pytest.raises(Exception):
        QuaternionOrderBox(0, 1, 2)


prime_powers = st.tuples(st.sampled_from([2, 3, 6, 12]), st.integers(1, 3)).map(lambda x: x[0] ** x[1])


@given(prime_powers, prime_powers)
def test_equal_length_spans_force_weak_commensurability(a, b):
    from arithgroups.mulrel import is_weakly_commensurable
    p1 = RootValueProfile.from_simple_values("A1", [a])
    p2 = RootValueProfile.from_simple_values("A1", [b])
    verdict = qspan_equal([length(p1)], [length(p2)]).verdict
    assert verdict != "undecided"
    if verdict == "equal":
        assert is_weakly_commensurable([QQ(a)], [QQ(b)]).answer
    else:
        assert not is_weakly_commensurable([QQ(a)], [QQ(b)]).answer
