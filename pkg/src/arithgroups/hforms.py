"""Families of local-invariant vectors that are pairwise globally distinct
but agree up to sign at every place.

Local classes at the chosen split places live in ``(1/ell)Z/Z`` with
generator ``b_v = 1/ell``; the character ``chi_v`` sends ``x`` to
``(ell/d) x`` in ``(1/d)Z/Z``, so ``chi_v(b_v) = 1/d``.  For
``eps in {+-1}^t`` the vector has the seed classes on ``V``, ``b`` at
``v'_0``, a balancing class at ``v''_0`` and ``+-eps_j b`` at ``v'_j``,
``v''_j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .errors import ArithGroupsError, PreconditionError
from .numfield import AlgebraicNumber, Place, QmodZ, quadratic_field, is_squarefree, splitting_type
from .rootsys import RootSystemType


class HFormsError(ArithGroupsError):
    module = "hforms"


class UnsupportedType(HFormsError, ValueError):
    pass


class Unbalanceable(HFormsError):
    pass


class NoSplitPlaces(HFormsError):
    pass


@dataclass(frozen=True)
class CenterData:
    group_type: RootSystemType
    ell: int
    d: int

    def __post_init__(self):
        if self.ell <= 2:
            raise PreconditionError("the construction needs ell > 2")
        if self.ell % self.d:
            raise PreconditionError(f"d = {self.d} does not divide ell = {self.ell}")

    def chi(self, x: QmodZ) -> QmodZ:
        """``chi_v`` on ``(1/ell)Z/Z``."""
        if (x.value * self.ell).denominator != 1:
            raise PreconditionError(f"{x} is not in (1/{self.ell})Z/Z")
        return QmodZ(x.value * Fraction(self.ell, self.d))

    def to_json(self) -> dict:
        t = self.group_type
        return {"type": f"{t.family}{t.rank}", "ell": self.ell, "d": self.d}


def center_order(t, d: Optional[int] = None) -> CenterData:
    t = RootSystemType.parse(t)
    if t.family == "A" and t.rank > 1:
        ell = t.rank + 1
    elif t.family == "D" and t.rank % 2 == 1 and t.rank >= 5:
        ell = 4
    elif t.family == "E" and t.rank == 6:
        ell = 3
    else:
        raise UnsupportedType(f"type {t.family}{t.rank} is not A_n (n>1), D_(2n+1) (n>1) or E6")
    return CenterData(t, ell, ell if d is None else int(d))


@dataclass
class PlaceLayout:
    seeds: Dict[Place, QmodZ]              # V with the classes chi-evaluated through CenterData.chi
    split_places: List[Place]              # v'_0, v''_0, v'_1, v''_1, ...
    b: Dict[Place, QmodZ]
    seed_labels: Dict[Place, str] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.split_places) // 2 - 1

    def validate(self, ell: int) -> None:
        if len(self.split_places) < 2 or len(self.split_places) % 2:
            raise PreconditionError("need 2(t+1) split places")
        if len(set(self.split_places)) != len(self.split_places):
            raise PreconditionError("split places must be distinct")
        if set(self.split_places) & set(self.seeds):
            raise PreconditionError("seed places and split places must be disjoint")
        for v in self.split_places:
            if v not in self.b or self.b[v].order != ell:
                raise PreconditionError(f"b at {v.label} must have order {ell}")

    def to_json(self) -> dict:
        return {"V": {v.label: {"invariant": str(x), "label": self.seed_labels.get(v, "")}
                      for v, x in sorted(self.seeds.items())},
                "V_t": [v.label for v in self.split_places],
                "b": {v.label: str(self.b[v]) for v in self.split_places}}


def simple_layout(t: int, ell: int, seeds: Optional[Mapping[Place, QmodZ]] = None) -> PlaceLayout:
    """Layout on the places over the first primes ``p = 1 mod ell`` (labels only)."""
    primes, p = [], 2
    while len(primes) < 2 * (t + 1):
        p = int(sympy.nextprime(p))
        if p % ell == 1:
            primes.append(p)
    places = [Place.finite(q) for q in primes]
    b = QmodZ(Fraction(1, ell))
    return PlaceLayout(dict(seeds or {}), places, {v: b for v in places})


@dataclass
class InvariantVector:
    components: Dict[Place, QmodZ]
    epsilon: Tuple[int, ...]

    def at(self, v: Place) -> QmodZ:
        return self.components.get(v, QmodZ(0))

    def to_json(self) -> dict:
        return {"epsilon": list(self.epsilon),
                "components": {v.label: str(x) for v, x in sorted(self.components.items())}}


def build_invariant_vector(layout: PlaceLayout, center: CenterData, epsilon: Sequence[int]) -> InvariantVector:
    layout.validate(center.ell)
    eps = tuple(int(e) for e in epsilon)
    if len(eps) != layout.t or any(e not in (1, -1) for e in eps):
        raise PreconditionError(f"epsilon must be a vector of {layout.t} signs")
    V_t = layout.split_places
    comps: Dict[Place, QmodZ] = {v: x for v, x in layout.seeds.items() if x}
    comps[V_t[0]] = layout.b[V_t[0]]
    s = sum((center.chi(x) for x in layout.seeds.values()), QmodZ(0)) + center.chi(layout.b[V_t[0]])
    # chi(j/ell) = j/d, so the balancing class is j/ell with j = -s*d mod d
    j = -s.value * center.d
    if j.denominator != 1:
        raise Unbalanceable(f"seed sum {s} is outside (1/{center.d})Z/Z")
    comps[V_t[1]] = QmodZ(Fraction(int(j) % center.d, center.ell))
    for k, e in enumerate(eps, start=1):
        comps[V_t[2 * k]] = layout.b[V_t[2 * k]] * e
        comps[V_t[2 * k + 1]] = -(layout.b[V_t[2 * k + 1]] * e)
    comps = {v: x for v, x in comps.items() if x}
    return InvariantVector(dict(sorted(comps.items())), eps)


def chi_sum(vec: InvariantVector, center: CenterData) -> QmodZ:
    return sum((center.chi(x) for x in vec.components.values()), QmodZ(0))


@dataclass
class FamilyReport:
    t: int
    count: int
    pairwise_globally_distinct: bool
    pairwise_locally_pm_equal: bool
    all_sums_zero: bool
    failures: List[str] = field(default_factory=list)
    theorem_backed: Tuple[str, ...] = (
        "each vector lifts to a global class with the given localizations",
        "distinct vectors up to sign give non-isomorphic forms",
    )

    @property
    def certified(self) -> bool:
        return self.pairwise_globally_distinct and self.pairwise_locally_pm_equal and self.all_sums_zero

    def to_json(self) -> dict:
        return {"t": self.t, "count": self.count, "globally_distinct": self.pairwise_globally_distinct,
                "locally_pm_equal": self.pairwise_locally_pm_equal, "sums_zero": self.all_sums_zero,
                "failures": self.failures, "theorem_backed": list(self.theorem_backed)}


def all_epsilons(t: int) -> List[Tuple[int, ...]]:
    """Sign vectors ordered by their binary string (``+1 -> 0``)."""
    return [tuple(-1 if c else 1 for c in bits) for bits in itertools.product((0, 1), repeat=t)]


def certify_family(layout: PlaceLayout, center: CenterData, t: Optional[int] = None) -> FamilyReport:
    if center.ell <= 2:
        raise PreconditionError("the construction needs ell > 2")
    t = layout.t if t is None else t
    if t != layout.t:
        raise PreconditionError(f"layout has t = {layout.t}, not {t}")
    vecs = [build_invariant_vector(layout, center, e) for e in all_epsilons(t)]
    failures = []
    sums_zero = True
    for x in vecs:
        if chi_sum(x, center):
            sums_zero = False
            failures.append(f"sum for {x.epsilon} is {chi_sum(x, center)}")
    places = sorted(set().union(*(x.components for x in vecs)) | set(layout.split_places))
    rows = [tuple(x.at(v).value for v in places) for x in vecs]
    negs = [tuple(QmodZ(-c).value for c in row) for row in rows]
    distinct = locally = True
    for (i, x), (j, y) in itertools.combinations(enumerate(vecs), 2):
        if rows[i] == rows[j] or rows[i] == negs[j]:
            distinct = False
            failures.append(f"{x.epsilon} and {y.epsilon} agree up to a global sign")
        bad = [v for v, a, b, nb in zip(places, rows[i], rows[j], negs[j]) if a != b and a != nb]
        if bad:
            locally = False
            failures.append(f"{x.epsilon} and {y.epsilon} differ beyond sign at {bad[0].label}")
    return FamilyReport(t, len(vecs), distinct, locally, sums_zero, failures)


# ---------------------------------------------------------------------------
# real quadratic scenario
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    layout: PlaceLayout
    center: CenterData
    notes: Dict[str, str]

    def to_json(self) -> dict:
        return {"center": self.center.to_json(), "layout": self.layout.to_json(), "notes": self.notes}


def _sqrt_roots_mod(d: int, p: int) -> List[int]:
    return sorted(r for r in sympy.sqrt_mod(d % p, p, all_roots=True))


def recipe_914(type, real_quadratic_d: int, t: int, L_datum=None, search_bound: int = 10 ** 5) -> Scenario:
    """Layout over ``K = Q(sqrt D)`` with ``L = K(sqrt e)``.

    ``L_datum`` is ``"inner"`` (default, ``e = sqrt D - 1``: split at the first
    real place, complex at the second), ``"outer"`` (``e = -1``: complex at
    both) or an explicit ``e`` in ``K``.  The place ``p_i`` of ``K`` over a split
    prime ``p`` sends ``sqrt D`` to the ``i``-th smallest square root of ``D``
    mod ``p``; it enters ``V_t`` when ``e`` is a nonzero square there.
    """
    center = center_order(type)
    D = int(real_quadratic_d)
    if D <= 1 or not is_squarefree(D):
        raise PreconditionError("need a squarefree integer D > 1")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    K = quadratic_field(D)
    c0, c1, _ = (int(x) for x in K.min_poly)
    f = sympy.sqrt(sympy.Rational(c1 * c1 - 4 * c0, D))
    # sqrt(D) = (2 theta + c1) / f, positive at the first real place
    s = (K.gen() * 2 + c1) * Fraction(1, int(f))
    if L_datum is None or L_datum == "inner":
        e, kind = s - 1, "inner"
    elif L_datum == "outer":
        e, kind = K(-1), "outer"
    else:
        e = L_datum if isinstance(L_datum, AlgebraicNumber) else K(Fraction(L_datum))
        kind = "explicit"
    if e.sign(1) >= 0:
        raise PreconditionError("L must be complex at the second real place")
    a0, a1 = (Fraction(c) for c in e.coords)
    places: List[Place] = []
    p = 2
    while len(places) < 2 * (t + 1):
        p = int(sympy.nextprime(p))
        if p > search_bound:
            raise NoSplitPlaces(f"found {len(places)} of {2 * (t + 1)} split places below {search_bound}")
        if splitting_type(D, p) != "split" or a0.denominator % p == 0 or a1.denominator % p == 0:
            continue
        for i, r in enumerate(_sqrt_roots_mod(D, p)):
            val = (a0.numerator * pow(a0.denominator, -1, p) + a1.numerator * pow(a1.denominator, -1, p) * r) % p
            if val and sympy.legendre_symbol(val, p) == 1:
                places.append(Place.finite(p, i))
                if len(places) == 2 * (t + 1):
                    break
    b = QmodZ(Fraction(1, center.ell))
    seeds = {Place.real(0): QmodZ(0), Place.real(1): QmodZ(0)}
    labels = {Place.real(0): "isomorphic_to_G", Place.real(1): "anisotropic"}
    layout = PlaceLayout(seeds, places, {v: b for v in places}, labels)
    notes = {"K": f"Q(sqrt({D}))", "L": f"K(sqrt({e}))", "L_kind": kind,
             "seeds": "archimedean classes declared by label with invariant 0"}
    if kind != "inner":
        notes["outer_form"] = "d defaults to ell; the generator order may be smaller for outer forms"
    return Scenario(layout, center, notes)
