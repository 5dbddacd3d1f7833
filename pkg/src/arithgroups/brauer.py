"""Central simple algebras over number fields described by local invariants.

An algebra of degree ``d`` is recorded by the finitely many places where its
Hasse invariant is nonzero.  Extensions are recorded only by their local
degrees.  The maximal-subfield test is the local annihilation criterion: a
degree ``d`` extension embeds iff every local degree is divisible by the
order of the local invariant at that place.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from .errors import ArithGroupsError, PreconditionError
from .numfield import QQ, NumberField, Place, QmodZ, quadratic_field, splitting_type


class BrauerError(ArithGroupsError):
    module = "brauer"


class DegreeMismatch(BrauerError, ValueError):
    pass


class BaseMismatch(BrauerError, ValueError):
    pass


class InvalidDegree(BrauerError, ValueError):
    pass


class EvenDegree(BrauerError, ValueError):
    pass


class NotSplit(BrauerError, ValueError):
    pass


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CSAInvariants:
    base_field: NumberField
    degree: int
    invariants: Mapping[Place, QmodZ]

    def __init__(self, base_field: NumberField, degree: int, invariants: Mapping):
        inv = {}
        for v, x in invariants.items():
            v = v if isinstance(v, Place) else Place.parse(v)
            x = QmodZ(x)
            if x:
                inv[v] = x
        object.__setattr__(self, "base_field", base_field)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "invariants", dict(sorted(inv.items())))

    def inv(self, v: Place) -> QmodZ:
        return self.invariants.get(v, QmodZ(0))

    @property
    def support(self) -> List[Place]:
        return list(self.invariants)

    def opposite(self) -> "CSAInvariants":
        return CSAInvariants(self.base_field, self.degree, {v: -x for v, x in self.invariants.items()})

    def index(self) -> int:
        """Schur index: the lcm of the local orders."""
        out = 1
        for x in self.invariants.values():
            out = sympy.ilcm(out, x.order)
        return int(out)

    def split_places(self) -> "CoFinitePlaceSet":
        return CoFinitePlaceSet(frozenset(self.invariants))

    def to_json(self) -> dict:
        return {"field": self.base_field.label if self.base_field.is_rational else self.base_field.poly_str,
                "degree": self.degree,
                "invariants": {v.label: str(x) for v, x in self.invariants.items()}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "CSAInvariants":
        f = doc.get("field", "Q")
        K = QQ if f in ("Q", "x") else NumberField(f)
        return cls(K, doc["degree"], {Place.parse(k): Fraction(v) for k, v in doc["invariants"].items()})


@dataclass(frozen=True)
class CoFinitePlaceSet:
    """All places except a finite excluded set."""

    excluded: frozenset

    def __contains__(self, v: Place) -> bool:
        return v not in self.excluded

    def to_json(self) -> dict:
        return {"all_places_except": sorted(v.label for v in sorted(self.excluded))}


@dataclass(frozen=True)
class ExtensionLocalDegrees:
    degree: int
    local_degrees: Mapping[Place, int]

    def __post_init__(self):
        for v, n in self.local_degrees.items():
            if n <= 0 or self.degree % n:
                raise PreconditionError(f"local degree {n} at {v} does not divide {self.degree}")


@dataclass
class ValidationReport:
    ok: bool
    violation: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def validate_csa(a: CSAInvariants) -> ValidationReport:
    """Check degree, local orders, archimedean restrictions and reciprocity."""
    if a.degree < 1:
        return ValidationReport(False, f"degree {a.degree} is not positive")
    r1, r2 = a.base_field.signature()
    for v, x in a.invariants.items():
        if a.degree % x.order:
            return ValidationReport(False, f"invariant {x} at {v} has order not dividing {a.degree}")
        if v.kind == "real":
            if v.index >= r1:
                return ValidationReport(False, f"{v} is not a real place of {a.base_field.label}")
            if x != QmodZ(Fraction(1, 2)):
                return ValidationReport(False, f"real place {v} carries {x}, outside (1/2)Z/Z")
        elif v.kind == "complex":
            return ValidationReport(False, f"complex place {v} carries nonzero invariant {x}")
    total = sum(a.invariants.values(), QmodZ(0))
    if total:
        return ValidationReport(False, f"invariants sum to {total}, not 0")
    return ValidationReport(True)


def embeds_as_maximal_subfield(ext: ExtensionLocalDegrees, a: CSAInvariants) -> bool:
    if ext.degree != a.degree:
        raise DegreeMismatch(f"extension degree {ext.degree} != algebra degree {a.degree}")
    for v, x in a.invariants.items():
        if v not in ext.local_degrees:
            raise PreconditionError(f"no local degree recorded at {v}")
        if ext.local_degrees[v] % x.order:
            return False
    return True


@dataclass(frozen=True)
class Comparison:
    isomorphic: bool
    anti_isomorphic: bool
    same_maximal_subfields: bool
    same_split_places: bool

    def as_tuple(self) -> Tuple[bool, bool, bool, bool]:
        return (self.isomorphic, self.anti_isomorphic, self.same_maximal_subfields, self.same_split_places)

    def to_json(self) -> dict:
        return {"isomorphic": self.isomorphic, "anti_isomorphic": self.anti_isomorphic,
                "same_maximal_subfields": self.same_maximal_subfields,
                "same_split_places": self.same_split_places}


def compare(a: CSAInvariants, b: CSAInvariants) -> Comparison:
    if a.base_field != b.base_field or a.degree != b.degree:
        raise BaseMismatch("algebras must share base field and degree")
    places = set(a.invariants) | set(b.invariants)
    return Comparison(
        isomorphic=all(a.inv(v) == b.inv(v) for v in places),
        anti_isomorphic=all(a.inv(v) == -b.inv(v) for v in places),
        same_maximal_subfields=all(a.inv(v).order == b.inv(v).order for v in places),
        same_split_places=set(a.invariants) == set(b.invariants),
    )


def extension_corpus(places: Sequence[Place], degree: int,
                     choices: Optional[Sequence[int]] = None) -> Iterable[ExtensionLocalDegrees]:
    """Every local-degree profile over ``places`` with degrees from ``choices``.

    ``choices`` defaults to all divisors of ``degree``.
    """
    choices = list(choices) if choices is not None else [int(x) for x in sympy.divisors(degree)]
    for combo in itertools.product(choices, repeat=len(places)):
        yield ExtensionLocalDegrees(degree, dict(zip(places, combo)))


def corpus_agreement(a: CSAInvariants, b: CSAInvariants,
                     choices: Optional[Sequence[int]] = None) -> Tuple[bool, int]:
    """Whether ``a`` and ``b`` accept exactly the same profiles; returns (agree, profiles checked)."""
    places = sorted(set(a.invariants) | set(b.invariants))
    count = 0
    for ext in extension_corpus(places, a.degree, choices):
        count += 1
        if embeds_as_maximal_subfield(ext, a) != embeds_as_maximal_subfield(ext, b):
            return False, count
    return True, count


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def build_example_65(d: int, places: Sequence[Place], base_field: NumberField = QQ,
                     quaternionic: bool = False, extra_places: Sequence[Place] = ()):
    """Two degree-``d`` algebras with equal invariant orders but different invariants.

    Both carry ``+-1/d`` at four finite places: the first has ``+1/d`` at
    places 1, 2 and the second at places 1, 3.  With ``quaternionic`` (``d``
    even) both also carry ``1/2`` at the real place ``inf0`` and at a fifth
    finite place given in ``extra_places``.
    """
    if d <= 2:
        raise InvalidDegree("the construction needs d > 2")
    places = [v if isinstance(v, Place) else Place.finite(int(v)) for v in places]
    if len(places) != 4 or len(set(places)) != 4 or not all(v.is_finite for v in places):
        raise PreconditionError("need four distinct finite places")
    v1, v2, v3, v4 = places
    q = Fraction(1, d)
    inv1 = {v1: q, v2: q, v3: -q, v4: -q}
    inv2 = {v1: q, v3: q, v2: -q, v4: -q}
    if quaternionic:
        if d % 2:
            raise InvalidDegree("the quaternionic variant needs even d")
        extra = [v if isinstance(v, Place) else Place.finite(int(v)) for v in extra_places]
        if len(extra) != 1 or extra[0] in places or not extra[0].is_finite:
            raise PreconditionError("the quaternionic variant needs one further finite place")
        if base_field.signature()[0] == 0:
            raise PreconditionError("the quaternionic variant needs a real place")
        for inv in (inv1, inv2):
            inv[Place.real(0)] = Fraction(1, 2)
            inv[extra[0]] = Fraction(1, 2)
    return CSAInvariants(base_field, d, inv1), CSAInvariants(base_field, d, inv2)


@dataclass
class InvolutionPairData:
    """A degree-``d`` algebra over the quadratic field ``L`` together with its split-place pairs."""

    algebra: CSAInvariants
    K: NumberField
    L: NumberField
    split_place_pairs: List[Tuple[Place, Place, Place]]   # (v over K, v', v'' over L)
    quasi_split_at_nonsplit_real_places: bool = True

    def to_json(self) -> dict:
        return {"algebra": self.algebra.to_json(),
                "split_place_pairs": [[v.label, a.label, b.label] for v, a, b in self.split_place_pairs],
                "quasi_split_at_nonsplit_real_places": self.quasi_split_at_nonsplit_real_places}


def admits_unitary_involution(data: InvolutionPairData) -> bool:
    """Corestriction to ``K`` is trivial: invariants cancel across each split pair
    and vanish at places of ``L`` outside the pairs."""
    a = data.algebra
    paired = set()
    for _, w1, w2 in data.split_place_pairs:
        if a.inv(w1) + a.inv(w2):
            return False
        paired.update((w1, w2))
    return all(v in paired for v in a.invariants)


class InvolutionEmbeddingEvaluator:
    """Test for degree-``d`` extensions of ``L`` carrying an involution over ``K``.

    A profile assigns local degrees to the places of ``L`` over the chosen
    split places; the extension embeds compatibly with the involution iff
    every such local degree is a multiple of the order of the invariant.
    """

    def __init__(self, data: InvolutionPairData):
        self.data = data

    @property
    def places(self) -> List[Place]:
        return [w for _, a, b in self.data.split_place_pairs for w in (a, b)]

    def __call__(self, profile: Mapping[Place, int]) -> bool:
        a = self.data.algebra
        ext = ExtensionLocalDegrees(a.degree, dict(profile))
        return embeds_as_maximal_subfield(ext, a)


def build_example_66(d: int, L_d: int, split_primes: Sequence[int]):
    """Two algebras over ``L = Q(sqrt L_d)`` of odd degree ``d``, plus evaluators.

    ``split_primes`` are two rational primes split in ``L``; their places in
    ``L`` are ``p_0`` and ``p_1``.  The first algebra has ``+1/d`` at both
    ``p_0`` places, the second at ``p1_0`` and ``p2_1``.
    """
    if d <= 1:
        raise InvalidDegree("degree must exceed 1")
    if d % 2 == 0:
        raise EvenDegree("the construction needs odd d")
    if len(split_primes) != 2 or split_primes[0] == split_primes[1]:
        raise PreconditionError("need two distinct split primes")
    for p in split_primes:
        if splitting_type(L_d, p) != "split":
            raise NotSplit(f"{p} does not split in Q(sqrt({L_d}))")
    L = quadratic_field(L_d)
    pairs = [(Place.finite(p), Place.finite(p, 0), Place.finite(p, 1)) for p in split_primes]
    (_, a1, b1), (_, a2, b2) = pairs
    q = Fraction(1, d)
    D1 = CSAInvariants(L, d, {a1: q, a2: q, b1: -q, b2: -q})
    D2 = CSAInvariants(L, d, {a1: q, b2: q, b1: -q, a2: -q})
    data1 = InvolutionPairData(D1, QQ, L, pairs)
    data2 = InvolutionPairData(D2, QQ, L, pairs)
    return data1, data2, InvolutionEmbeddingEvaluator(data1), InvolutionEmbeddingEvaluator(data2)
