"""Tits index data and local-to-global rank aggregation.

Vertices are the simple roots numbered ``1..rank`` (Bourbaki order).  An
index datum is a partition of the vertices into *-orbits together with the
set of distinguished vertices, which must be a union of whole orbits.  A
family assigns data to finitely many places; every other place is treated
as quasi-split.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ArithGroupsError
from .numfield import Place
from .rootsys import RootSystemType, StarAction, build_root_system, star_orbits


class TitsError(ArithGroupsError):
    module = "titsindex"


class InconsistentOrbits(TitsError, ValueError):
    pass


Orbit = FrozenSet[int]

# types whose global rank is the minimum of the local ranks
APPLICABLE_FAMILIES = ("B", "C")
APPLICABLE_EXCEPTIONAL = ("E8", "F4", "G2")


def _orbit(o: Iterable) -> Orbit:
    return frozenset(_vertex(x) for x in o)


def _vertex(x) -> int:
    if isinstance(x, str):
        return int(x.lstrip("aα"))
    return int(x)


def _label(o: Orbit) -> List[str]:
    return [f"a{i}" for i in sorted(o)]


@dataclass(frozen=True)
class IndexDatum:
    type: RootSystemType
    orbits: Tuple[Orbit, ...]
    distinguished: FrozenSet[int]

    def __init__(self, type, orbits=None, distinguished=()):
        t = RootSystemType.parse(type)
        if orbits is None:
            orbits = [[i] for i in range(1, t.rank + 1)]
        orbs = tuple(sorted((_orbit(o) for o in orbits), key=lambda o: sorted(o)))
        dist = frozenset(_vertex(x) for o in distinguished
                         for x in (o if isinstance(o, (list, tuple, set, frozenset)) else [o]))
        object.__setattr__(self, "type", t)
        object.__setattr__(self, "orbits", orbs)
        object.__setattr__(self, "distinguished", dist)

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(range(1, self.type.rank + 1))

    def distinguished_orbits(self) -> List[Orbit]:
        return [o for o in self.orbits if o <= self.distinguished]

    @property
    def quasi_split(self) -> bool:
        return self.distinguished == self.vertices

    def to_json(self) -> dict:
        return {"type": f"{self.type.family}{self.type.rank}",
                "orbits": [_label(o) for o in self.orbits],
                "distinguished": [_label(o) for o in self.distinguished_orbits()]}


@dataclass
class IndexReport:
    ok: bool
    violation: Optional[str] = None
    quasi_split: bool = False

    def __bool__(self) -> bool:
        return self.ok


def validate_index(d: IndexDatum) -> IndexReport:
    seen: set = set()
    for o in d.orbits:
        if not o:
            return IndexReport(False, "empty orbit")
        if o & seen:
            return IndexReport(False, f"orbit {_label(o)} overlaps another orbit")
        seen |= o
    if seen != d.vertices:
        return IndexReport(False, f"orbits cover {sorted(seen)}, not 1..{d.type.rank}")
    for o in d.orbits:
        if o & d.distinguished and not o <= d.distinguished:
            return IndexReport(False, f"orbit {_label(o)} is only partly distinguished")
    return IndexReport(True, None, d.quasi_split)


@dataclass
class LocalIndexFamily:
    type: RootSystemType
    orbits: Tuple[Orbit, ...]
    per_place: Dict[Place, IndexDatum] = field(default_factory=dict)

    def __post_init__(self):
        self.type = RootSystemType.parse(self.type)
        self.orbits = IndexDatum(self.type, self.orbits, ()).orbits
        self.per_place = {v if isinstance(v, Place) else Place.parse(v): d for v, d in self.per_place.items()}

    def validate(self) -> None:
        glob = IndexDatum(self.type, self.orbits, ())
        rep = validate_index(glob)
        if not rep:
            raise InconsistentOrbits(f"global orbits: {rep.violation}")
        for v, d in self.per_place.items():
            if d.type != self.type:
                raise InconsistentOrbits(f"datum at {v.label} has type {d.type.family}{d.type.rank}")
            rep = validate_index(d)
            if not rep:
                raise InconsistentOrbits(f"datum at {v.label}: {rep.violation}")
            for o in d.orbits:
                if not any(o <= g for g in self.orbits):
                    raise InconsistentOrbits(f"local orbit {_label(o)} at {v.label} is not inside a global orbit")

    def to_json(self) -> dict:
        return {"type": f"{self.type.family}{self.type.rank}",
                "orbits": [_label(o) for o in self.orbits],
                "places": {v.label: {"orbits": [_label(o) for o in d.orbits],
                                     "distinguished": [_label(o) for o in d.distinguished_orbits()]}
                           for v, d in sorted(self.per_place.items())}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "LocalIndexFamily":
        t = RootSystemType.parse(doc["type"])
        orbits = doc.get("orbits") or [[i] for i in range(1, t.rank + 1)]
        per = {}
        for label, pd in doc.get("places", {}).items():
            per[Place.parse(label)] = IndexDatum(t, pd.get("orbits", orbits), pd.get("distinguished", []))
        return cls(t, orbits, per)


def everywhere_distinguished(f: LocalIndexFamily) -> Tuple[List[Orbit], int]:
    """Global orbits whose vertices are distinguished at every listed place."""
    f.validate()
    out = [o for o in f.orbits if all(o <= d.distinguished for d in f.per_place.values())]
    return out, len(out)


def formula_applicable(t: RootSystemType) -> bool:
    t = RootSystemType.parse(t)
    return t.family in APPLICABLE_FAMILIES or f"{t.family}{t.rank}" in APPLICABLE_EXCEPTIONAL


@dataclass
class MinRankReport:
    min_local_rank: int
    equals_global: bool
    formula_applicable: bool

    def to_json(self) -> dict:
        return {"min_local_rank": self.min_local_rank, "equals_global": self.equals_global,
                "formula_applicable": self.formula_applicable}


def min_rank_check(f: LocalIndexFamily) -> MinRankReport:
    _, global_rank = everywhere_distinguished(f)
    ranks = [len(d.distinguished_orbits()) for d in f.per_place.values()]
    # unlisted places are quasi-split and contribute every global orbit
    ranks.append(len(f.orbits))
    m = min(ranks)
    return MinRankReport(m, m == global_rank, formula_applicable(f.type))


# ---------------------------------------------------------------------------
# synthetic families
# ---------------------------------------------------------------------------

def _chain(t: RootSystemType) -> Optional[List[FrozenSet[int]]]:
    """Nested distinguished sets used for the applicable types."""
    n = t.rank
    if t.family == "B":
        return [frozenset(range(1, k + 1)) for k in range(n + 1)]
    if t.family == "C":
        even = [frozenset(range(1, k + 1)) for k in range(0, n, 2)]
        return even + [frozenset(range(1, n + 1))]
    name = f"{t.family}{n}"
    if name == "F4":
        return [frozenset(), frozenset({4}), frozenset({1, 2, 3, 4})]
    if name == "G2":
        return [frozenset(), frozenset({1, 2})]
    if name == "E8":
        return [frozenset(), frozenset({8}), frozenset({1, 8}), frozenset({1, 6, 7, 8}), frozenset(range(1, 9))]
    return None


def _global_orbits(t: RootSystemType, rng: random.Random) -> List[Orbit]:
    rs = build_root_system(t)
    auts = [p for p in rs.diagram_automorphisms() if list(p) != list(range(t.rank))]
    if auts and rng.random() < 0.5:
        orbs = star_orbits(StarAction([tuple(rng.choice(auts))]), rs)
        return [frozenset(i + 1 for i in o) for o in orbs]
    return [frozenset({i}) for i in range(1, t.rank + 1)]


@dataclass
class SyntheticFamily:
    family: LocalIndexFamily
    planted: List[Orbit]


def synthetic_family(t, rng: random.Random, n_places: int = 4) -> SyntheticFamily:
    """A family built from a planted global distinguished set.

    For applicable types the local sets are drawn from a fixed chain, the
    planted set is a chain member and occurs at some place.  Otherwise the
    local sets are random supersets and each non-planted orbit is missed at
    some place.
    """
    t = RootSystemType.parse(t)
    chain = _chain(t)
    places = [Place.finite(p) for p in rng.sample([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31], n_places)]
    if chain is not None:
        orbits = [frozenset({i}) for i in range(1, t.rank + 1)]
        k = rng.randrange(len(chain))
        planted_set = chain[k]
        local = [planted_set] + [rng.choice(chain[k:]) for _ in places[1:]]
        rng.shuffle(local)
        per = {v: IndexDatum(t, [[i] for i in range(1, t.rank + 1)], s) for v, s in zip(places, local)}
        planted = [o for o in orbits if o <= planted_set]
        return SyntheticFamily(LocalIndexFamily(t, orbits, per), planted)
    orbits = _global_orbits(t, rng)
    planted = [o for o in orbits if rng.random() < 0.4]
    rest = [o for o in orbits if o not in planted]
    missed_at = {o: rng.randrange(len(places)) for o in rest}
    per = {}
    for i, v in enumerate(places):
        # locally the *-action may shrink to the trivial one
        split = rng.random() < 0.3
        loc_orbits = [frozenset({x}) for o in orbits for x in o] if split else list(orbits)
        dist = set().union(*planted) if planted else set()
        for o in rest:
            if missed_at[o] != i and rng.random() < 0.6:
                dist |= o
        if split:
            for o in rest:
                if missed_at[o] != i:
                    dist |= {x for x in o if rng.random() < 0.5}
                else:
                    dist -= o
        per[v] = IndexDatum(t, loc_orbits, dist)
    return SyntheticFamily(LocalIndexFamily(t, orbits, per), sorted(planted, key=sorted))
