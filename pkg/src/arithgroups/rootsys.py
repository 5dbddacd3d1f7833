"""Irreducible reduced root systems, Weyl groups and automorphism groups.

Roots are integer vectors in simple-root coordinates: the ``i``-th simple
root is the ``i``-th unit vector and every root has all coefficients of one
sign.  The inner product is the Gram matrix of the simple roots, scaled so
that short roots have squared length 2.  The Cartan matrix is
``A[i][j] = 2 (a_i, a_j) / (a_j, a_j)`` and the simple reflection ``s_j``
sends ``v`` to ``v - (sum_i v_i A[i][j]) e_j``.

Group elements are stored as permutations of the root list.  Since roots
span the space, a permutation determines the linear map.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import ArithGroupsError, PreconditionError, SizeLimit

DEFAULT_CAP = 10 ** 6


class RootSysError(ArithGroupsError):
    module = "rootsys"


class InvalidType(RootSysError, ValueError):
    pass


class DimensionMismatch(RootSysError, ValueError):
    pass


class NotDiagramAutomorphism(RootSysError, ValueError):
    pass


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        f, n = self.family, self.rank
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 2,
            "D": n >= 3,
            "E": 6 <= n <= 8,
            "F": n == 4,
            "G": n == 2,
        }.get(f, False)
        if not ok or n > 12:
            raise InvalidType(f"no root system of type {f}{n} at desk scale")

    @classmethod
    def parse(cls, text: Union[str, "RootSystemType"]) -> "RootSystemType":
        if isinstance(text, RootSystemType):
            return text
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", str(text))
        if not m:
            raise InvalidType(f"cannot parse root system type {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def simply_laced(self) -> bool:
        return self.family in "ADE"

    def weyl_order(self) -> int:
        """Closed-form order of the Weyl group (product of the degrees)."""
        n = self.rank
        f = self.family
        if f == "A":
            return math.factorial(n + 1)
        if f in "BC":
            return 2 ** n * math.factorial(n)
        if f == "D":
            return 2 ** (n - 1) * math.factorial(n)
        return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
                ("F", 4): 1152, ("G", 2): 12}[(f, n)]

    def root_count(self) -> int:
        n = self.rank
        f = self.family
        if f == "A":
            return n * (n + 1)
        if f in "BC":
            return 2 * n * n
        if f == "D":
            return 2 * n * (n - 1)
        return {("E", 6): 72, ("E", 7): 126, ("E", 8): 240, ("F", 4): 48, ("G", 2): 12}[(f, n)]


def _gram(t: RootSystemType) -> List[List[int]]:
    n, f = t.rank, t.family
    B = [[0] * n for _ in range(n)]

    def edge(i, j, v):
        B[i][j] = B[j][i] = v

    if f == "A":
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 1):
            edge(i, i + 1, -1)
    elif f == "B":
        for i in range(n):
            B[i][i] = 4 if i < n - 1 else 2
        for i in range(n - 1):
            edge(i, i + 1, -2)
    elif f == "C":
        for i in range(n):
            B[i][i] = 2 if i < n - 1 else 4
        for i in range(n - 2):
            edge(i, i + 1, -1)
        edge(n - 2, n - 1, -2)
    elif f == "D":
        for i in range(n):
            B[i][i] = 2
        for i in range(n - 2):
            edge(i, i + 1, -1)
        edge(n - 3, n - 1, -1)
    elif f == "E":
        for i in range(n):
            B[i][i] = 2
        for i, j in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]:
            if i <= n and j <= n:
                edge(i - 1, j - 1, -1)
    elif f == "F":
        for i, d in enumerate([4, 4, 2, 2]):
            B[i][i] = d
        edge(0, 1, -2)
        edge(1, 2, -2)
        edge(2, 3, -1)
    elif f == "G":
        B = [[2, -3], [-3, 6]]
    return B


# ---------------------------------------------------------------------------
# root systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrthoGroupElement:
    """A root-set-preserving linear map in simple-root coordinates.

    ``matrix`` acts on column coordinate vectors; ``permutation`` lists the
    index of the image of each root.
    """

    matrix: Tuple[Tuple[int, ...], ...]
    permutation: Tuple[int, ...]

    def __mul__(self, other: "OrthoGroupElement") -> "OrthoGroupElement":
        perm = tuple(self.permutation[i] for i in other.permutation)
        mat = tuple(tuple(int(x) for x in row) for row in linalg.mat_mul(self.matrix, other.matrix))
        return OrthoGroupElement(mat, perm)


class RootSystem:
    """Root system of a given Cartan type in simple-root coordinates."""

    def __init__(self, t: RootSystemType):
        self.type = t
        n = t.rank
        self.rank = n
        self.inner_product: List[List[int]] = _gram(t)
        B = self.inner_product
        self.cartan_matrix: List[List[int]] = [[2 * B[i][j] // B[j][j] for j in range(n)] for i in range(n)]
        self.simple_roots: List[Tuple[int, ...]] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        self.roots: List[Tuple[int, ...]] = self._close()
        self.index: Dict[Tuple[int, ...], int] = {r: k for k, r in enumerate(self.roots)}
        self.simple_indices = [self.index[a] for a in self.simple_roots]

    # geometry ------------------------------------------------------------
    def ip(self, u: Sequence, v: Sequence):
        B = self.inner_product
        return sum(u[i] * B[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j])

    def reflect(self, v: Sequence[int], j: int) -> Tuple[int, ...]:
        A = self.cartan_matrix
        c = sum(v[i] * A[i][j] for i in range(self.rank))
        out = list(v)
        out[j] -= c
        return tuple(out)

    def reflection_matrix(self, j: int) -> List[List[int]]:
        n = self.rank
        M = [[int(i == k) for k in range(n)] for i in range(n)]
        for i in range(n):
            M[j][i] -= self.cartan_matrix[i][j]
        return M

    def _close(self) -> List[Tuple[int, ...]]:
        seen = set(self.simple_roots)
        frontier = list(self.simple_roots)
        while frontier:
            nxt = []
            for v in frontier:
                for j in range(self.rank):
                    w = self.reflect(v, j)
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        pos = sorted((r for r in seen if sum(r) > 0), key=lambda r: (sum(r), r))
        return pos + [tuple(-x for x in r) for r in pos]

    @property
    def positive_roots(self) -> List[Tuple[int, ...]]:
        return self.roots[: len(self.roots) // 2]

    def squared_length(self, r: Sequence[int]) -> int:
        return self.ip(r, r)

    @cached_property
    def short_length(self) -> int:
        return min(self.squared_length(r) for r in self.positive_roots)

    def is_short(self, r: Sequence[int]) -> bool:
        return self.squared_length(r) == self.short_length

    # group elements ------------------------------------------------------
    def perm_of_matrix(self, M: Sequence[Sequence]) -> Optional[Tuple[int, ...]]:
        """Root permutation induced by ``M``, or ``None`` if ``M`` does not preserve the roots."""
        perm = []
        for r in self.roots:
            img = tuple(linalg.mat_vec(M, r))
            if any(Fraction(x).denominator != 1 for x in img):
                return None
            k = self.index.get(tuple(int(x) for x in img))
            if k is None:
                return None
            perm.append(k)
        return tuple(perm)

    def matrix_of_perm(self, perm: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        cols = [self.roots[perm[k]] for k in self.simple_indices]
        return tuple(tuple(int(cols[j][i]) for j in range(self.rank)) for i in range(self.rank))

    def element(self, M: Sequence[Sequence]) -> OrthoGroupElement:
        perm = self.perm_of_matrix(M)
        if perm is None:
            raise PreconditionError("matrix does not preserve the root set")
        return OrthoGroupElement(self.matrix_of_perm(perm), perm)

    def element_from_perm(self, perm: Sequence[int]) -> OrthoGroupElement:
        perm = tuple(int(x) for x in perm)
        return OrthoGroupElement(self.matrix_of_perm(perm), perm)

    def simple_reflection(self, j: int) -> OrthoGroupElement:
        return self.element(self.reflection_matrix(j))

    def minus_identity(self) -> OrthoGroupElement:
        n = self.rank
        return self.element([[-int(i == j) for j in range(n)] for i in range(n)])

    def identity(self) -> OrthoGroupElement:
        n = self.rank
        return self.element([[int(i == j) for j in range(n)] for i in range(n)])

    def diagram_automorphisms(self) -> List[Tuple[int, ...]]:
        """Permutations of the simple roots preserving the Cartan matrix."""
        return _cartan_preserving_perms(self.cartan_matrix)

    def diagram_element(self, p: Sequence[int]) -> OrthoGroupElement:
        n = self.rank
        M = [[int(p[j] == i) for j in range(n)] for i in range(n)]
        return self.element(M)

    def to_json(self) -> dict:
        return {
            "type": str(self.type),
            "roots": [list(r) for r in self.roots],
            "simple": [list(a) for a in self.simple_roots],
            "cartan": [list(row) for row in self.cartan_matrix],
        }

    def __repr__(self) -> str:
        return f"RootSystem({self.type})"


def _cartan_preserving_perms(A: List[List[int]]) -> List[Tuple[int, ...]]:
    n = len(A)
    found: List[Tuple[int, ...]] = []

    def extend(prefix: List[int]):
        k = len(prefix)
        if k == n:
            found.append(tuple(prefix))
            return
        for c in range(n):
            if c in prefix or A[c][c] != A[k][k]:
                continue
            if all(A[prefix[i]][c] == A[i][k] and A[c][prefix[i]] == A[k][i] for i in range(k)):
                extend(prefix + [c])

    extend([])
    return found


_CACHE: Dict[RootSystemType, RootSystem] = {}


def build_root_system(t: Union[RootSystemType, str]) -> RootSystem:
    t = RootSystemType.parse(t)
    if t not in _CACHE:
        _CACHE[t] = RootSystem(t)
    return _CACHE[t]


# ---------------------------------------------------------------------------
# finite groups of root permutations
# ---------------------------------------------------------------------------

class PermGroup:
    """A finite group of root permutations, enumerated by closure."""

    def __init__(self, rs: RootSystem, generators: Iterable[Sequence[int]], cap: int = DEFAULT_CAP):
        self.rs = rs
        m = len(rs.roots)
        dtype = np.int16
        gens = [np.asarray(g, dtype=dtype) for g in generators]
        self.generators = gens
        ident = np.arange(m, dtype=dtype)
        seen = {ident.tobytes(): 0}
        elems = [ident]
        frontier = np.array([ident])
        while len(frontier):
            new_rows = []
            for g in gens:
                prod = g[frontier]   # g o x
                for row in prod:
                    key = row.tobytes()
                    if key not in seen:
                        seen[key] = len(elems)
                        elems.append(row)
                        new_rows.append(row)
                        if len(elems) > cap:
                            raise SizeLimit(f"group exceeds {cap} elements")
            frontier = np.array(new_rows) if new_rows else np.empty((0, m), dtype=dtype)
        self.perms = np.array(elems)
        self._lookup = seen

    @property
    def order(self) -> int:
        return len(self.perms)

    def __contains__(self, perm) -> bool:
        return np.asarray(perm, dtype=np.int16).tobytes() in self._lookup

    def elements(self) -> List[OrthoGroupElement]:
        return [self.rs.element_from_perm(p) for p in self.perms]

    def conjugacy_classes(self) -> int:
        """Number of conjugacy classes, by orbit partition under conjugation."""
        N = self.order
        rows, cols = [], []
        X = self.perms
        for g in self.generators:
            ginv = np.argsort(g).astype(np.int16)
            conj = g[X[:, ginv]]   # g x g^-1
            idx = np.fromiter((self._lookup[r.tobytes()] for r in conj), dtype=np.int64, count=N)
            rows.append(np.arange(N))
            cols.append(idx)
        if not rows:
            return N
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N))
        ncomp, _ = connected_components(graph, directed=True, connection="weak")
        return int(ncomp)


@dataclass
class WeylGroupData:
    order: int
    nontrivial_conjugacy_classes: int
    group: PermGroup

    @property
    def elements(self) -> List[OrthoGroupElement]:
        return self.group.elements()


def _check_cap(rs: RootSystem, expected: int, cap: int) -> None:
    if expected > cap:
        raise SizeLimit(f"|W({rs.type})| = {expected} exceeds the cap {cap}")


def weyl_perm_group(rs: RootSystem, cap: int = DEFAULT_CAP) -> PermGroup:
    _check_cap(rs, rs.type.weyl_order(), cap)
    return PermGroup(rs, [rs.simple_reflection(j).permutation for j in range(rs.rank)], cap)


def aut_perm_group(rs: RootSystem, cap: int = DEFAULT_CAP) -> PermGroup:
    diag = rs.diagram_automorphisms()
    _check_cap(rs, rs.type.weyl_order() * len(diag), cap)
    gens = [rs.simple_reflection(j).permutation for j in range(rs.rank)]
    gens += [rs.diagram_element(p).permutation for p in diag if list(p) != list(range(rs.rank))]
    return PermGroup(rs, gens, cap)


def weyl_group(rs: RootSystem, cap: int = DEFAULT_CAP) -> WeylGroupData:
    G = weyl_perm_group(rs, cap)
    return WeylGroupData(G.order, G.conjugacy_classes() - 1, G)


def longest_element(rs: RootSystem) -> List[List[int]]:
    """Matrix of the longest Weyl element, built by descending to antidominance."""
    n = rs.rank
    rho = [sum(r[i] for r in rs.positive_roots) for i in range(n)]
    v = list(rho)
    W = [[int(i == j) for j in range(n)] for i in range(n)]
    B = rs.inner_product
    while True:
        j = next((j for j in range(n) if sum(v[i] * B[i][j] for i in range(n)) > 0), None)
        if j is None:
            break
        v = list(rs.reflect(v, j))
        W = linalg.mat_mul(rs.reflection_matrix(j), W)
    return [[int(x) for x in row] for row in W]


def minus_identity_in_weyl(rs: RootSystem) -> bool:
    n = rs.rank
    return longest_element(rs) == [[-int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class AutomorphismStructure:
    aut_order: int
    quotient_order: int
    quotient_descriptor: str


def automorphism_structure(rs: RootSystem, cap: int = DEFAULT_CAP) -> AutomorphismStructure:
    """Order of Aut(Phi) and the isomorphism class of Aut(Phi)/W(Phi).

    Aut(Phi) is the semidirect product of W with the diagram automorphisms,
    so the quotient is the diagram automorphism group.
    """
    _check_cap(rs, rs.type.weyl_order(), cap)
    q = len(rs.diagram_automorphisms())
    if q == 1:
        desc = "trivial"
    elif q == 2:
        desc = "order2_other" if minus_identity_in_weyl(rs) else "order2_minus_identity"
    elif q == 6:
        desc = "S3"
    else:
        raise RootSysError(f"unexpected diagram automorphism group of order {q}")
    return AutomorphismStructure(rs.type.weyl_order() * q, q, desc)


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

def _perms_of(subgroup: Iterable, rs: RootSystem) -> List[Tuple[int, ...]]:
    out = []
    for g in subgroup:
        if isinstance(g, OrthoGroupElement):
            out.append(g.permutation)
        else:
            perm = rs.perm_of_matrix(g)
            if perm is None:
                raise PreconditionError("element does not preserve the root set")
            out.append(perm)
    return out


def contains_weyl(subgroup: Iterable, rs: RootSystem, cap: int = DEFAULT_CAP) -> bool:
    """True iff the group generated by ``subgroup`` contains every simple reflection."""
    G = PermGroup(rs, _perms_of(subgroup, rs), cap)
    return all(rs.simple_reflection(j).permutation in G for j in range(rs.rank))


def acts_irreducibly(subgroup: Iterable, rs: RootSystem, cap: int = DEFAULT_CAP,
                     seed: int = 0) -> bool:
    """Decide exactly whether the generated group acts irreducibly on Q[Phi]."""
    perms = _perms_of(subgroup, rs)
    PermGroup(rs, perms, cap)   # enforces the size cap
    mats = [rs.matrix_of_perm(p) for p in perms]
    return is_irreducible_module(mats, rs.rank, seed=seed)


# ---------------------------------------------------------------------------
# exact irreducibility test (rational MeatAxe)
# ---------------------------------------------------------------------------

def _spin(vectors: List[List[Fraction]], mats: List[linalg.Mat]) -> int:
    """Dimension of the smallest subspace containing ``vectors`` stable under ``mats``."""
    basis = linalg.row_basis(vectors)
    queue = list(basis)
    while queue:
        v = queue.pop()
        for M in mats:
            w = linalg.mat_vec(M, v)
            if linalg.rank(basis + [w]) > len(basis):
                basis = linalg.row_basis(basis + [w])
                queue.append(w)
    return len(basis)


def _factor_rational(coeffs: List[Fraction]) -> List[Tuple[List[Fraction], int]]:
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x, domain="QQ")
    out = []
    for f, e in poly.factor_list()[1]:
        f = f.monic()
        out.append(([Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())], e))
    return out


def is_irreducible_module(mats: Sequence[Sequence[Sequence]], n: int, seed: int = 0,
                          attempts: int = 40) -> bool:
    """Norton's irreducibility test over Q for the algebra generated by ``mats``.

    For a random algebra element ``a`` and an irreducible factor ``f`` of its
    characteristic polynomial, any nonzero ``v`` in ``ker f(a)`` generates
    a submodule; a proper one proves reducibility.  When ``dim ker f(a)``
    equals ``deg f`` and both ``v`` and some ``w`` in ``ker f(a)^T`` (under
    the transposed action) generate everything, the module is irreducible.
    """
    if n <= 1:
        return True
    gens = [linalg.fmat(M) for M in mats]
    if not gens:
        return False
    gens_t = [linalg.transpose(M) for M in gens]
    rng = random.Random(seed)
    ident = linalg.identity(n)
    products = [ident] + gens
    for _ in range(2):
        products += [linalg.mat_mul(A, B) for A in products[:6] for B in gens]
    for attempt in range(attempts):
        a = [[Fraction(0)] * n for _ in range(n)]
        for P in rng.sample(products, min(len(products), 4)):
            c = rng.randint(-3, 3) or 1
            a = [[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip(a, P)]
        for f, _ in _factor_rational(linalg.charpoly(a)):
            fa = linalg.poly_at_matrix(f, a)
            N = linalg.nullspace(fa)
            if _spin([N[0]], gens) < n:
                return False
            if len(N) == len(f) - 1:
                Nt = linalg.nullspace(linalg.transpose(fa))
                return _spin([Nt[0]], gens_t) == n
    # fall back on exhausting every kernel vector of every factor
    for P in products:
        for f, _ in _factor_rational(linalg.charpoly(P)):
            for v in linalg.nullspace(linalg.poly_at_matrix(f, P)):
                if _spin([v], gens) < n:
                    return False
    return True


# ---------------------------------------------------------------------------
# matching root systems under a linear map
# ---------------------------------------------------------------------------

SPAN_ONLY = "SpanOnly"
NO_MATCH = "NoMatch"
_SPAN_ONLY_TYPES = {("B", 2), ("C", 2), ("F", 4), ("G", 2)}


def match_root_systems(linear_map: Sequence[Sequence], rs1: RootSystem, rs2: RootSystem):
    """Find ``t`` with ``t * linear_map`` carrying the roots of ``rs1`` onto those of ``rs2``.

    Returns a positive :class:`Fraction`, or ``"SpanOnly"`` for the doubly
    laced exceptions when root lines go to root lines but no rescaling is
    onto, or ``"NoMatch"``.
    """
    M = linalg.fmat(linear_map)
    if len(M) != rs2.rank or any(len(r) != rs1.rank for r in M):
        raise DimensionMismatch(f"map must be {rs2.rank}x{rs1.rank}")
    if linalg.rank(M) != rs1.rank or rs1.rank != rs2.rank:
        return NO_MATCH
    images = [linalg.mat_vec(M, r) for r in rs1.roots]
    target = set(rs2.roots)
    a0 = next(i for i, r in enumerate(rs1.roots) if rs1.is_short(r))
    v0 = images[a0]
    k = next(i for i, x in enumerate(v0) if x != 0)
    for beta in rs2.roots:
        if beta[k] == 0:
            continue
        t = Fraction(beta[k]) / v0[k]
        if t <= 0:
            continue
        if all(t * x == b for x, b in zip(v0, beta)):
            if all(tuple(int(t * x) if (t * x).denominator == 1 else None for x in v) in target
                   for v in images):
                return t
    if (rs1.type.family, rs1.type.rank) in _SPAN_ONLY_TYPES and _lines_to_lines(images, rs2):
        return SPAN_ONLY
    return NO_MATCH


def _lines_to_lines(images: List[List[Fraction]], rs2: RootSystem) -> bool:
    lines = {tuple(linalg.clear_denominators(r)) for r in rs2.roots}
    lines |= {tuple(-x for x in l) for l in lines}
    return all(tuple(linalg.clear_denominators(v)) in lines for v in images)


# ---------------------------------------------------------------------------
# star action
# ---------------------------------------------------------------------------

@dataclass
class StarAction:
    """Permutations of the simple-root indices ``0..rank-1``."""

    generators: List[Tuple[int, ...]]

    def group_elements(self, rank: int) -> List[Tuple[int, ...]]:
        ident = tuple(range(rank))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in self.generators:
                    h = tuple(s[g[i]] for i in range(rank))
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return sorted(seen)


def star_orbits(action: StarAction, rs: RootSystem) -> List[List[int]]:
    """Orbits of the simple-root indices under the generated group."""
    A = rs.cartan_matrix
    n = rs.rank
    for g in action.generators:
        if sorted(g) != list(range(n)) or any(A[g[i]][g[j]] != A[i][j] for i in range(n) for j in range(n)):
            raise NotDiagramAutomorphism(f"{list(g)} does not preserve the Cartan matrix")
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in action.generators:
        for i in range(n):
            a, b = find(i), find(g[i])
            if a != b:
                parent[max(a, b)] = min(a, b)
    orbits: Dict[int, List[int]] = {}
    for i in range(n):
        orbits.setdefault(find(i), []).append(i)
    return sorted(orbits.values())
