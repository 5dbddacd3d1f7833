"""Multiplicative relations among algebraic numbers.

The relation lattice of ``(x_1, ..., x_n)`` is the set of exponent vectors
``e`` with ``prod x_i^e_i`` a root of unity.  It is computed in two stages:

* a finite stage, the integer kernel of the matrix of valuations at the
  prime ideals dividing the values (exact);
* an archimedean stage on that kernel, where interval logarithms of all
  embeddings and LLL reduction propose candidates that are then verified
  by exact powering.

The answer is *certified* complete when an interval minor shows that the
log map has the largest rank compatible with the verified relations.
Otherwise a pruned enumeration of the exponent box ``[-B, B]^n`` runs and
the answer is reported relative to the bound actually searched.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from mpmath import iv, mp
from sympy.polys.domains import ZZ
from sympy.polys.factortools import dup_zz_hensel_lift

from . import linalg
from .errors import ArithGroupsError, PreconditionError
from .numfield import (QQ, AlgebraicNumber, FieldTooLarge, NumberField, PrecisionExhausted,
                       _precision, compositum, is_prime, log_abs, to_number)

log = logging.getLogger(__name__)


class MulRelError(ArithGroupsError):
    module = "mulrel"


class ZeroValue(MulRelError, ValueError):
    pass


__all__ = [
    "SearchBudget", "MultiplicativeTuple", "RelationLattice", "relation_lattice",
    "is_root_of_unity", "is_weakly_commensurable", "log_ratio_rational",
    "WeakCommensurability", "LogRatio", "PrecisionExhausted", "FieldTooLarge",
]


@dataclass(frozen=True)
class SearchBudget:
    exponent_bound: int = 20
    prime_bound: int = 10 ** 4
    precision_bits: int = 128
    node_cap: int = 2 * 10 ** 5

    def __post_init__(self):
        if min(self.exponent_bound, self.prime_bound, self.precision_bits) <= 0:
            raise PreconditionError("budget entries must be positive")


DEFAULT_BUDGET = SearchBudget()


class MultiplicativeTuple:
    """Nonzero elements of a common number field."""

    def __init__(self, values: Sequence, field: Optional[NumberField] = None):
        if field is None:
            field = next((v.field for v in values if isinstance(v, AlgebraicNumber)
                          and not v.field.is_rational), QQ)
        self.field = field
        self.values: List[AlgebraicNumber] = [to_number(v, field) for v in values]
        if any(v.is_zero() for v in self.values):
            raise ZeroValue("multiplicative tuples must be nonzero")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def product(self, exps: Sequence[int]) -> AlgebraicNumber:
        return monomial(self.values, exps, self.field)

    def lifted(self, lift) -> "MultiplicativeTuple":
        return MultiplicativeTuple([lift(v) for v in self.values])


def monomial(values: Sequence[AlgebraicNumber], exps: Sequence[int], field: NumberField) -> AlgebraicNumber:
    out = field.one()
    for v, e in zip(values, exps):
        if e:
            out = out * v ** int(e)
    return out


# ---------------------------------------------------------------------------
# roots of unity
# ---------------------------------------------------------------------------

def is_root_of_unity(x: AlgebraicNumber) -> Optional[int]:
    """Exact multiplicative order of ``x`` if finite, else ``None``."""
    if x.is_zero():
        raise ZeroValue("zero is not a unit")
    if x.is_rational():
        q = x.to_rational()
        return 1 if q == 1 else 2 if q == -1 else None
    if abs(x.norm()) != 1:
        return None
    mp_ = x.minpoly()
    if any(c.denominator != 1 for c in mp_):
        return None
    m = len(mp_) - 1
    # a primitive k-th root of unity has degree phi(k); phi(k) <= 8 forces k <= 30
    for k in range(1, 8 * m * m + 3):
        if sympy.totient(k) == m:
            cyc = sympy.Poly(sympy.cyclotomic_poly(k, sympy.Symbol("x")), sympy.Symbol("x"))
            if [Fraction(int(c)) for c in reversed(cyc.all_coeffs())] == mp_:
                return k
    return None


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------

def _int_poly_and_den(x: AlgebraicNumber) -> Tuple[List[int], int]:
    den = 1
    for c in x.coords:
        den = lcm(den, c.denominator)
    return [int(c * den) for c in x.coords], den


def _vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _factor_base(numbers: Sequence[int], prime_bound: int) -> List[Tuple[int, bool]]:
    """Primes (and gcd-free composite cofactors) dividing the given integers.

    Each entry is ``(q, is_prime)``; trial division stops at ``prime_bound``.
    """
    primes = set()
    rest = []
    for n in numbers:
        n = abs(int(n))
        if n <= 1:
            continue
        f = sympy.factorint(n, limit=prime_bound)
        for q in f:
            if q <= prime_bound or is_prime(q):
                primes.add(q)
            else:
                rest.append(q)
    # gcd-free basis of the leftover cofactors
    basis: List[int] = []
    for q in rest:
        todo = [q]
        while todo:
            a = todo.pop()
            if a == 1:
                continue
            for i, b in enumerate(basis):
                g = gcd(a, b)
                if g > 1:
                    basis.pop(i)
                    todo += [g, a // g, b // g]
                    break
            else:
                basis.append(a)
    basis = sorted(set(b for b in basis if b > 1))
    return [(p, True) for p in sorted(primes)] + [(b, is_prime(b)) for b in basis]


def _prime_ideal_valuations(field: NumberField, p: int, polys: List[List[int]], bound: int):
    """Valuations of integral elements at the primes above ``p`` (``p`` unramified, not in the index)."""
    x = sympy.Symbol("x")
    f = list(reversed(field.min_poly))
    facs = sympy.Poly(f, x, modulus=p).factor_list()[1]
    if len(facs) == 1:
        return None
    k = bound + 1
    lifted = dup_zz_hensel_lift(ZZ(p), [ZZ(c) for c in f],
                                [[ZZ(int(c) % p) for c in h.all_coeffs()] for h, _ in facs], k, ZZ)
    out = []
    for F in lifted:
        Fp = sympy.Poly([int(c) for c in F], x)
        deg = Fp.degree()
        col = []
        for a in polys:
            ap = sympy.Poly(list(reversed(a)), x)
            res = int(sympy.resultant(Fp, ap))
            col.append(min(_vp(res, p), k) // deg if res else k)
        out.append(col)
    return out


def valuation_matrix(values: Sequence[AlgebraicNumber], field: NumberField,
                     prime_bound: int) -> Tuple[List[List[int]], List[str]]:
    """Rows are values, columns are primes (or prime ideals) of the factor base."""
    n = len(values)
    if field.is_rational:
        qs = [v.to_rational() for v in values]
        base = _factor_base([q.numerator for q in qs] + [q.denominator for q in qs], prime_bound)
        cols = [[_vp(q.numerator, b) - _vp(q.denominator, b) for q in qs] for b, _ in base]
        labels = [f"p{b}" if ok else f"c{b}" for b, ok in base]
        return linalg.transpose(cols) if cols else [[] for _ in range(n)], labels
    data = [_int_poly_and_den(v) for v in values]
    norms_a = [int(AlgebraicNumber(field, a).norm()) for a, _ in data]
    base = _factor_base(norms_a + [d for _, d in data], prime_bound)
    disc = int(sympy.discriminant(sympy.Poly(list(reversed(field.min_poly)), sympy.Symbol("x"))))
    cols, labels = [], []
    for b, ok in base:
        split = None
        if ok and disc % b != 0:
            bound = max((_vp(N, b) for N in norms_a if N), default=0)
            split = _prime_ideal_valuations(field, b, [a for a, _ in data], bound)
        if split is None:
            cols.append([_vp(v.norm().numerator, b) - _vp(v.norm().denominator, b) for v in values])
            labels.append(f"N{b}")
        else:
            for i, col in enumerate(split):
                cols.append([c - _vp(d, b) for c, (_, d) in zip(col, data)])
                labels.append(f"p{b}_{i}")
    return (linalg.transpose(cols) if cols else [[] for _ in range(n)]), labels


# ---------------------------------------------------------------------------
# relation lattices
# ---------------------------------------------------------------------------

@dataclass
class RelationLattice:
    tuple_size: int
    basis: List[List[int]]
    torsion_orders: List[int]
    completeness: str            # "certified" or "bound_relative"
    bound: Optional[int] = None  # exponent bound searched when bound_relative

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def certified(self) -> bool:
        return self.completeness == "certified"

    def contains(self, v: Sequence[int]) -> bool:
        return linalg.lattice_contains(self.basis, v)

    def to_json(self) -> dict:
        out = {"n": self.tuple_size, "basis": self.basis, "torsion_orders": self.torsion_orders,
               "completeness": self.completeness}
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _finish(n: int, rows: List[List[int]], t: MultiplicativeTuple, completeness: str,
            bound: Optional[int] = None) -> RelationLattice:
    basis = linalg.saturate(rows, n) if rows else []
    if basis:
        basis = linalg.lll_reduce(basis)
        basis = [r if next(x for x in r if x) > 0 else [-x for x in r] for r in basis]
        basis.sort(key=lambda r: (sum(abs(x) for x in r), [-x for x in r]))
    orders = []
    for r in basis:
        k = is_root_of_unity(t.product(r))
        if k is None:
            raise MulRelError(f"saturated relation {r} failed exact verification")
        orders.append(k)
    return RelationLattice(n, basis, orders, completeness, bound)


def relation_lattice(t: Union[MultiplicativeTuple, Sequence], budget: SearchBudget = DEFAULT_BUDGET) -> RelationLattice:
    """Saturated lattice of exponent vectors giving roots of unity."""
    if not isinstance(t, MultiplicativeTuple):
        t = MultiplicativeTuple(t)
    n = len(t)
    if n == 0:
        return RelationLattice(0, [], [], "certified")
    V, _ = valuation_matrix(t.values, t.field, budget.prime_bound)
    N = linalg.integer_left_kernel(V, n) if V and V[0] else [[int(i == j) for j in range(n)] for i in range(n)]
    if not N:
        return RelationLattice(n, [], [], "certified")
    if t.field.is_rational:
        # over Q the valuation kernel is exactly the set of products equal to +-1
        return _finish(n, N, t, "certified")
    return _archimedean_stage(t, N, budget)


def _log_matrix(t: MultiplicativeTuple, bits: int):
    r1, r2 = t.field.signature()
    return [[log_abs(v, j, bits) for j in range(r1 + r2)] for v in t.values]


def _combine(c: Sequence[int], rows):
    m = len(rows[0])
    out = [iv.mpf(0)] * m
    for ci, row in zip(c, rows):
        if ci:
            out = [o + ci * x for o, x in zip(out, row)]
    return out


def _archimedean_stage(t: MultiplicativeTuple, N: List[List[int]], budget: SearchBudget) -> RelationLattice:
    n = len(t)
    k = len(N)
    bits = budget.precision_bits
    with _precision(bits + 32):
        L = _log_matrix(t, bits)
        LN = [_combine(b, L) for b in N]          # k x m intervals
        m = len(LN[0])
        found: List[List[int]] = []
        scale = 2 ** (bits // 2)
        lattice = [[int(i == j) for j in range(k)] + [int(mp.nint(scale * x.mid)) for x in LN[i]]
                   for i in range(k)]
        for row in linalg.lll_reduce(lattice):
            c = row[:k]
            if not any(c):
                continue
            if all(0 in x for x in _combine(c, LN)):
                e = linalg.vec_mat(c, N)
                if is_root_of_unity(t.product(e)) is not None:
                    found.append([int(x) for x in e])
        r = linalg.rank(found) if found else 0
        if _interval_rank_at_least(LN, k - r):
            return _finish(n, found, t, "certified")
    log.info("log map rank not certified; enumerating exponent box")
    return _enumerate(t, found, budget)


def _interval_rank_at_least(M, r: int) -> bool:
    """Certify that an interval matrix has rank at least ``r``."""
    if r <= 0:
        return True
    rows, cols = len(M), len(M[0]) if M else 0
    if r > min(rows, cols):
        return False
    mids = [[float(x.mid) for x in row] for row in M]
    # choose a pivot pattern by complete pivoting on the midpoints
    rs, cs = [], []
    A = [list(row) for row in mids]
    for _ in range(r):
        best = max(((abs(A[i][j]), i, j) for i in range(rows) if i not in rs
                    for j in range(cols) if j not in cs), default=(0, -1, -1))
        if best[0] == 0:
            return False
        _, i0, j0 = best
        rs.append(i0)
        cs.append(j0)
        for i in range(rows):
            if i != i0 and A[i0][j0]:
                f = A[i][j0] / A[i0][j0]
                A[i] = [a - f * b for a, b in zip(A[i], A[i0])]
    sub = [[M[i][j] for j in cs] for i in rs]
    return not (0 in _interval_det(sub))


def _interval_det(S):
    n = len(S)
    A = [list(row) for row in S]
    det = iv.mpf(1)
    for c in range(n):
        if 0 in A[c][c]:
            return iv.mpf([-1, 1])
        det = det * A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return det


def _enumerate(t: MultiplicativeTuple, found: List[List[int]], budget: SearchBudget) -> RelationLattice:
    """Search the exponent box with valuation and log pruning."""
    n = len(t)
    V, _ = valuation_matrix(t.values, t.field, budget.prime_bound)
    bits = budget.precision_bits
    with _precision(bits + 32):
        L = _log_matrix(t, bits)
        Lf = [[(float(x.a), float(x.b)) for x in row] for row in L]
    rel = [list(r) for r in found]
    searched = 0
    for B in range(1, budget.exponent_bound + 1):
        nodes = 0
        hits: List[List[int]] = []
        vcols = len(V[0]) if V and V[0] else 0
        vmax = [[sum(B * abs(V[i][c]) for i in range(j, n)) for c in range(vcols)] for j in range(n + 1)]
        lmax = [[sum(B * max(abs(lo), abs(hi)) for lo, hi in (Lf[i][c] for i in range(j, n)))
                 for c in range(len(Lf[0]))] for j in range(n + 1)]
        overflow = False

        def dfs(j, e, vpart, lpart):
            nonlocal nodes, overflow
            if overflow:
                return
            nodes += 1
            if nodes > budget.node_cap:
                overflow = True
                return
            if any(abs(x) > vmax[j][c] for c, x in enumerate(vpart)):
                return
            if any(abs(x) > lmax[j][c] + 1e-6 for c, x in enumerate(lpart)):
                return
            if j == n:
                if any(e) and max(abs(x) for x in e) == B:
                    hits.append(list(e))
                return
            for a in range(-B, B + 1):
                e.append(a)
                dfs(j + 1, e,
                    [x + a * V[j][c] for c, x in enumerate(vpart)],
                    [x + a * (Lf[j][c][0] + Lf[j][c][1]) / 2 for c, x in enumerate(lpart)])
                e.pop()

        dfs(0, [], [0] * vcols, [0.0] * len(Lf[0]))
        if overflow:
            break
        for e in hits:
            if rel and linalg.rank(rel + [e]) == linalg.rank(rel):
                continue
            if is_root_of_unity(t.product(e)) is not None:
                rel.append(e)
        searched = B
    return _finish(n, rel, t, "bound_relative", searched)


# ---------------------------------------------------------------------------
# weak commensurability
# ---------------------------------------------------------------------------

@dataclass
class WeakCommensurability:
    answer: bool
    completeness: str                 # "certified" | "bound_relative" for negatives; "exact" for positives
    m: Optional[List[int]] = None
    n: Optional[List[int]] = None
    common_value: Optional[AlgebraicNumber] = None
    bound: Optional[int] = None

    def to_json(self) -> dict:
        out = {"answer": "yes" if self.answer else "no", "completeness": self.completeness}
        if self.answer:
            out["witness"] = {"m": self.m, "n": self.n, "common_value": str(self.common_value)}
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _common(e1: MultiplicativeTuple, e2: MultiplicativeTuple) -> Tuple[MultiplicativeTuple, MultiplicativeTuple]:
    if e1.field == e2.field or e2.field.is_rational or e1.field.is_rational:
        F = e1.field if not e1.field.is_rational else e2.field
        return MultiplicativeTuple(e1.values, F), MultiplicativeTuple(e2.values, F)
    C = compositum(e1.field, e2.field)
    return e1.lifted(C.lift1), e2.lifted(C.lift2)


def is_weakly_commensurable(e1, e2, mode: str = "neat",
                            budget: SearchBudget = DEFAULT_BUDGET) -> WeakCommensurability:
    """Decide whether monomials in ``e1`` and in ``e2`` share a value.

    ``neat`` asks for a common value that is not a root of unity; ``strict``
    accepts any common value other than 1.
    """
    if mode not in ("neat", "strict"):
        raise PreconditionError(f"unknown mode {mode!r}")
    if not isinstance(e1, MultiplicativeTuple):
        e1 = MultiplicativeTuple(e1)
    if not isinstance(e2, MultiplicativeTuple):
        e2 = MultiplicativeTuple(e2)
    e1, e2 = _common(e1, e2)
    F = e1.field
    n1, n2 = len(e1), len(e2)
    joint = MultiplicativeTuple(e1.values + e2.values, F)
    R = relation_lattice(joint, budget)
    R1 = relation_lattice(e1, budget)
    R2 = relation_lattice(e2, budget)
    if R.rank > R1.rank + R2.rank:
        for row, k in sorted(zip(R.basis, R.torsion_orders), key=lambda p: sum(abs(x) for x in p[0])):
            m = row[:n1]
            if R1.rank and linalg.rank(R1.basis + [m]) == R1.rank:
                continue
            if not any(m):
                continue
            m = [k * x for x in m]
            n = [-k * x for x in row[n1:]]
            value = e1.product(m)
            return WeakCommensurability(True, "exact", m, n, value)
        raise MulRelError("rank excess without a witness row")
    if mode == "strict":
        w = _torsion_witness(e1, R1, e2, R2)
        if w is not None:
            m, n, value = w
            return WeakCommensurability(True, "exact", m, n, value)
    lattices = (R, R1, R2)
    if all(L.certified for L in lattices):
        return WeakCommensurability(False, "certified")
    bound = min(L.bound for L in lattices if not L.certified)
    return WeakCommensurability(False, "bound_relative", bound=bound)


def _torsion_values(t: MultiplicativeTuple, R: RelationLattice) -> Dict[AlgebraicNumber, List[int]]:
    """Roots of unity in the group generated by ``t`` with exponent vectors."""
    n = len(t)
    out = {t.field.one(): [0] * n}
    frontier = [(t.field.one(), [0] * n)]
    gens = [(t.product(r), r) for r in R.basis]
    while frontier:
        nxt = []
        for v, e in frontier:
            for g, r in gens:
                w = v * g
                if w not in out:
                    ew = [a + b for a, b in zip(e, r)]
                    out[w] = ew
                    nxt.append((w, ew))
        frontier = nxt
        if len(out) > 64:
            break
    return out


def _torsion_witness(e1, R1, e2, R2):
    T1 = _torsion_values(e1, R1)
    T2 = _torsion_values(e2, R2)
    common = [v for v in T1 if v in T2 and v != 1]
    if not common:
        return None
    v = min(common, key=lambda z: (is_root_of_unity(z), str(z)))
    return T1[v], T2[v], v


# ---------------------------------------------------------------------------
# rationality of log ratios
# ---------------------------------------------------------------------------

@dataclass
class LogRatio:
    ratio: Optional[Fraction]
    completeness: str
    bound: Optional[int] = None


def log_ratio_rational(a, b, budget: SearchBudget = DEFAULT_BUDGET, index: int = 0) -> LogRatio:
    """Rational value of ``log|a| / log|b|`` at a real embedding, if any.

    A rational ratio ``p/q`` means ``a^q = zeta * b^p`` for a root of unity
    ``zeta`` (``zeta = +-1`` at a real embedding).
    """
    ta, tb = _common(MultiplicativeTuple([a]), MultiplicativeTuple([b]))
    t = MultiplicativeTuple(ta.values + tb.values, ta.field)
    for x in t.values:
        with _precision(budget.precision_bits + 32):
            if not (log_abs(x, index, budget.precision_bits).a > 0):
                raise PreconditionError(f"|{x}| must exceed 1 at the designated embedding")
    R = relation_lattice(t, budget)
    if R.rank == 0:
        return LogRatio(None, R.completeness, R.bound)
    u, v = R.basis[0]
    return LogRatio(Fraction(-v, u), "exact")
