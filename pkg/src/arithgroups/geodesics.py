"""Lengths of closed geodesics from root values, and Q-span comparison of length sets.

For a semisimple element with root values ``alpha(gamma)`` the squared
length is ``sum over all roots (log |alpha(gamma)|)^2``.  Lengths are kept
exactly as quadratic forms in the logs of a multiplicatively independent
basis, with a certified interval alongside.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from mpmath import iv

from . import linalg
from .errors import ArithGroupsError, PreconditionError
from .mulrel import DEFAULT_BUDGET, MultiplicativeTuple, SearchBudget, log_ratio_rational, relation_lattice
from .numfield import (QQ, AlgebraicNumber, NumberField, _precision, log_abs, quadratic_field,
                       squarefree_part, to_number)
from .rootsys import RootSystemType, build_root_system


class GeodesicsError(ArithGroupsError):
    module = "geodesics"


class EllipticElement(GeodesicsError):
    pass


class MissingCharacterValue(GeodesicsError, KeyError):
    pass


class RealRamified(GeodesicsError, ValueError):
    pass


class Undecided(GeodesicsError):
    pass


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

Root = Tuple[int, ...]


@dataclass
class RootValueProfile:
    """Values ``alpha(gamma)`` keyed by roots in simple-root coordinates."""

    root_system: RootSystemType
    values: Dict[Root, AlgebraicNumber]
    element_label: str = "gamma"
    embedding: int = 0

    def __post_init__(self):
        self.root_system = RootSystemType.parse(self.root_system)
        field = next((v.field for v in self.values.values() if isinstance(v, AlgebraicNumber)
                      and not v.field.is_rational), QQ)
        self.field = field
        self.values = {tuple(int(c) for c in r): to_number(v, field) for r, v in self.values.items()}
        for r, v in self.values.items():
            if v.is_zero():
                raise PreconditionError(f"value at root {r} is zero")
            neg = tuple(-c for c in r)
            if neg in self.values and self.values[neg] * v != field.one():
                raise PreconditionError(f"values at {r} and {neg} are not inverse")

    @classmethod
    def from_simple_values(cls, t, simple_values: Sequence, label: str = "gamma",
                           embedding: int = 0) -> "RootValueProfile":
        """Profile of the torus element with ``alpha_i(gamma) = simple_values[i]``."""
        rs = build_root_system(RootSystemType.parse(t))
        probe = RootValueProfile(t, {}, label, embedding)
        F = next((v.field for v in simple_values if isinstance(v, AlgebraicNumber)
                  and not v.field.is_rational), QQ)
        vals = [to_number(v, F) for v in simple_values]
        if len(vals) != rs.rank:
            raise PreconditionError("one value per simple root is required")
        out = {}
        for r in rs.roots:
            x = F.one()
            for c, v in zip(r, vals):
                x = x * v ** c
            out[r] = x
        return cls(probe.root_system, out, label, embedding)

    def character_value(self, chi: Sequence[int]) -> AlgebraicNumber:
        """Value of the character ``sum chi_i alpha_i``."""
        n = self.root_system.rank
        x = self.field.one()
        for i, c in enumerate(chi):
            e = tuple(int(j == i) for j in range(n))
            if c == 0:
                continue
            if e not in self.values:
                raise MissingCharacterValue(f"no value for simple root {i + 1}")
            x = x * self.values[e] ** int(c)
        return x

    def power(self, n: int) -> "RootValueProfile":
        return RootValueProfile(self.root_system, {r: v ** n for r, v in self.values.items()},
                                f"{self.element_label}^{n}", self.embedding)


# ---------------------------------------------------------------------------
# exact logs and lengths
# ---------------------------------------------------------------------------

def _to_sympy(x: AlgebraicNumber):
    if x.is_rational():
        q = Fraction(x.to_rational())
        return sympy.Rational(q.numerator, q.denominator)
    F = x.field
    if F.degree == 2 and F.signature()[0] == 2:
        c, b, _ = F.min_poly
        disc = b * b - 4 * c
        # index-0 embedding is the larger real root
        theta = (-sympy.Integer(b) + sympy.sqrt(disc)) / 2
        q0, q1 = (sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in x.coords)
        return sympy.nsimplify(sympy.radsimp(q0 + q1 * theta))
    return sympy.Symbol(f"[{x}]")


@dataclass(frozen=True)
class ExactLog:
    """``coeff * log |arg|`` at a real embedding."""

    coeff: Fraction
    arg: AlgebraicNumber
    embedding: int = 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactLog):
            return NotImplemented
        if self.coeff == 0 or other.coeff == 0:
            return self.is_zero() and other.is_zero()
        # c1 log|a| = c2 log|b|  <=>  |a|^(c1 D) = |b|^(c2 D)
        D = self.coeff.denominator * other.coeff.denominator
        p, q = int(self.coeff * D), int(other.coeff * D)
        lhs = self.arg.abs(self.embedding) ** p
        rhs = to_number(other.arg, self.arg.field).abs(self.embedding) ** q \
            if other.arg.field == self.arg.field or other.arg.is_rational() else None
        if rhs is None:
            from .mulrel import _common  # mixed fields
            ta, tb = _common(MultiplicativeTuple([self.arg]), MultiplicativeTuple([other.arg]))
            lhs = ta.values[0].abs(self.embedding) ** p
            rhs = tb.values[0].abs(self.embedding) ** q
        return lhs == rhs

    # equality is exact while any numeric hash would not be
    __hash__ = None

    def is_zero(self) -> bool:
        return self.coeff == 0 or self.arg.abs(self.embedding) == self.arg.field.one()

    def scaled(self, n) -> "ExactLog":
        return ExactLog(self.coeff * Fraction(n), self.arg, self.embedding)

    def approx(self, bits: int = 128):
        with _precision(bits + 16):
            return iv.mpf(self.coeff.numerator) / self.coeff.denominator * log_abs(self.arg, self.embedding, bits)

    def __str__(self) -> str:
        return str(sympy.Rational(self.coeff.numerator, self.coeff.denominator) * sympy.log(_to_sympy(self.arg)))


@dataclass
class LengthValue:
    """``lambda^2 = sum_{i<=j} q_ij log|b_i| log|b_j|`` with a certified interval for ``lambda``.

    The reported length is ``lambda / period_divisor``.
    """

    basis: List[AlgebraicNumber]
    form: Dict[Tuple[int, int], Fraction]
    approx: object
    period_divisor: int = 1
    embedding: int = 0
    label: str = ""

    @property
    def exact_form(self) -> List[Tuple[Fraction, AlgebraicNumber]]:
        """Diagonal terms ``(c_i, b_i)`` with ``lambda^2 = sum c_i (log b_i)^2`` when the form is diagonal."""
        if any(i != j for (i, j) in self.form):
            raise PreconditionError("form has cross terms")
        return [(c, self.basis[i]) for (i, _), c in sorted(self.form.items())]

    def single_log(self) -> Optional[Tuple[Fraction, AlgebraicNumber]]:
        """``(c, b)`` with ``lambda = sqrt(c) * log b``, ``b > 1``, when the form has rank one."""
        n = len(self.basis)
        S = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), q in self.form.items():
            if i == j:
                S[i][i] += q
            else:
                S[i][j] += q / 2
                S[j][i] += q / 2
        k = next((i for i in range(n) if S[i][i]), None)
        if k is None:
            return None
        # S = c w w^T with w the primitive integer vector along row k
        den = 1
        for x in S[k]:
            den = den * x.denominator // gcd(den, x.denominator)
        w = [int(x * den) for x in S[k]]
        g = 0
        for x in w:
            g = gcd(g, x)
        w = [x // g for x in w]
        c = S[k][k] / (w[k] * w[k])
        if c <= 0 or any(S[i][j] != c * w[i] * w[j] for i in range(n) for j in range(n)):
            return None
        b = self.basis[0].field.one()
        for x, e in zip(self.basis, w):
            b = b * x ** e
        b = b.abs(self.embedding)
        if b.embed(self.embedding).b < 1:
            b = b.inverse()
        return c / (self.period_divisor ** 2), b

    def symbolic(self):
        logs = [sympy.log(_to_sympy(b.abs(self.embedding))) for b in self.basis]
        sq = sum(sympy.Rational(c.numerator, c.denominator) * logs[i] * logs[j] for (i, j), c in self.form.items())
        return sympy.sqrt(sympy.factor(sq)) / self.period_divisor

    def __str__(self) -> str:
        return sympy.sstr(self.symbolic())

    def to_json(self) -> dict:
        return {"length": str(self), "approx": float(self.approx.mid),
                "interval": [_decimal(self.approx.a, False), _decimal(self.approx.b, True)],
                "n_gamma": self.period_divisor}


def _decimal(end, up: bool, digits: int = 30) -> str:
    """Fixed-point string for an interval endpoint, rounded outward."""
    sign, man, exp, _ = end._mpi_[0]
    x = Fraction(int(man)) * Fraction(2) ** int(exp)
    x = -x if sign else x
    scaled = x * 10 ** digits
    n = -(-scaled.numerator // scaled.denominator) if up else scaled.numerator // scaled.denominator
    body = str(abs(n)).rjust(digits + 1, "0")
    return ("-" if n < 0 else "") + body[:-digits] + "." + body[-digits:]


def _interval_sqrt(x):
    if x.a < 0:
        x = iv.mpf([0, x.b])
    return iv.sqrt(x)


def _evaluate(basis: List[AlgebraicNumber], form: Dict[Tuple[int, int], Fraction], embedding: int, bits: int):
    with _precision(bits + 32):
        logs = [log_abs(b, embedding, bits + 32) for b in basis]
        total = iv.mpf(0)
        for (i, j), c in form.items():
            total += iv.mpf(c.numerator) / c.denominator * logs[i] * logs[j]
        return _interval_sqrt(total)


def _log_coordinates(values: List[AlgebraicNumber], embedding: int, budget: SearchBudget):
    """A multiplicatively independent basis and integer coordinates of ``log|v|`` in it."""
    field = values[0].field
    absvals = [v.abs(embedding) for v in values]
    if field.is_rational:
        primes = sorted({p for v in absvals for x in (v.to_rational().numerator, v.to_rational().denominator)
                         for p in sympy.factorint(x)})
        coords = []
        for v in absvals:
            q = Fraction(v.to_rational())
            coords.append([sympy.multiplicity(p, q.numerator) - sympy.multiplicity(p, q.denominator)
                           for p in primes])
        return [QQ(p) for p in primes], coords
    R = relation_lattice(MultiplicativeTuple(absvals, field), budget)
    if not R.certified:
        raise Undecided(f"relation search among root values is only bound-relative ({R.bound})")
    m, k = len(absvals), R.rank
    if k == 0:
        return absvals, [[int(i == j) for j in range(m)] for i in range(m)]
    # U R^T = H with H's nonzero rows on top; the last m-k columns of U^-1 complete R
    _, U = linalg.hnf_with_transform(linalg.transpose(R.basis))
    V = linalg.inverse(U)
    basis = []
    for j in range(k, m):
        w = [int(V[i][j]) for i in range(m)]
        x = field.one()
        for val, e in zip(absvals, w):
            x = x * val ** e
        basis.append(x)
    coords = [[int(U[k + j][i]) for j in range(m - k)] for i in range(m)]
    return basis, coords


def length(p: RootValueProfile, precision: int = 128, budget: SearchBudget = DEFAULT_BUDGET,
           period_divisor: int = 1) -> LengthValue:
    """``lambda(gamma)`` with ``lambda^2 = sum over all roots (log|alpha(gamma)|)^2``."""
    if not p.values:
        raise PreconditionError("profile has no root values")
    roots = sorted(p.values)
    vals = [p.values[r] for r in roots]
    basis, coords = _log_coordinates(vals, p.embedding, budget)
    form: Dict[Tuple[int, int], Fraction] = {}
    for c in coords:
        for i in range(len(basis)):
            for j in range(i, len(basis)):
                w = c[i] * c[j] * (1 if i == j else 2)
                if w:
                    form[(i, j)] = form.get((i, j), Fraction(0)) + w
    form = {k: v for k, v in form.items() if v}
    if not form:
        raise EllipticElement("every root value has absolute value 1")
    used = sorted({i for k in form for i in k})
    remap = {i: n for n, i in enumerate(used)}
    basis = [basis[i] for i in used]
    form = {(remap[i], remap[j]): v for (i, j), v in form.items()}
    approx = _evaluate(basis, form, p.embedding, precision)
    if period_divisor != 1:
        with _precision(precision + 32):
            approx = approx / period_divisor
    return LengthValue(basis, form, approx, period_divisor, p.embedding, p.element_label)


def single_log_length(a, coeff_sq=1, embedding: int = 0, precision: int = 128, label: str = "") -> LengthValue:
    """The length ``sqrt(coeff_sq) * log |a|``."""
    a = to_number(a, a.field if isinstance(a, AlgebraicNumber) else QQ)
    form = {(0, 0): Fraction(coeff_sq)}
    return LengthValue([a], form, _evaluate([a], form, embedding, precision), 1, embedding, label or str(a))


def lyapunov_vector(p: RootValueProfile, simple_positive_characters: Optional[Sequence[Sequence[int]]] = None
                    ) -> List[ExactLog]:
    """``(log|beta_1(gamma)|, ..., log|beta_r(gamma)|)``; by default ``beta_i = 2 alpha_i``."""
    n = p.root_system.rank
    chars = simple_positive_characters
    if chars is None:
        chars = [[2 * int(i == j) for j in range(n)] for i in range(n)]
    return [ExactLog(Fraction(1), p.character_value(c), p.embedding) for c in chars]


# ---------------------------------------------------------------------------
# Q-span comparison
# ---------------------------------------------------------------------------

@dataclass
class QSpanResult:
    verdict: str                       # "equal" | "not_equal" | "undecided"
    witness: Optional[LengthValue] = None
    bound: Optional[int] = None
    reason: str = ""

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = str(self.witness)
        if self.bound is not None:
            out["bound"] = self.bound
        if self.reason:
            out["reason"] = self.reason
        return out


def _is_rational_square(q: Fraction) -> bool:
    if q <= 0:
        return False
    n, d = q.numerator, q.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def rational_ratio(x: LengthValue, y: LengthValue, budget: SearchBudget = DEFAULT_BUDGET) -> Tuple[Optional[bool], Optional[int]]:
    """Whether ``x / y`` is rational: ``True``, ``False`` or ``None`` when undecided.

    For single-log lengths ``sqrt(c1) log a`` and ``sqrt(c2) log b`` the ratio
    is rational iff ``log a / log b`` is rational and ``c1/c2`` is a rational
    square: an irrational ratio of logs of algebraic numbers is
    transcendental, so no algebraic factor can make it rational.
    """
    sx, sy = x.single_log(), y.single_log()
    if sx is None or sy is None:
        return None, None
    (c1, a), (c2, b) = sx, sy
    r = log_ratio_rational(a, b, budget, x.embedding)
    if r.ratio is None:
        if r.completeness != "certified":
            return None, r.bound
        return False, None
    return _is_rational_square(c1 / c2), None


def qspan_equal(L1: Sequence[LengthValue], L2: Sequence[LengthValue],
                budget: SearchBudget = DEFAULT_BUDGET) -> QSpanResult:
    """Compare ``Q * L1`` and ``Q * L2`` as sets of lines through lengths."""
    undecided_bound = None
    saw_undecided = False
    cache: Dict[Tuple[int, int], Tuple[Optional[bool], Optional[int]]] = {}

    def partner(x, others, side):
        nonlocal undecided_bound, saw_undecided
        unknown = False
        for k, y in enumerate(others):
            key = (side, id(x), k)
            if key not in cache:
                cache[key] = rational_ratio(x, y, budget)
            ok, bound = cache[key]
            if ok:
                return True
            if ok is None:
                unknown = True
                if bound is not None:
                    undecided_bound = max(undecided_bound or 0, bound)
        if unknown:
            saw_undecided = True
            return None
        return False

    for side, (A, B) in enumerate(((L1, L2), (L2, L1))):
        for x in A:
            res = partner(x, B, side)
            if res is False:
                return QSpanResult("not_equal", witness=x)
    if saw_undecided:
        return QSpanResult("undecided", bound=undecided_bound, reason="some ratio is neither proved rational nor certified irrational")
    return QSpanResult("equal")


# ---------------------------------------------------------------------------
# Fuchsian sampling in a quaternion order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuaternionOrderBox:
    a: Fraction
    b: Fraction
    coefficient_bound: int

    def __init__(self, a, b, coefficient_bound: int):
        a, b = Fraction(a), Fraction(b)
        if a == 0 or b == 0:
            raise PreconditionError("Hilbert symbol entries must be nonzero")
        if coefficient_bound < 0:
            raise PreconditionError("coefficient bound must be nonnegative")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "coefficient_bound", int(coefficient_bound))


def _order_basis(a: Fraction):
    """Basis ``1, w, j, wj`` of an order as rows of (1, i, j, k)-coordinates."""
    h = Fraction(1, 2)
    if a.denominator == 1 and a.numerator % 4 == 1:
        return [[1, 0, 0, 0], [h, h, 0, 0], [0, 0, 1, 0], [0, 0, h, h]]
    return [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]


@dataclass
class FuchsianLength:
    trace: Fraction
    eigenvalue: AlgebraicNumber
    length_std: LengthValue
    length_killing: LengthValue
    element: Tuple[int, int, int, int]

    def to_json(self) -> dict:
        lam = sympy.sstr(_to_sympy(self.eigenvalue))
        return {"trace": str(self.trace), "length_std": f"2*log({lam})",
                "length_killing": f"2*sqrt(2)*log({lam})", "approx": float(self.length_std.approx.mid),
                "element": list(self.element)}


def _eigenvalue(tr: Fraction) -> AlgebraicNumber:
    """Larger root of ``x^2 - |tr| x + 1``."""
    t = abs(tr)
    disc = t * t - 4
    num, den = disc.numerator * disc.denominator, disc.denominator
    s = squarefree_part(num)
    f2 = Fraction(num // s, den * den)         # disc = f2 * s with f2 a rational square
    f = Fraction(isqrt(f2.numerator), isqrt(f2.denominator))
    if s == 1:
        return QQ((t + f) / 2)
    K = quadratic_field(s)
    return K(t / 2) + K.gen() * (f / 2)


def fuchsian_sample(box: QuaternionOrderBox, precision: int = 128) -> List[FuchsianLength]:
    """Hyperbolic norm-one elements of the order with coefficients in ``[-bound, bound]``.

    One entry per distinct ``|trace|``, sorted by length.
    """
    a, b = box.a, box.b
    if a < 0 and b < 0:
        raise RealRamified(f"({a}, {b}) is definite at the real place")
    basis = _order_basis(a)
    B = box.coefficient_bound
    seen: Dict[Fraction, Tuple[int, int, int, int]] = {}
    for x in itertools.product(range(-B, B + 1), repeat=4):
        y = [sum(Fraction(x[r]) * basis[r][c] for r in range(4)) for c in range(4)]
        nrd = y[0] ** 2 - a * y[1] ** 2 - b * y[2] ** 2 + a * b * y[3] ** 2
        if nrd != 1:
            continue
        tr = abs(2 * y[0])
        if tr <= 2:
            continue
        if tr not in seen or (sum(map(abs, x)), x) < (sum(map(abs, seen[tr])), seen[tr]):
            seen[tr] = x
    out = []
    for tr, x in seen.items():
        lam = _eigenvalue(tr)
        std = single_log_length(lam, 4, 0, precision, label=f"tr {tr}")
        kil = single_log_length(lam, 8, 0, precision, label=f"tr {tr}")
        out.append(FuchsianLength(tr, lam, std, kil, x))
    out.sort(key=lambda f: (f.length_std.approx.mid, f.trace))
    return out
