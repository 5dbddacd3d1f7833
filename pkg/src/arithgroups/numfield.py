"""Explicitly presented number fields, places, Q/Z and interval embeddings.

A field is ``Q[x]/(f)`` for a monic irreducible integer polynomial ``f`` of
degree at most 8.  Elements are rational coordinate vectors on the power
basis ``1, theta, ..., theta^(n-1)``.

Archimedean embeddings are indexed in a fixed order: real roots of ``f`` by
decreasing value, then one root from each complex-conjugate pair (the one
with positive imaginary part) by decreasing real part.  Index 0 is the
*designated* embedding wherever one is needed.
"""

from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from mpmath import iv, mp
from mpmath.libmp import mpf_add, mpf_sub, round_ceiling, round_floor

from . import linalg
from .errors import ArithGroupsError, PreconditionError

MAX_DEGREE = 8
Rational = Union[int, Fraction]


class NumFieldError(ArithGroupsError):
    module = "numfield"


class ZeroInput(NumFieldError, ValueError):
    pass


class InvalidDiscriminant(NumFieldError, ValueError):
    pass


class MixedFields(NumFieldError, ValueError):
    pass


class FieldTooLarge(NumFieldError):
    pass


class NotIrreducible(NumFieldError, ValueError):
    pass


class PrecisionExhausted(NumFieldError):
    pass


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

_X = sympy.Symbol("x")


def is_prime(p: int) -> bool:
    return p >= 2 and bool(sympy.isprime(p))


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise ZeroInput("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in sympy.factorint(abs(n)).values())


def _poly_to_str(coeffs: Sequence[int]) -> str:
    """``[-2, 0, 1]`` (constant first) -> ``"x^2 - 2"``."""
    expr = sum(sympy.Integer(c) * _X ** k for k, c in enumerate(coeffs))
    return str(expr).replace("**", "^")


def _parse_poly(text: str) -> List[int]:
    expr = sympy.sympify(text.replace("^", "**"), locals={"x": _X})
    poly = sympy.Poly(expr, _X)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return coeffs


@contextlib.contextmanager
def _precision(bits: int):
    old_mp, old_iv = mp.prec, iv.prec
    mp.prec = bits
    iv.prec = bits
    try:
        yield
    finally:
        mp.prec = old_mp
        iv.prec = old_iv


def _outward(c, r):
    """Interval ``[c - r, c + r]`` with endpoints rounded away from the center."""
    prec = iv.prec
    c = c._mpf_ if hasattr(c, "_mpf_") else mp.mpf(c)._mpf_
    r = r._mpf_ if hasattr(r, "_mpf_") else mp.mpf(r)._mpf_
    lo = mp.make_mpf(mpf_sub(c, r, prec, round_floor))
    hi = mp.make_mpf(mpf_add(c, r, prec, round_ceiling))
    return iv.mpf([lo, hi])


def _iv_rational(q: Rational):
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / q.denominator


# ---------------------------------------------------------------------------
# Q/Z
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QmodZ:
    """An element of Q/Z stored as the reduced fraction in ``[0, 1)``."""

    value: Fraction

    def __init__(self, value: Union[Rational, str, "QmodZ"] = 0):
        if isinstance(value, QmodZ):
            v = value.value
        else:
            v = Fraction(value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    def __add__(self, other) -> "QmodZ":
        return QmodZ(self.value + QmodZ(other).value)

    __radd__ = __add__

    def __sub__(self, other) -> "QmodZ":
        return QmodZ(self.value - QmodZ(other).value)

    def __neg__(self) -> "QmodZ":
        return QmodZ(-self.value)

    def __mul__(self, n: int) -> "QmodZ":
        if not isinstance(n, int):
            return NotImplemented
        return QmodZ(self.value * n)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return self.value != 0

    @property
    def order(self) -> int:
        return self.value.denominator

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"QmodZ({self.value})"


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of a number field.

    ``kind`` is ``"finite"``, ``"real"`` or ``"complex"``.  Finite places carry
    the rational prime below them; ``index`` distinguishes several places
    over the same prime (``None`` when the prime has a single place above it,
    as over Q or for inert and ramified primes of a quadratic field).
    Archimedean places carry the embedding index.
    """

    kind: str
    prime: int = 0
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind == "finite":
            if not is_prime(self.prime):
                raise PreconditionError(f"{self.prime} is not prime")
        elif self.kind in ("real", "complex"):
            if self.index is None or self.index < 0:
                raise PreconditionError("archimedean places need an embedding index")
        else:
            raise PreconditionError(f"unknown place kind {self.kind!r}")

    @classmethod
    def finite(cls, p: int, index: Optional[int] = None) -> "Place":
        return cls("finite", p, index)

    @classmethod
    def real(cls, index: int = 0) -> "Place":
        return cls("real", 0, index)

    @classmethod
    def complex(cls, index: int = 0) -> "Place":
        return cls("complex", 0, index)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def sort_key(self) -> tuple:
        rank = {"real": 0, "complex": 1, "finite": 2}[self.kind]
        return (rank, self.prime, -1 if self.index is None else self.index)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    @property
    def label(self) -> str:
        if self.kind == "finite":
            return f"p{self.prime}" if self.index is None else f"p{self.prime}_{self.index}"
        if self.kind == "real":
            return f"inf{self.index}"
        return f"cplx{self.index}"

    @classmethod
    def parse(cls, label: str) -> "Place":
        if label.startswith("inf"):
            return cls.real(int(label[3:]))
        if label.startswith("cplx"):
            return cls.complex(int(label[4:]))
        if label.startswith("p"):
            body = label[1:]
            if "_" in body:
                p, i = body.split("_", 1)
                return cls.finite(int(p), int(i))
            return cls.finite(int(body))
        raise PreconditionError(f"cannot parse place label {label!r}")

    def __str__(self) -> str:
        return self.label


def valuation(x: Rational, p: int) -> int:
    """Exact p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("valuation of zero")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def splitting_type(d: int, p: int) -> str:
    """Decomposition of the prime ``p`` in ``Q(sqrt d)``."""
    if d in (0, 1) or not is_squarefree(d):
        raise InvalidDiscriminant(f"{d} is not a squarefree integer other than 0, 1")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    disc = d if d % 4 == 1 else 4 * d
    if disc % p == 0:
        return "ramified"
    if p == 2:
        return "split" if d % 8 == 1 else "inert"
    return "split" if sympy.legendre_symbol(d % p, p) == 1 else "inert"


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootEnclosure:
    center: object   # mpf or mpc
    radius: object   # mpf
    is_real: bool


class NumberField:
    """``Q[x]/(f)`` for monic irreducible ``f`` (coefficients constant first)."""

    def __init__(self, min_poly: Union[str, Sequence[int]], label: Optional[str] = None):
        coeffs = _parse_poly(min_poly) if isinstance(min_poly, str) else [int(c) for c in min_poly]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise PreconditionError("minimal polynomial must be monic of degree >= 1")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise FieldTooLarge(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        poly = sympy.Poly(list(reversed(coeffs)), _X)
        if not poly.is_irreducible:
            raise NotIrreducible(f"{_poly_to_str(coeffs)} is reducible over Q")
        self.min_poly: Tuple[int, ...] = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.label = label or ("Q" if self.degree == 1 else _poly_to_str(coeffs))
        self._enclosures: Dict[int, List[RootEnclosure]] = {}
        self._signature: Optional[Tuple[int, int]] = None

    # identity ------------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self) -> int:
        return hash(self.min_poly)

    def __repr__(self) -> str:
        return f"NumberField({self.poly_str!r})"

    @property
    def poly_str(self) -> str:
        return _poly_to_str(self.min_poly)

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    # elements ------------------------------------------------------------
    def __call__(self, value) -> "AlgebraicNumber":
        if isinstance(value, AlgebraicNumber):
            if value.field != self:
                raise MixedFields(f"{value.field} vs {self}")
            return value
        if isinstance(value, (list, tuple)):
            return AlgebraicNumber(self, value)
        return AlgebraicNumber(self, [Fraction(value)] + [Fraction(0)] * (self.degree - 1))

    def gen(self) -> "AlgebraicNumber":
        if self.degree == 1:
            return self(-self.min_poly[0])
        return AlgebraicNumber(self, [0, 1] + [0] * (self.degree - 2))

    def one(self) -> "AlgebraicNumber":
        return self(1)

    def zero(self) -> "AlgebraicNumber":
        return self(0)

    # quadratic data --------------------------------------------------------
    def quadratic_d(self) -> int:
        """Squarefree ``d`` with this field equal to ``Q(sqrt d)``."""
        if self.degree != 2:
            raise PreconditionError("not a quadratic field")
        c, b, _ = self.min_poly
        return squarefree_part(b * b - 4 * c)

    # archimedean structure -------------------------------------------------
    def signature(self) -> Tuple[int, int]:
        if self._signature is None:
            r = sympy.Poly(list(reversed(self.min_poly)), _X).count_roots()  # real roots
            self._signature = (r, (self.degree - r) // 2)
        return self._signature

    def archimedean_places(self) -> List[Place]:
        r1, r2 = self.signature()
        return [Place.real(i) for i in range(r1)] + [Place.complex(r1 + i) for i in range(r2)]

    def root_enclosures(self, precision_bits: int = 64) -> List[RootEnclosure]:
        """Certified disjoint disks, one around each embedding's image of theta."""
        if precision_bits in self._enclosures:
            return self._enclosures[precision_bits]
        n = self.degree
        if n == 1:
            with _precision(precision_bits + 20):
                out = [RootEnclosure(mp.mpf(-self.min_poly[0]), mp.mpf(0), True)]
            self._enclosures[precision_bits] = out
            return out
        r1, r2 = self.signature()
        for extra in (32, 96, 256, 768):
            work = precision_bits + extra
            with _precision(work):
                try:
                    roots = mp.polyroots(list(reversed(self.min_poly)), maxsteps=400, extraprec=work)
                except mpmath.libmp.NoConvergence:
                    continue
                encl = _certify_roots(self.min_poly, roots)
            if encl is None:
                continue
            reals = sorted((e for e in encl if e.is_real), key=lambda e: -e.center)
            cplx = sorted((e for e in encl if not e.is_real and e.center.imag > 0),
                          key=lambda e: (-e.center.real, e.center.imag))
            if len(reals) != r1 or len(cplx) != r2:
                continue
            target = mp.mpf(2) ** (-precision_bits)
            if any(e.radius > target for e in reals + cplx):
                continue
            out = reals + cplx
            self._enclosures[precision_bits] = out
            return out
        raise PrecisionExhausted(f"could not isolate the roots of {self.poly_str}")


def _certify_roots(coeffs: Sequence[int], roots) -> Optional[List[RootEnclosure]]:
    """Inclusion disks of radius n|f/f'| checked pairwise disjoint."""
    n = len(coeffs) - 1
    dcoeffs = [k * coeffs[k] for k in range(1, n + 1)]

    def horner(cs, z):
        acc = iv.mpf(0)
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    out: List[RootEnclosure] = []
    for z in roots:
        z = mp.mpc(z)
        candidates = []
        if abs(z.imag) < mp.mpf(2) ** (-(mp.prec // 2)):
            candidates.append((mp.mpf(z.real), True))
        candidates.append((z, False))
        chosen = None
        for center, real in candidates:
            if real:
                zi = iv.mpf(center)
                fv, dv = abs(horner(coeffs, zi)), abs(horner(dcoeffs, zi))
            else:
                zi = iv.mpc(iv.mpf(center.real), iv.mpf(center.imag))
                fv, dv = abs(horner(coeffs, zi)), abs(horner(dcoeffs, zi))
            if dv.a <= 0:
                continue
            rad = (n * fv / dv).b
            rad = mp.mpf(rad)
            if real or abs(center.imag) > 2 * rad:
                chosen = RootEnclosure(center, rad, real)
                break
        if chosen is None:
            return None
        out.append(chosen)
    for a, b in itertools.combinations(out, 2):
        if abs(mp.mpc(a.center) - mp.mpc(b.center)) <= (a.radius + b.radius) * (1 + mp.mpf(2) ** -20):
            return None
    return out


QQ = NumberField([0, 1], label="Q")


def quadratic_field(d: int) -> NumberField:
    if d in (0, 1) or not is_squarefree(d):
        raise InvalidDiscriminant(f"{d} is not a squarefree integer other than 0, 1")
    return NumberField([-d, 0, 1], label=f"Q(sqrt({d}))")


def cyclotomic_field(m: int) -> NumberField:
    coeffs = [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(m, _X), _X).all_coeffs())]
    return NumberField(coeffs, label=f"Q(zeta{m})")


# ---------------------------------------------------------------------------
# polynomial arithmetic over Q (coefficient lists, constant first)
# ---------------------------------------------------------------------------

def _poly_mulmod(a: Sequence[Fraction], b: Sequence[Fraction], f: Sequence[int]) -> List[Fraction]:
    n = len(f) - 1
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k] = Fraction(0)
            for i in range(n):
                prod[k - n + i] -= c * f[i]
    out = prod[:n]
    return out + [Fraction(0)] * (n - len(out))


# ---------------------------------------------------------------------------
# algebraic numbers
# ---------------------------------------------------------------------------

class AlgebraicNumber:
    """An element of an explicitly presented number field."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: Iterable):
        cs = [Fraction(c) for c in coords]
        if len(cs) > field.degree:
            cs = _poly_mulmod(cs, [Fraction(1)], field.min_poly)
        cs += [Fraction(0)] * (field.degree - len(cs))
        self.field = field
        self.coords: Tuple[Fraction, ...] = tuple(cs)

    # coercion ------------------------------------------------------------
    def _coerce(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field != self.field:
                if other.field.is_rational:
                    return self.field(other.coords[0])
                if self.field.is_rational:
                    raise MixedFields("mixing elements of different fields")
                raise MixedFields(f"{self.field.label} vs {other.field.label}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        raise TypeError(f"cannot combine AlgebraicNumber with {type(other).__name__}")

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return AlgebraicNumber(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return AlgebraicNumber(self.field, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return AlgebraicNumber(self.field, _poly_mulmod(self.coords, o.coords, self.field.min_poly))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.field.degree
        e1 = [Fraction(1)] + [Fraction(0)] * (n - 1)
        x = linalg.solve(self.mult_matrix(), e1)
        return AlgebraicNumber(self.field, x)

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "AlgebraicNumber":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if other.field != self.field:
            if other.field.is_rational and other.is_rational():
                return self.is_rational() and self.coords[0] == other.coords[0]
            if self.field.is_rational and self.is_rational():
                return other.is_rational() and other.coords[0] == self.coords[0]
            return False
        return self.coords == other.coords

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.field, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise PreconditionError(f"{self} is not rational")
        return self.coords[0]

    # structure -----------------------------------------------------------
    def mult_matrix(self) -> linalg.Mat:
        """Matrix of multiplication by ``self`` on the power basis (columns)."""
        n = self.field.degree
        cols = []
        for k in range(n):
            basis = [Fraction(0)] * n
            basis[k] = Fraction(1)
            cols.append(_poly_mulmod(self.coords, basis, self.field.min_poly))
        return linalg.transpose(cols)

    def norm(self) -> Fraction:
        return linalg.det(self.mult_matrix())

    def trace(self) -> Fraction:
        M = self.mult_matrix()
        return sum((M[i][i] for i in range(len(M))), Fraction(0))

    def charpoly(self) -> List[Fraction]:
        return linalg.charpoly(self.mult_matrix())

    def minpoly(self) -> List[Fraction]:
        """Monic minimal polynomial over Q, constant term first."""
        if self.is_rational():
            return [-self.coords[0], Fraction(1)]
        cp = self.charpoly()
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(cp)], _X, domain="QQ")
        _, factors = poly.factor_list()
        (g, _), = factors
        g = g.monic()
        return [Fraction(int(c.p), int(c.q)) for c in reversed(g.all_coeffs())]

    def degree(self) -> int:
        return len(self.minpoly()) - 1

    def apply_automorphism(self, image_of_gen: "AlgebraicNumber") -> "AlgebraicNumber":
        """Image under the field endomorphism sending theta to ``image_of_gen``."""
        result = image_of_gen.field.zero()
        for c in reversed(self.coords):
            result = result * image_of_gen + c
        return result

    # embeddings ----------------------------------------------------------
    def embed(self, index: int = 0, precision_bits: int = 64):
        """Certified interval for the image under embedding ``index``.

        Real embeddings return an ``iv.mpf``; complex ones an ``iv.mpc``.
        """
        return embed(self, Place.real(index) if index < self.field.signature()[0] else Place.complex(index),
                     precision_bits)

    def sign(self, index: int = 0) -> int:
        """Exact sign at a real embedding (refining precision as needed)."""
        if self.is_zero():
            return 0
        if self.is_rational():
            return 1 if self.coords[0] > 0 else -1
        bits = 64
        while True:
            x = self.embed(index, bits)
            if x.a > 0:
                return 1
            if x.b < 0:
                return -1
            bits *= 2
            if bits > 1 << 14:
                raise PrecisionExhausted("could not determine sign")

    def abs(self, index: int = 0) -> "AlgebraicNumber":
        """``|x|`` at a real embedding, as an element of the same field."""
        return -self if self.sign(index) < 0 else self

    # presentation --------------------------------------------------------
    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.field.label}, {self})"

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.coords[0])
        terms = []
        for k, c in enumerate(self.coords):
            if c == 0:
                continue
            mon = "" if k == 0 else ("a" if k == 1 else f"a^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mon)
            elif c == -1:
                terms.append(f"-{mon}")
            else:
                terms.append(f"{c}*{mon}")
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"field": self.field.poly_str, "coords": [str(c) for c in self.coords]}

    @classmethod
    def from_json(cls, doc: dict) -> "AlgebraicNumber":
        field = NumberField(doc["field"])
        return cls(field, [Fraction(c) for c in doc["coords"]])


def to_number(x, field: Optional[NumberField] = None) -> AlgebraicNumber:
    """Coerce ints, fractions and strings like ``"1/2"`` into a field."""
    field = field or QQ
    if isinstance(x, AlgebraicNumber):
        if x.field == field:
            return x
        if x.field.is_rational:
            return field(x.coords[0])
        raise MixedFields(f"{x.field.label} vs {field.label}")
    return field(Fraction(x))


def embed(x: AlgebraicNumber, place: Place, precision_bits: int = 64):
    """Certified interval containing the image of ``x`` at an archimedean place."""
    if precision_bits < 32:
        raise PreconditionError("precision_bits must be at least 32")
    if place.is_finite:
        raise PreconditionError("embed needs an archimedean place")
    F = x.field
    r1, r2 = F.signature()
    if place.index >= r1 + r2:
        raise PreconditionError(f"embedding index {place.index} out of range")
    is_real = place.index < r1
    with _precision(precision_bits + 16):
        if x.is_rational():
            q = _iv_rational(x.coords[0])
            return q if is_real else iv.mpc(q, iv.mpf(0))
        e = F.root_enclosures(precision_bits)[place.index]
        r = e.radius
        if is_real:
            theta = _outward(e.center, r)
            acc = iv.mpf(0)
        else:
            c = e.center
            theta = iv.mpc(_outward(c.real, r), _outward(c.imag, r))
            acc = iv.mpc(0, 0)
        for c in reversed(x.coords):
            acc = acc * theta + _iv_rational(c)
        return acc


def log_abs(x: AlgebraicNumber, index: int, precision_bits: int = 64):
    """Interval for ``log |sigma_index(x)|``."""
    if x.is_zero():
        raise ZeroInput("log of zero")
    bits = precision_bits
    while True:
        v = embed(x, Place.real(index) if index < x.field.signature()[0] else Place.complex(index), bits)
        with _precision(bits + 16):
            a = abs(v)
            if a.a > 0:
                return iv.log(a)
        bits *= 2
        if bits > 1 << 14:
            raise PrecisionExhausted("could not separate value from zero")


# ---------------------------------------------------------------------------
# matrices over a number field
# ---------------------------------------------------------------------------

def _mat_mul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[reduce(lambda s, t: s + t, (A[i][l] * B[l][j] for l in range(m))) for j in range(k)]
            for i in range(n)]


def _mat_inverse(M, F: NumberField):
    n = len(M)
    A = [[F(x) for x in row] + [F(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if not A[i][c].is_zero()), None)
        if p is None:
            raise PreconditionError("matrix is not invertible")
        A[c], A[p] = A[p], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


def _trace(M):
    return reduce(lambda s, t: s + t, (M[i][i] for i in range(len(M))))


def _common_field(generators) -> NumberField:
    fields = set()
    for M in generators:
        for row in M:
            for x in row:
                if isinstance(x, AlgebraicNumber) and not x.field.is_rational:
                    fields.add(x.field)
    if len(fields) > 1:
        raise MixedFields("generators live in different fields")
    return fields.pop() if fields else QQ


# ---------------------------------------------------------------------------
# subfields and trace fields
# ---------------------------------------------------------------------------

@dataclass
class Subfield:
    """A subfield of an ambient field with a chosen primitive element."""

    field: NumberField
    primitive: AlgebraicNumber
    basis: List[AlgebraicNumber]

    @property
    def degree(self) -> int:
        return self.field.degree


def generated_subfield(values: Iterable[AlgebraicNumber], ambient: NumberField) -> Subfield:
    """The subfield of ``ambient`` generated over Q by ``values``."""
    basis_rows: List[List[Fraction]] = [[Fraction(1)] + [Fraction(0)] * (ambient.degree - 1)]
    basis = [ambient.one()]

    def absorb(y: AlgebraicNumber) -> bool:
        nonlocal basis_rows
        row = list(y.coords)
        if linalg.rank(basis_rows + [row]) > len(basis_rows):
            basis_rows = basis_rows + [row]
            basis.append(y)
            return True
        return False

    for v in values:
        absorb(to_number(v, ambient))
    grew = True
    while grew:
        grew = False
        for a, b in itertools.combinations_with_replacement(list(basis), 2):
            if absorb(a * b):
                grew = True
        if len(basis) == ambient.degree:
            break
    k = len(basis)
    primitive = _primitive_element(basis, k)
    return Subfield(_field_of(primitive), primitive, basis)


def _primitive_element(basis: List[AlgebraicNumber], k: int) -> AlgebraicNumber:
    if k == 1:
        return basis[0].field.zero()
    if k == 2:
        # prefer sqrt(d) with d squarefree
        c, b, _ = basis[1].minpoly()
        disc = b * b - 4 * c
        num, den = disc.numerator * disc.denominator, disc.denominator
        d = squarefree_part(num)
        s = sympy.integer_nthroot(num // d, 2)[0]
        return (2 * basis[1] + b) * Fraction(den, s)
    for y in basis[1:]:
        if y.degree() == k:
            return y
    for coeffs in itertools.product(range(-2, 3), repeat=len(basis) - 1):
        y = reduce(lambda s, t: s + t, (c * b for c, b in zip(coeffs, basis[1:])))
        if y.degree() == k:
            return y
    raise PreconditionError("no primitive element found in the search box")


def _field_of(y: AlgebraicNumber) -> NumberField:
    """A field ``Q[x]/(g)`` with ``g`` the integral-scaled minimal polynomial of ``y``."""
    mp_ = y.minpoly()
    k = len(mp_) - 1
    if k == 1:
        return QQ
    # c * y has integral minimal polynomial when c clears all denominators
    c = 1
    for i, a in enumerate(mp_[:-1]):
        c = lcm(c, a.denominator)
    coeffs = [int(a * c ** (k - i)) for i, a in enumerate(mp_)]
    return NumberField(coeffs)


@dataclass
class TraceFieldResult:
    field: NumberField
    generator: AlgebraicNumber   # primitive element inside the ambient field
    stabilized: bool
    traces: List[AlgebraicNumber]


def _words(n_gens: int, length: int):
    """Freely reduced words over generators and inverses (letters +-(i+1))."""
    letters = [i + 1 for i in range(n_gens)] + [-(i + 1) for i in range(n_gens)]
    frontier = [()]
    yield ()
    for _ in range(length):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        for w in nxt:
            yield w
        frontier = nxt


def trace_field(generators: Sequence[Sequence[Sequence]], word_bound: int,
                representation: str = "standard") -> TraceFieldResult:
    """Field generated by traces of words of length at most ``word_bound``.

    ``representation="adjoint"`` uses ``tr(g) tr(g^-1) - 1``, the trace of the
    adjoint action on trace-zero matrices.  ``stabilized`` reports whether
    the bounds ``word_bound - 1`` and ``word_bound`` give the same field; it
    is a heuristic, not a proof of stabilization.
    """
    if word_bound < 1:
        raise PreconditionError("word_bound must be at least 1")
    if representation not in ("standard", "adjoint"):
        raise PreconditionError(f"unknown representation {representation!r}")
    F = _common_field(generators)
    gens = [[[to_number(x, F) for x in row] for row in M] for M in generators]
    n = len(gens[0])
    if any(len(M) != n or any(len(r) != n for r in M) for M in gens):
        raise PreconditionError("generators must be square of a common size")
    invs = [_mat_inverse(M, F) for M in gens]
    ident = [[F(int(i == j)) for j in range(n)] for i in range(n)]
    cache: Dict[tuple, tuple] = {(): (ident, ident)}

    def word_mats(w):
        if w in cache:
            return cache[w]
        M, Minv = word_mats(w[:-1])
        a = w[-1]
        g, ginv = (gens[a - 1], invs[a - 1]) if a > 0 else (invs[-a - 1], gens[-a - 1])
        out = (_mat_mul(M, g), _mat_mul(ginv, Minv))
        cache[w] = out
        return out

    def value(w):
        M, Minv = word_mats(w)
        if representation == "standard":
            return _trace(M)
        return _trace(M) * _trace(Minv) - 1

    by_len: Dict[int, List[AlgebraicNumber]] = {}
    for w in _words(len(gens), word_bound):
        by_len.setdefault(len(w), []).append(value(w))
    upto = lambda k: [t for L in range(k + 1) for t in by_len.get(L, [])]
    full = generated_subfield(upto(word_bound), F)
    prev = generated_subfield(upto(word_bound - 1), F)
    return TraceFieldResult(full.field, full.primitive, prev.degree == full.degree, upto(word_bound))


# ---------------------------------------------------------------------------
# composita
# ---------------------------------------------------------------------------

@dataclass
class Compositum:
    field: NumberField
    image1: AlgebraicNumber   # image of the first field's generator
    image2: AlgebraicNumber

    def lift1(self, x: AlgebraicNumber) -> AlgebraicNumber:
        return x.apply_automorphism(self.image1) if not x.field.is_rational else self.field(x.coords[0])

    def lift2(self, x: AlgebraicNumber) -> AlgebraicNumber:
        return x.apply_automorphism(self.image2) if not x.field.is_rational else self.field(x.coords[0])


def compositum(K1: NumberField, K2: NumberField) -> Compositum:
    """A field containing copies of ``K1`` and ``K2`` (degree capped at 8).

    The copies are fixed through the designated embeddings: theta1 + c*theta2
    is evaluated at index 0 of each factor and the irreducible factor of the
    resultant vanishing there defines the compositum.
    """
    if K1 == K2:
        return Compositum(K1, K1.gen(), K1.gen())
    if K1.is_rational:
        return Compositum(K2, K2(K1.gen().coords[0]), K2.gen())
    if K2.is_rational:
        return Compositum(K1, K1.gen(), K1(K2.gen().coords[0]))
    y = sympy.Symbol("y")
    f1 = sum(c * y ** k for k, c in enumerate(K1.min_poly))
    f2 = sum(c * y ** k for k, c in enumerate(K2.min_poly))
    for c in range(1, 20):
        # roots of h are theta1 + c*theta2
        h = sympy.Poly(sympy.resultant(f2, f1.subs(y, _X - c * y), y), _X)
        if sympy.degree(sympy.gcd(h, h.diff(_X)), _X) > 0:
            continue
        with _precision(200):
            t1 = K1.root_enclosures(128)[0].center
            t2 = K2.root_enclosures(128)[0].center
            target = t1 + c * t2
            best = None
            for g, _ in h.factor_list()[1]:
                val = abs(mp.polyval([mp.mpf(int(a)) for a in g.all_coeffs()], target))
                if best is None or val < best[0]:
                    best = (val, g)
        g = best[1].monic()
        if g.degree() > MAX_DEGREE:
            raise FieldTooLarge(f"compositum has degree {g.degree()} > {MAX_DEGREE}")
        den = 1
        for a in g.all_coeffs():
            den = lcm(den, int(sympy.Rational(a).q))
        coeffs = [int(a) for a in reversed(g.all_coeffs())]
        if den != 1:
            continue
        K = NumberField(coeffs)
        gamma = K.gen()
        # theta2 is a common root of f2(Y) and f1(gamma - c Y) over K
        p2 = [K(a) for a in K2.min_poly]
        p1 = _poly_compose_linear(K1.min_poly, gamma, -c, K)
        G = _poly_gcd(p2, p1)
        if len(G) != 2:
            continue
        theta2 = -G[0] / G[1]
        theta1 = gamma - c * theta2
        return Compositum(K, theta1, theta2)
    raise FieldTooLarge("no separating linear combination found")


def _poly_compose_linear(coeffs: Sequence[int], a: AlgebraicNumber, b: int, K: NumberField):
    """Coefficients (over K, constant first) of f(a + b*Y)."""
    out = [K.zero()]
    for c in reversed(coeffs):
        # out = out * (a + bY) + c
        shifted = [K.zero()] + [x * b for x in out]
        scaled = [x * a for x in out] + [K.zero()]
        out = [s + t for s, t in zip(shifted, scaled)]
        out[0] = out[0] + c
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out


def _poly_gcd(a, b):
    """Monic gcd of two polynomials over a number field."""

    def trim(p):
        p = list(p)
        while len(p) > 1 and p[-1].is_zero():
            p.pop()
        return p

    def is_zero(p):
        return len(p) == 1 and p[0].is_zero()

    a, b = trim(a), trim(b)
    while not is_zero(b):
        r = list(a)
        while len(r) >= len(b) and not is_zero(r):
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[shift + i] = r[shift + i] - f * c
            r = trim(r)
            if len(r) > 1 and r[-1].is_zero():
                r.pop()
        a, b = b, r
    inv = a[-1].inverse()
    return [x * inv for x in a]
