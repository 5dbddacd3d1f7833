"""Character lattices with a finite group action and the isogeny they force.

A :class:`GaloisModule` is a finite group of integer matrices acting on
column character vectors (``sigma . chi = A_sigma chi``).  For an element
``gamma`` given by the values of the basis characters and a character
``chi``, the map ``nu : Z[G] -> X``, ``a -> sum a_sigma (sigma . chi)`` has
image of finite index ``d`` when the orbit of ``chi`` spans.  When two
such data share the value ``chi_1(gamma_1) = chi_2(gamma_2)`` and the kernels
of ``nu_1``, ``nu_2`` agree, ``nu_1(a) -> nu_2(a)`` extends to a rational map
``rho`` and ``pi* = d rho`` is an integral map ``X_1 -> X_2`` with
``pi*(chi_1) = d chi_2`` and ``(pi* e)(gamma_2)^d = e(gamma_1)^(d^2)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import ArithGroupsError, PreconditionError
from .mulrel import DEFAULT_BUDGET, MultiplicativeTuple, SearchBudget, is_root_of_unity, monomial, relation_lattice
from .numfield import QQ, AlgebraicNumber, NumberField, to_number
from .rootsys import RootSystem, match_root_systems


class IsogenyError(ArithGroupsError):
    module = "isogeny"


class ValueInconsistent(IsogenyError, ValueError):
    pass


class NotIrreducible(IsogenyError):
    pass


class KernelMismatch(IsogenyError):
    pass


class ValueMismatch(IsogenyError):
    pass


class GroupMismatch(IsogenyError, ValueError):
    pass


IntMat = List[List[int]]


def _key(M) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in M)


def _imul(A, B) -> IntMat:
    return [[int(x) for x in row] for row in linalg.mat_mul(A, B)]


class GaloisModule:
    """Integer matrices forming a finite group, listed one per group element."""

    def __init__(self, action: Sequence[Sequence[Sequence[int]]]):
        mats = [[[int(x) for x in row] for row in M] for M in action]
        if not mats:
            raise PreconditionError("a module needs at least the identity")
        r = len(mats[0])
        if any(len(M) != r or any(len(row) != r for row in M) for M in mats):
            raise PreconditionError("action matrices must be square of one size")
        index = {_key(M): i for i, M in enumerate(mats)}
        if len(index) != len(mats):
            raise PreconditionError("action lists a matrix twice")
        ident = [[int(i == j) for j in range(r)] for i in range(r)]
        if _key(ident) not in index:
            raise PreconditionError("identity missing from the action")
        table = []
        for A in mats:
            if abs(linalg.det(A)) != 1:
                raise PreconditionError("action matrices must be invertible over Z")
            row = []
            for B in mats:
                k = index.get(_key(_imul(A, B)))
                if k is None:
                    raise PreconditionError("action is not closed under multiplication")
                row.append(k)
            table.append(row)
        self.rank = r
        self.action = mats
        self.table = table
        self.identity_index = index[_key(ident)]

    @property
    def group_order(self) -> int:
        return len(self.action)

    def orbit_matrix(self, chi: Sequence[int]) -> IntMat:
        """Rows are ``sigma . chi`` in the listed group order."""
        return [[int(x) for x in linalg.mat_vec(A, chi)] for A in self.action]

    @classmethod
    def generated_by(cls, generators: Sequence[Sequence[Sequence[int]]], cap: int = 64) -> "GaloisModule":
        r = len(generators[0])
        ident = [[int(i == j) for j in range(r)] for i in range(r)]
        seen = {_key(ident): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for M in frontier:
                for g in generators:
                    P = _imul(g, M)
                    if _key(P) not in seen:
                        seen[_key(P)] = P
                        nxt.append(P)
                        if len(seen) > cap:
                            raise PreconditionError("generated group is too large")
            frontier = nxt
        return cls(sorted(seen.values()))

    def conjugate(self, P: Sequence[Sequence[int]]) -> "GaloisModule":
        """The module ``P A P^-1`` (same element order), for unimodular ``P``."""
        Pinv = linalg.inverse(P)
        out = []
        for A in self.action:
            C = linalg.mat_mul(linalg.mat_mul(P, A), Pinv)
            if any(Fraction(x).denominator != 1 for row in C for x in row):
                raise PreconditionError("conjugating matrix is not unimodular")
            out.append([[int(x) for x in row] for row in C])
        return GaloisModule(out)


@dataclass
class TorusElementData:
    """Values at the basis characters; optional field automorphisms per group element.

    ``automorphisms[i]`` is the image of the field generator under the
    automorphism attached to ``module.action[i]``.
    """

    module: GaloisModule
    values: List[AlgebraicNumber]
    automorphisms: Optional[List[AlgebraicNumber]] = None

    def __post_init__(self):
        field = next((v.field for v in self.values if isinstance(v, AlgebraicNumber)
                      and not v.field.is_rational), QQ)
        self.values = [to_number(v, field) for v in self.values]
        self.field = field
        if len(self.values) != self.module.rank:
            raise PreconditionError("one value per basis character is required")
        if any(v.is_zero() for v in self.values):
            raise PreconditionError("values must be nonzero")
        if self.automorphisms is not None and len(self.automorphisms) != self.module.group_order:
            raise PreconditionError("one automorphism per group element is required")

    def value(self, chi: Sequence[int]) -> AlgebraicNumber:
        return monomial(self.values, chi, self.field)

    def check_galois(self) -> None:
        """Spot-check ``value(sigma . e) == sigma(value(e))`` on every basis character."""
        if self.automorphisms is None:
            return
        r = self.module.rank
        for A, img in zip(self.module.action, self.automorphisms):
            img = to_number(img, self.field)
            for k in range(r):
                e = [int(i == k) for i in range(r)]
                lhs = self.value(linalg.mat_vec(A, e))
                rhs = self.values[k].apply_automorphism(img) if not self.field.is_rational else self.values[k]
                if lhs != rhs:
                    raise ValueInconsistent(f"value of sigma.e{k} is not the conjugate of e{k}'s value")


@dataclass
class NuData:
    orbit: IntMat
    image: IntMat                 # HNF basis of the image lattice
    index: Optional[int]          # None when the image has infinite index
    kernel: IntMat                # basis of the kernel in Z[G] coordinates
    lattice_kernel: IntMat        # kernel of the orbit map alone


def nu_data(module: GaloisModule, chi: Sequence[int], element: Optional[TorusElementData] = None,
            budget: SearchBudget = DEFAULT_BUDGET) -> NuData:
    """Image and kernel of ``a -> sum a_sigma sigma.chi``.

    With ``element`` the kernel is the set of ``a`` whose image character
    takes a root-of-unity value at the element (the relation lattice of the
    values pulled back); without it the plain lattice kernel.
    """
    chi = [int(x) for x in chi]
    if not any(chi):
        raise PreconditionError("chi must be nonzero")
    if len(chi) != module.rank:
        raise PreconditionError("chi has the wrong length")
    M = module.orbit_matrix(chi)
    image = linalg.hnf(M)
    index = linalg.lattice_index(M, module.rank)
    lat_ker = linalg.integer_left_kernel(M, len(M))
    if element is None:
        kernel = lat_ker
    else:
        element.check_galois()
        R = relation_lattice(MultiplicativeTuple(element.values, element.field), budget)
        kernel = _pullback_kernel(M, R.basis)
    return NuData(M, image, index, kernel, lat_ker)


def _pullback_kernel(M: IntMat, R: IntMat) -> IntMat:
    """Basis of ``{a : a M in span_Z(R)}``."""
    g = len(M)
    if not R:
        return linalg.integer_left_kernel(M, g)
    stacked = [list(row) for row in M] + [[-x for x in row] for row in R]
    K = linalg.integer_left_kernel(stacked, len(stacked))
    proj = [row[:g] for row in K if any(row[:g])]
    return linalg.hnf(proj) if proj else []


@dataclass
class IsogenyResult:
    pi_star: IntMat      # r2 x r1, acting on column characters of X(T1)
    d: int
    m1: int
    m2: int

    def to_json(self) -> dict:
        return {"pi_star": self.pi_star, "d": self.d, "m1": self.m1, "m2": self.m2}


def _same_group(mod1: GaloisModule, mod2: GaloisModule) -> None:
    if mod1.group_order != mod2.group_order:
        raise GroupMismatch("modules have different group orders")
    if mod1.table != mod2.table:
        raise GroupMismatch("listed group elements do not multiply compatibly")


def build_isogeny(t1: TorusElementData, chi1: Sequence[int], t2: TorusElementData, chi2: Sequence[int],
                  budget: SearchBudget = DEFAULT_BUDGET) -> IsogenyResult:
    mod1, mod2 = t1.module, t2.module
    _same_group(mod1, mod2)
    chi1 = [int(x) for x in chi1]
    chi2 = [int(x) for x in chi2]
    t1.check_galois()
    t2.check_galois()
    lam1, lam2 = t1.value(chi1), t2.value(chi2)
    if lam1 != lam2:
        raise ValueMismatch(f"chi1(gamma1) = {lam1} differs from chi2(gamma2) = {lam2}")
    if is_root_of_unity(lam1) is not None:
        raise ValueMismatch("the common value is a root of unity; pass to elements of infinite order")
    nu1 = nu_data(mod1, chi1, t1, budget)
    nu2 = nu_data(mod2, chi2, t2, budget)
    for k, nu in ((1, nu1), (2, nu2)):
        if nu.index is None:
            raise NotIrreducible(f"the orbit of chi{k} spans a sublattice of infinite index")
    if not linalg.same_lattice(nu1.kernel, nu2.kernel):
        raise KernelMismatch("value kernels of nu1 and nu2 differ")
    if not linalg.same_lattice(nu1.lattice_kernel, nu2.lattice_kernel):
        raise KernelMismatch("kernels of nu1 and nu2 differ")
    d = nu1.index
    # rho with rho(sigma.chi1) = sigma.chi2:  M1 rho^T = M2
    r1, r2 = mod1.rank, mod2.rank
    rho_t = []
    for j in range(r2):
        col = linalg.solve(nu1.orbit, [row[j] for row in nu2.orbit])
        if col is None:
            raise KernelMismatch("orbit relations of chi1 do not hold for chi2")
        rho_t.append(col)
    pi = [[d * rho_t[j][i] for i in range(r1)] for j in range(r2)]
    if any(x.denominator != 1 for row in pi for x in row):
        raise IsogenyError("d * rho is not integral")
    pi_star = [[int(x) for x in row] for row in pi]
    if linalg.mat_vec(pi_star, chi1) != [d * x for x in chi2]:
        raise IsogenyError("pi*(chi1) != d chi2")
    result = IsogenyResult(pi_star, d, d * d, d)
    # (pi* e)(gamma2)^d / e(gamma1)^(d^2) = w^d with w below; it is 1 iff
    # w is a root of unity of order dividing d
    for k in range(r1):
        e = [int(i == k) for i in range(r1)]
        w = t2.value(linalg.mat_vec(pi_star, e)) / (t1.values[k] ** d)
        order = is_root_of_unity(w)
        if order is None or d % order:
            raise ValueMismatch(f"(pi* e{k})(gamma2)^d != e{k}(gamma1)^(d^2)")
    return result


def check_root_compat(result: IsogenyResult, rs1: RootSystem, rs2: RootSystem,
                      roots1: Optional[Sequence[Sequence[int]]] = None,
                      roots2: Optional[Sequence[Sequence[int]]] = None):
    """Match root systems through ``pi*``.

    ``roots_i`` give the simple roots as character vectors (columns of the
    returned matrix are the roots); identity when omitted.
    """
    E1 = linalg.transpose(roots1) if roots1 is not None else linalg.identity(rs1.rank)
    E2 = linalg.transpose(roots2) if roots2 is not None else linalg.identity(rs2.rank)
    if len(E2) != len(E2[0]):
        raise PreconditionError("roots of the second system must form a basis")
    M = linalg.mat_mul(linalg.mat_mul(linalg.inverse(E2), result.pi_star), E1)
    return match_root_systems(M, rs1, rs2)


# ---------------------------------------------------------------------------
# instance generator
# ---------------------------------------------------------------------------

def _companion(coeffs: Sequence[int]) -> IntMat:
    """Companion matrix of the monic polynomial with the given low coefficients."""
    n = len(coeffs)
    C = [[0] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = -coeffs[i]
    return C


def _block(*blocks: IntMat) -> IntMat:
    n = sum(len(b) for b in blocks)
    M = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                M[k + i][k + j] = x
        k += len(b)
    return M


def _perm_matrix(p: Sequence[int]) -> IntMat:
    n = len(p)
    return [[int(p[j] == i) for j in range(n)] for i in range(n)]


_TEMPLATES: List[Tuple[str, List[IntMat]]] = [
    ("trivial1", [[[1]]]),
    ("sign1", [[[-1]]]),
    ("swap2", [_perm_matrix([1, 0])]),
    ("sign+triv", [_block([[1]], [[-1]])]),
    ("C4 on Z^2", [_companion([1, 0])]),
    ("C3 on Z^2", [_companion([1, 1])]),
    ("C6 on Z^2", [_companion([1, -1])]),
    ("C3 on Z^3", [_perm_matrix([1, 2, 0])]),
    ("S3 on Z^3", [_perm_matrix([1, 0, 2]), _perm_matrix([1, 2, 0])]),
    ("C4 on Z^4", [_perm_matrix([1, 2, 3, 0])]),
    ("C4 + sign", [_block(_companion([1, 0]), [[-1]])]),
    ("C4 + sign + triv", [_block(_companion([1, 0]), [[-1]], [[1]])]),
    ("C6 + C2", [_block(_companion([1, -1]), [[-1]])]),
    ("C3 + triv", [_block(_companion([1, 1]), [[1]])]),
    ("swap + sign", [_block(_perm_matrix([1, 0]), [[-1]])]),
]


def random_unimodular(rng: random.Random, r: int, steps: int = 4) -> IntMat:
    M = [[int(i == j) for j in range(r)] for i in range(r)]
    if r == 1:
        return [[rng.choice([1, -1])]]
    for _ in range(steps):
        i, j = rng.sample(range(r), 2)
        c = rng.choice([-1, 1])
        M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    return M


@dataclass
class GeneratedInstance:
    t1: TorusElementData
    chi1: List[int]
    t2: TorusElementData
    chi2: List[int]
    template: str
    corrupted: bool
    rho: List[List[Fraction]]     # sigma.chi1 -> sigma.chi2 as a rational matrix


_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def generate_instance(rng: random.Random, corrupt: bool = False) -> GeneratedInstance:
    """A pair of tori data related by an explicit lattice map.

    The second module is ``P A P^-1`` for unimodular ``P``; ``chi1 = k chi0``,
    ``chi2 = P chi0`` and ``psi(gamma2) = (P^-1 psi)(gamma1)^k``, so the two
    characters share their value.  With ``corrupt`` the second element is
    replaced by one whose value map factors through a rank-one map fixing
    ``chi2``: the shared value survives but the value kernel grows.
    """
    while True:
        name, gens = rng.choice(_TEMPLATES)
        r = len(gens[0])
        if corrupt and r < 2:
            continue
        base = GaloisModule.generated_by(gens)
        U = random_unimodular(rng, r)
        mod1 = base.conjugate(U)
        chi0 = [rng.randint(-2, 2) for _ in range(r)]
        if not any(chi0) or linalg.lattice_index(mod1.orbit_matrix(chi0), r) is None:
            continue
        break
    k = rng.randint(1, 2)
    P = random_unimodular(rng, r)
    Pinv = [[int(x) for x in row] for row in linalg.inverse(P)]
    mod2 = mod1.conjugate(P)
    primes = rng.sample(_PRIMES, r)
    values1 = [QQ(p) for p in primes]
    t1 = TorusElementData(mod1, values1)
    # e_j(gamma2) = (P^-1 e_j)(gamma1)^k
    values2 = [t1.value([k * Pinv[i][j] for i in range(r)]) for j in range(r)]
    chi1 = [k * x for x in chi0]
    chi2 = [int(x) for x in linalg.mat_vec(P, chi0)]
    t2 = TorusElementData(mod2, values2)
    if corrupt:
        g = 0
        for x in chi2:
            g = gcd(g, x)
        c = [x // g for x in chi2]
        w = _dual_vector(c)
        # psi(gamma2') = (c w^T psi)(gamma2): e_j -> c(gamma2)^(w_j)
        cval = t2.value(c)
        t2 = TorusElementData(mod2, [cval ** wj for wj in w])
    rho = [[Fraction(x, k) for x in row] for row in P]
    if rng.random() < 0.5:
        t1, chi1, t2, chi2 = t2, chi2, t1, chi1
        rho = [[k * x for x in row] for row in linalg.inverse(P)]
    return GeneratedInstance(t1, chi1, t2, chi2, name, corrupt, rho)


def _dual_vector(c: Sequence[int]) -> List[int]:
    """Integer ``w`` with ``w . c = 1`` for primitive ``c``."""
    H, U = linalg.hnf_with_transform([[x] for x in c])
    # U c = (1, 0, ..., 0)^T, so the first row of U works
    if H[0][0] != 1:
        raise PreconditionError("vector is not primitive")
    return list(U[0])
