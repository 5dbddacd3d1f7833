"""Exact rational and integer linear algebra.

Matrices are lists of rows.  Rational routines work over
:class:`fractions.Fraction`; lattice routines work over Python ``int`` and
treat a matrix as the list of its row vectors (a generating set of the
lattice they span).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

Vec = List[Fraction]
Mat = List[List[Fraction]]
IntMat = List[List[int]]


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

def fmat(rows: Iterable[Iterable]) -> Mat:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence]) -> list:
    if not M:
        return []
    return [list(col) for col in zip(*M)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def vec_mat(v: Sequence, A: Sequence[Sequence]) -> list:
    if not A:
        return []
    return [sum(x * A[i][j] for i, x in enumerate(v)) for j in range(len(A[0]))]


def rref(M: Sequence[Sequence]) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form and pivot columns."""
    R = fmat(M)
    if not R:
        return R, []
    nrows, ncols = len(R), len(R[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return R, pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1])


def row_basis(M: Sequence[Sequence]) -> Mat:
    """A basis (in RREF) of the row space of ``M``."""
    R, piv = rref(M)
    return R[: len(piv)]


def nullspace(M: Sequence[Sequence], ncols: Optional[int] = None) -> Mat:
    """Basis of ``{x : M x = 0}``."""
    if not M:
        n = ncols or 0
        return identity(n)
    R, piv = rref(M)
    n = len(R[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """One solution of ``A x = b`` or ``None``."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return x


def det(M: Sequence[Sequence]) -> Fraction:
    A = fmat(M)
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


def inverse(M: Sequence[Sequence]) -> Mat:
    n = len(M)
    aug = [list(row) + e for row, e in zip(fmat(M), identity(n))]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def charpoly(M: Sequence[Sequence]) -> List[Fraction]:
    """Coefficients (constant term first) of ``det(x I - M)``.

    Faddeev-LeVerrier recursion; exact over the rationals.
    """
    A = fmat(M)
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        AM = mat_mul(A, Mk)
        c = coeffs[n - k + 1]
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = mat_mul(A, Mk)
        coeffs[n - k] = -sum(AMk[i][i] for i in range(n)) / k
    return coeffs


def poly_at_matrix(coeffs: Sequence[Fraction], M: Sequence[Sequence]) -> Mat:
    """Evaluate a polynomial (constant term first) at a square matrix."""
    n = len(M)
    result = [[Fraction(0)] * n for _ in range(n)]
    A = fmat(M)
    for c in reversed(coeffs):
        result = mat_mul(result, A)
        for i in range(n):
            result[i][i] += c
    return result


def clear_denominators(v: Sequence[Fraction]) -> List[int]:
    """Primitive integer vector on the same ray as ``v``."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_with_transform(rows: Sequence[Sequence[int]]) -> Tuple[IntMat, IntMat]:
    """Row Hermite normal form ``H`` and unimodular ``U`` with ``U A = H``.

    ``H`` keeps all ``m`` rows; the zero rows sit at the bottom.  Pivots are
    positive and entries above a pivot are reduced into ``[0, pivot)``.
    """
    A = [[int(x) for x in row] for row in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            Ar, Ai = A[r], A[i]
            A[r] = [x * p + y * q for p, q in zip(Ar, Ai)]
            A[i] = [-bg * p + ag * q for p, q in zip(Ar, Ai)]
            Ur, Ui = U[r], U[i]
            U[r] = [x * p + y * q for p, q in zip(Ur, Ui)]
            U[i] = [-bg * p + ag * q for p, q in zip(Ur, Ui)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        piv = A[r][c]
        for i in range(r):
            q = A[i][c] // piv
            if q:
                A[i] = [p - q * s for p, s in zip(A[i], A[r])]
                U[i] = [p - q * s for p, s in zip(U[i], U[r])]
        r += 1
    return A, U


def hnf(rows: Sequence[Sequence[int]]) -> IntMat:
    """Nonzero rows of the Hermite normal form: a canonical lattice basis."""
    if not rows:
        return []
    H, _ = hnf_with_transform(rows)
    return [row for row in H if any(row)]


def integer_left_kernel(M: Sequence[Sequence[int]], nrows: Optional[int] = None) -> IntMat:
    """Basis (in HNF) of ``{x in Z^m : x M = 0}``."""
    m = len(M) if M else (nrows or 0)
    if not M or not M[0]:
        return [[int(i == j) for j in range(m)] for i in range(m)]
    H, U = hnf_with_transform(M)
    ker = [U[i] for i, row in enumerate(H) if not any(row)]
    return hnf(ker) if ker else []


def integer_right_kernel(M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> IntMat:
    """Basis of ``{x in Z^n : M x = 0}`` (rows of the result)."""
    if not M:
        n = ncols or 0
        return [[int(i == j) for j in range(n)] for i in range(n)]
    return integer_left_kernel(transpose(M))


def saturate(rows: Sequence[Sequence[int]], n: int) -> IntMat:
    """Basis of ``Z^n`` intersected with the rational span of ``rows``."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    perp = nullspace(rows, n)
    if not perp:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    C = [clear_denominators(v) for v in perp]
    return integer_right_kernel(C, n)


def lattice_index(rows: Sequence[Sequence[int]], n: int) -> Optional[int]:
    """Index of the lattice spanned by ``rows`` in ``Z^n``; ``None`` if infinite."""
    H = hnf(rows)
    if len(H) < n:
        return None
    idx = 1
    for i, row in enumerate(H):
        idx *= row[next(j for j, x in enumerate(row) if x)]
    return idx


def same_lattice(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    return hnf(A) == hnf(B)


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return hnf(list(basis) + [list(v)]) == hnf(basis)


def smith_invariants(M: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero invariant factors of an integer matrix."""
    A = [[int(x) for x in row] for row in M]
    if not A or not A[0]:
        return []
    while True:
        H = hnf(A)
        if not H:
            return []
        Ht = hnf(transpose(H))
        if _is_diagonal(Ht):
            diag = [Ht[i][i] for i in range(min(len(Ht), len(Ht[0])))]
            diag = [abs(d) for d in diag if d]
            return _fix_divisibility(diag)
        A = Ht


def _is_diagonal(M: IntMat) -> bool:
    return all(x == 0 for i, row in enumerate(M) for j, x in enumerate(row) if i != j)


def _fix_divisibility(diag: List[int]) -> List[int]:
    d = list(diag)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                g = gcd(d[i], d[j])
                l = d[i] * d[j] // g
                if (d[i], d[j]) != (g, l):
                    d[i], d[j] = g, l
                    changed = True
    return d


def lll_reduce(rows: Sequence[Sequence[int]]) -> IntMat:
    """LLL-reduced basis of the lattice spanned by linearly independent rows."""
    from sympy.polys.domains import ZZ
    from sympy.polys.matrices import DomainMatrix

    if not rows:
        return []
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), len(rows[0])), ZZ)
    red = dm.lll()
    return [[int(x) for x in row] for row in red.to_list()]
