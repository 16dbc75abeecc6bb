"""Exact rational linear algebra over :class:`fractions.Fraction`.

Scalars are plain ``Fraction`` objects (which are always stored in lowest
terms with a positive denominator), vectors are tuples of fractions and
matrices are lists of such tuples.  Everything here is pure: inputs are never
mutated and outputs are freshly allocated.

The module also provides the integer-lattice tools the rest of the package
leans on: Hermite and Smith normal forms, lattices spanned by rational
vectors, lattice-point enumeration in bounded regions and preimage lattices
cut out by integrality constraints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
QVec = tuple  # tuple[Fraction, ...]
QMat = list  # list[QVec]


class UnboundedRegion(ValueError):
    """Raised when lattice points are requested in an unbounded region."""


# ---------------------------------------------------------------------------
# scalars and serialisation


def rat(x) -> Fraction:
    """Coerce ints, strings like ``"-3/4"`` and fractions to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted; pass a string or Fraction")
    return Fraction(x)


def fmt_rat(x) -> str:
    """Serialise a rational as ``"p/q"`` (``"p"`` when the denominator is one)."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    return Fraction(s)


def ceil_rat(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_rat(x: Fraction) -> int:
    return x.numerator // x.denominator


def frac_up(x: Fraction) -> Fraction:
    """The fractional part ``ceil(x) - x`` in ``[0, 1)``."""
    return ceil_rat(x) - x


# ---------------------------------------------------------------------------
# vectors


def qvec(xs: Iterable) -> QVec:
    return tuple(rat(x) for x in xs)


def zero_vec(n: int) -> QVec:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> QVec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u: Sequence, v: Sequence) -> QVec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> QVec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence) -> QVec:
    return tuple(c * a for a in u)


def vneg(u: Sequence) -> QVec:
    return tuple(-a for a in u)


def is_zero(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def is_integral(u: Sequence) -> bool:
    return all(Fraction(a).denominator == 1 for a in u)


def lcm_denominators(u: Iterable) -> int:
    m = 1
    for a in u:
        m = math.lcm(m, Fraction(a).denominator)
    return m


def primitive(u: Sequence) -> tuple:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    if is_zero(u):
        raise ValueError("the zero vector has no primitive representative")
    m = lcm_denominators(u)
    ints = [int(Fraction(a) * m) for a in u]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    return tuple(a // g for a in ints)


def primitive_line(u: Sequence) -> tuple:
    """Primitive integer vector spanning the line through ``u``, first nonzero entry positive."""
    p = primitive(u)
    for a in p:
        if a != 0:
            return p if a > 0 else tuple(-b for b in p)
    return p


def as_ints(u: Sequence) -> tuple:
    if not is_integral(u):
        raise ValueError(f"vector {u!r} is not integral")
    return tuple(int(a) for a in u)


# ---------------------------------------------------------------------------
# matrices


def qmat(rows: Iterable[Iterable]) -> QMat:
    return [qvec(r) for r in rows]


def transpose(A: Sequence[Sequence], ncols: int | None = None) -> QMat:
    if not A:
        return [tuple() for _ in range(ncols or 0)]
    return [tuple(col) for col in zip(*A)]


def mat_vec(A: Sequence[Sequence], x: Sequence) -> QVec:
    return tuple(dot(row, x) for row in A)


def vec_mat(x: Sequence, A: Sequence[Sequence], ncols: int | None = None) -> QVec:
    """Row vector times matrix."""
    if not A:
        return zero_vec(ncols or 0)
    n = len(A[0])
    out = [Fraction(0)] * n
    for xi, row in zip(x, A):
        if xi:
            for j, a in enumerate(row):
                out[j] += xi * a
    return tuple(out)


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> QMat:
    Bt = transpose(B)
    return [tuple(dot(row, col) for col in Bt) for row in A]


def identity(n: int) -> QMat:
    return [unit_vec(n, i) for i in range(n)]


def rref(A: Sequence[Sequence], ncols: int | None = None) -> tuple[QMat, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    M = [list(map(rat, row)) for row in A]
    if not M:
        return [], []
    n = len(M[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [a * inv for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def rank(A: Sequence[Sequence]) -> int:
    return len(rref(A)[1]) if A else 0


def mat_kernel(A: Sequence[Sequence], ncols: int | None = None) -> list[QVec]:
    """Basis of ``{x : A x = 0}``, one vector per free column of the RREF.

    ``ncols`` is required when ``A`` has no rows.
    """
    if not A:
        if ncols is None:
            raise ValueError("ncols is required for an empty matrix")
        return identity(ncols)
    n = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def row_space_basis(A: Sequence[Sequence]) -> list[QVec]:
    return rref(A)[0] if A else []


def solve(A: Sequence[Sequence], b: Sequence) -> QVec | None:
    """One solution of ``A x = b`` or ``None`` if the system is inconsistent."""
    if not A:
        return None if any(b) else tuple()
    n = len(A[0])
    aug = [tuple(row) + (rat(bi),) for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return tuple(x)


def express_in_basis(basis: Sequence[Sequence], v: Sequence) -> QVec | None:
    """Coefficients ``y`` with ``sum y_i basis_i = v``; ``None`` when ``v`` is outside the span."""
    if not basis:
        return tuple() if is_zero(v) else None
    return solve(transpose(basis), v)


def inverse(A: Sequence[Sequence]) -> QMat:
    n = len(A)
    aug = [tuple(row) + unit_vec(n, i) for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


# ---------------------------------------------------------------------------
# integer normal forms


def _int_matrix(A: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in A:
        r = []
        for a in row:
            a = rat(a)
            if a.denominator != 1:
                raise ValueError("integer matrix expected")
            r.append(int(a))
        out.append(r)
    return out


def hermite_normal_form(A: Sequence[Sequence], reduce: bool = True):
    """Row Hermite normal form: returns ``(H, U)`` with ``U`` unimodular and ``U A = H``.

    ``H`` is in row echelon form with positive pivots; zero rows are kept at
    the bottom so that ``H`` has the shape of ``A``.  With ``reduce=True`` the
    entries above each pivot are reduced into ``[0, pivot)``, which makes
    ``H`` unique for the row lattice of ``A``.  ``reduce=False`` stops after
    the echelon stage (positive pivots, no upward reduction).
    """
    H = _int_matrix(A)
    m = len(H)
    n = len(H[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def addrow(dst, src, f):
        H[dst] = [a - f * b for a, b in zip(H[dst], H[src])]
        U[dst] = [a - f * b for a, b in zip(U[dst], U[src])]

    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            U[r], U[piv] = U[piv], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c] != 0:
                    addrow(i, r, H[i][c] // H[r][c])
                    if H[i][c] != 0:
                        done = False
            if done:
                break
        if all(H[i][c] == 0 for i in range(r, m)):
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
            U[r] = [-a for a in U[r]]
        pivots.append((r, c))
        r += 1
    if reduce:
        for (pr, pc) in pivots:
            for i in range(pr):
                f = H[i][pc] // H[pr][pc]
                if f:
                    addrow(i, pr, f)
    return [tuple(Fraction(a) for a in row) for row in H], [tuple(Fraction(a) for a in row) for row in U]


def smith_normal_form(A: Sequence[Sequence]):
    """Smith normal form ``D = U A V`` with ``U``, ``V`` unimodular.

    Returns ``(D, U, V)`` as lists of int lists.  The diagonal entries are
    nonnegative and each divides the next.
    """
    D = _int_matrix(A)
    m = len(D)
    n = len(D[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst -= f * row_src
        D[dst] = [a - f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst -= f * col_src
        for row in D:
            row[dst] -= f * row[src]
        for row in V:
            row[dst] -= f * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j] != 0]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // D[t][t])
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // D[t][t])
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            # fold the offending row into row t to restore divisibility
            D[t] = [a + b for a, b in zip(D[t], D[bad[0]])]
            U[t] = [a + b for a, b in zip(U[t], U[bad[0]])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return D, U, V


def smith_invariants(A: Sequence[Sequence]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    if not A:
        return []
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i] != 0]


# ---------------------------------------------------------------------------
# lattices


def _lattice_basis_of_rows(rows: Sequence[Sequence]) -> list[QVec]:
    """A ℤ-basis of the group generated by rational ``rows``, via HNF."""
    rows = [qvec(r) for r in rows if not is_zero(r)]
    if not rows:
        return []
    m = 1
    for r in rows:
        m = math.lcm(m, lcm_denominators(r))
    H, _ = hermite_normal_form([[a * m for a in r] for r in rows])
    return [tuple(a / m for a in h) for h in H if not is_zero(h)]


@dataclass(frozen=True)
class IntLattice:
    """A lattice ``{sum z_i b_i : z ∈ ℤ^k}`` spanned by linearly independent rational rows."""

    ambient_dim: int
    basis: tuple

    def __post_init__(self):
        basis = tuple(qvec(b) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if any(len(b) != self.ambient_dim for b in basis):
            raise ValueError("basis vectors must live in the ambient space")
        if rank(list(basis)) != len(basis):
            raise ValueError("lattice basis must be linearly independent")

    @classmethod
    def standard(cls, n: int) -> "IntLattice":
        return cls(n, tuple(identity(n)))

    @classmethod
    def spanned_by(cls, n: int, vectors: Sequence[Sequence]) -> "IntLattice":
        """The group generated by arbitrary rational vectors (HNF-reduced basis)."""
        return cls(n, tuple(_lattice_basis_of_rows(vectors)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, x: Sequence) -> QVec | None:
        return express_in_basis(self.basis, qvec(x))

    def contains(self, x: Sequence) -> bool:
        y = self.coordinates(x)
        return y is not None and is_integral(y)

    def point(self, z: Sequence) -> QVec:
        return vec_mat(qvec(z), list(self.basis), self.ambient_dim)

    def canonical_basis(self) -> tuple:
        return tuple(_lattice_basis_of_rows(self.basis))

    def __eq__(self, other):
        if not isinstance(other, IntLattice):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.canonical_basis() == other.canonical_basis()

    def __hash__(self):
        return hash((self.ambient_dim, self.canonical_basis()))


def preimage_lattice(C: Sequence[Sequence], V: Sequence[Sequence] | None = None, ambient_dim: int | None = None) -> IntLattice:
    """The lattice ``{x ∈ span(V) : C x ∈ ℤ^k}``.

    ``V`` defaults to the standard basis.  The constraints must cut out a
    lattice, i.e. ``C`` restricted to ``span(V)`` has to be injective;
    otherwise a ``ValueError`` is raised.
    """
    C = qmat(C)
    if V is None:
        n = ambient_dim if ambient_dim is not None else len(C[0])
        V = identity(n)
    V = qmat(V)
    n = len(V[0]) if V else (ambient_dim or 0)
    if not V:
        return IntLattice(n, ())
    # M[i][j] = <C_i, V_j>; the lattice in V-coordinates is the dual of the row lattice of M.
    M = [tuple(dot(c, v) for v in V) for c in C]
    rows = _lattice_basis_of_rows(M)
    if len(rows) != len(V):
        raise ValueError("integrality constraints do not cut out a full-rank lattice in span(V)")
    dual = transpose(inverse(rows))  # rows of (R^{-1})^T
    basis = [vec_mat(y, V) for y in dual]
    return IntLattice(n, tuple(_lattice_basis_of_rows(basis)))


# ---------------------------------------------------------------------------
# lattice points


def enumerate_lattice_points(H_rep: Sequence[tuple], lattice: IntLattice | None = None, dim: int | None = None) -> list[QVec]:
    """Lattice points of ``{x : a·x >= b for (a, b) in H_rep}``, sorted lexicographically.

    The region is bounded by vertex enumeration (double description) in the
    lattice coordinates; a nonzero recession direction raises
    :class:`UnboundedRegion`.
    """
    from .polyhedron import cone_hrep_to_vrep  # local import: polyhedron depends on this module

    if lattice is None:
        if dim is None:
            dim = len(H_rep[0][0])
        lattice = IntLattice.standard(dim)
    B = list(lattice.basis)
    k = len(B)
    if k == 0:
        origin = zero_vec(lattice.ambient_dim)
        return [origin] if all(dot(qvec(a), origin) >= rat(b) for a, b in H_rep) else []
    cons = [(tuple(dot(qvec(a), bj) for bj in B), rat(b)) for a, b in H_rep]
    # homogenise: (a, -b)·(z, h) >= 0, h >= 0
    hom = [a + (-b,) for a, b in cons] + [zero_vec(k) + (Fraction(1),)]
    rays, lin = cone_hrep_to_vrep(hom, [], k + 1)
    if lin or any(r[-1] == 0 for r in rays):
        raise UnboundedRegion("region has a nonzero recession direction")
    verts = [tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays]
    if not verts:
        return []
    lo = [ceil_rat(min(v[i] for v in verts)) for i in range(k)]
    hi = [floor_rat(max(v[i] for v in verts)) for i in range(k)]
    found = []

    def rec(i: int, partial: list[int]):
        if i == k:
            z = [Fraction(x) for x in partial]
            if all(dot(a, z) >= b for a, b in cons):
                found.append(lattice.point(z))
            return
        for x in range(lo[i], hi[i] + 1):
            rec(i + 1, partial + [x])

    rec(0, [])
    return sorted(found)
