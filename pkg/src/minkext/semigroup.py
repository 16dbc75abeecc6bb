"""Finitely generated pointed affine semigroups and pairs of them.

Elements are integer tuples.  Membership ``s ∈ S`` is decided exactly by a
memoised search over the generators: every generator has positive degree
under a grading that is positive on the cone ``cone(S)``, so the search is
finite.  All "within bound" statements in this module refer to the total
degree of an element, i.e. the least number of generators summing to it.

For a pair ``T ⊆ S`` the relative boundary ``∂_T(S)`` consists of the
elements ``s`` whose only ``T``-descendant in ``S`` is ``s`` itself.  Since
``T ⊆ S`` it is enough to test ``s - t ∉ S`` for the generators ``t`` of
``T``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .exactcore import (
    IntLattice,
    enumerate_lattice_points,
    hermite_normal_form,
    is_zero,
    smith_normal_form,
    rank as qrank,
)
from .polyhedron import ConeZ

DEFAULT_BOUND = 6

Vec = tuple  # tuple[int, ...]


class NotPointed(ValueError):
    """The cone or semigroup contains a line."""


class NotFreePair(ValueError):
    """A pair admits two different boundary decompositions of one element."""


class NotCocartesian(ValueError):
    """An extension diagram failed the co-Cartesian check."""


def _ivec(x: Iterable) -> Vec:
    out = []
    for a in x:
        if hasattr(a, "denominator") and a.denominator != 1:
            raise ValueError(f"non-integral entry {a}")
        out.append(int(a))
    return tuple(out)


def _int_form(a) -> Vec:
    m = 1
    for x in a:
        m = math.lcm(m, getattr(x, "denominator", 1))
    return tuple(int(x * m) for x in a)


def _add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def _sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def _apply(M: Sequence[Sequence[int]], x: Vec) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, x)) for row in M)


# ---------------------------------------------------------------------------
# Hilbert bases


def hilbert_basis(C: ConeZ, lattice: IntLattice | None = None) -> list[Vec]:
    """The irreducible elements of ``C ∩ lattice`` (default ``ℤ^n``), sorted.

    Candidates are the lattice points of ``C`` whose degree does not exceed
    the degree of the zonotope spanned by the primitive rays; every Hilbert
    basis element lies in that zonotope.  Candidates are then scanned by
    increasing degree, keeping those not reachable from a smaller kept one.
    """
    if not C.is_pointed:
        raise NotPointed("Hilbert bases are only defined for pointed cones")
    n = C.dim
    if not C.rays:
        return []
    if lattice is not None and lattice != IntLattice.standard(n):
        return _hilbert_basis_sublattice(C, lattice)
    w = C.grading()
    top = sum(_dot(w, r) for r in C.rays)
    region = [(tuple(a), 0) for a in C.ineqs]
    region += [(tuple(e), 0) for e in C.eqs] + [(tuple(-x for x in e), 0) for e in C.eqs]
    region.append((tuple(-x for x in w), -top))
    pts = [_ivec(p) for p in enumerate_lattice_points(region, dim=n)]
    pts = [p for p in pts if any(p)]
    pts.sort(key=lambda p: (_dot(w, p), p))
    basis: list[Vec] = []
    for p in pts:
        if not any(C.contains(_sub(p, h)) for h in basis):
            basis.append(p)
    return sorted(basis)


def _hilbert_basis_sublattice(C: ConeZ, lattice: IntLattice) -> list[Vec]:
    from .exactcore import vec_mat, dot as qdot

    B = list(lattice.basis)
    k = len(B)
    # cone in lattice coordinates z, x = z B
    ineqs = [tuple(qdot(a, b) for b in B) for a in C.ineqs]
    eqs = [tuple(qdot(e, b) for b in B) for e in C.eqs]
    Cz = ConeZ.from_hrep(ineqs, k, eqs)
    out = [tuple(vec_mat(z, B, lattice.ambient_dim)) for z in hilbert_basis(Cz)]
    return sorted(out)


def lattice_monoid_generators(C: ConeZ) -> list[Vec]:
    """A finite generating set of ``C ∩ ℤ^n`` that also works for non-pointed cones.

    For pointed cones this is the Hilbert basis.  Otherwise the union of the
    Hilbert bases of the (pointed) intersections with all closed orthants is
    returned; it generates but need not be minimal.
    """
    if C.is_pointed:
        return hilbert_basis(C)
    n = C.dim
    gens: set[Vec] = set()
    for signs in itertools.product((1, -1), repeat=n):
        ineqs = list(C.ineqs) + [tuple(s if j == i else 0 for j in range(n)) for i, s in enumerate(signs)]
        piece = ConeZ.from_hrep(ineqs, n, C.eqs)
        gens.update(hilbert_basis(piece))
    return sorted(gens)


# ---------------------------------------------------------------------------
# semigroups


class AffineSemigroup:
    """The subsemigroup of ``ℤ^rank`` generated by finitely many integer vectors.

    ``grading`` (optional) is an integer linear form that is positive on all
    generators; by default one is derived from the facets of ``cone(S)``.
    """

    def __init__(self, generators: Iterable[Sequence[int]], rank: int | None = None, grading: Sequence[int] | None = None):
        gens = sorted({_ivec(g) for g in generators if any(g)})
        if rank is None:
            if not gens:
                raise ValueError("rank is required for the trivial semigroup")
            rank = len(gens[0])
        if any(len(g) != rank for g in gens):
            raise ValueError("generator of wrong length")
        self.rank = rank
        self.generators: tuple = tuple(gens)
        self.cone = ConeZ.from_rays(gens, rank) if gens else ConeZ.from_rays([], rank)
        if not self.cone.is_pointed:
            raise NotPointed("semigroup is not pointed")
        if grading is None:
            grading = self.cone.grading()
        self.grading: Vec = _ivec(grading)
        if any(_dot(self.grading, g) <= 0 for g in gens):
            raise ValueError("grading must be positive on every generator")
        self._ineqs = [_int_form(a) for a in self.cone.ineqs]
        self._eqs = [_int_form(e) for e in self.cone.eqs]
        self._memo: dict[Vec, bool] = {tuple([0] * rank): True}
        self._elements: dict[int, dict[Vec, int]] = {}

    def __repr__(self):
        return f"AffineSemigroup(rank={self.rank}, generators={list(self.generators)})"

    def __eq__(self, other):
        return isinstance(other, AffineSemigroup) and self.rank == other.rank and set(self.minimal_generators()) == set(other.minimal_generators())

    def __hash__(self):
        return hash((self.rank, tuple(self.minimal_generators())))

    @property
    def zero(self) -> Vec:
        return tuple([0] * self.rank)

    def grade(self, x: Sequence[int]) -> int:
        return _dot(self.grading, x)

    def contains(self, x: Sequence[int]) -> bool:
        x = _ivec(x)
        hit = self._memo.get(x)
        if hit is not None:
            return hit
        stack = [x]
        # iterative post-order evaluation of the memoised recursion
        while stack:
            y = stack[-1]
            if y in self._memo:
                stack.pop()
                continue
            if self.grade(y) <= 0 or not self._in_cone(y):
                self._memo[y] = False
                stack.pop()
                continue
            pending = False
            result = False
            for g in self.generators:
                z = _sub(y, g)
                v = self._memo.get(z)
                if v is None:
                    stack.append(z)
                    pending = True
                    break
                if v:
                    result = True
                    break
            if pending and not result:
                continue
            self._memo[y] = result
            stack.pop()
        return self._memo[x]

    def _in_cone(self, y: Vec) -> bool:
        return all(_dot(a, y) >= 0 for a in self._ineqs) and all(_dot(e, y) == 0 for e in self._eqs)

    def elements(self, bound: int) -> dict[Vec, int]:
        """All elements of degree ``<= bound`` mapped to their degree."""
        if bound in self._elements:
            return self._elements[bound]
        seen = {self.zero: 0}
        layer = [self.zero]
        for d in range(1, bound + 1):
            nxt = []
            for x in layer:
                for g in self.generators:
                    y = _add(x, g)
                    if y not in seen:
                        seen[y] = d
                        nxt.append(y)
            layer = nxt
        self._elements[bound] = seen
        return seen

    def elements_up_to_grade(self, level: int, grading: Sequence[int] | None = None) -> list[Vec]:
        """All elements with ``grading(x) <= level`` (grading must be positive on generators)."""
        w = self.grading if grading is None else _ivec(grading)
        if any(_dot(w, g) <= 0 for g in self.generators):
            raise ValueError("grading must be positive on every generator")
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = _add(x, g)
                    if y not in seen and _dot(w, y) <= level:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen, key=lambda x: (_dot(w, x), x))

    def degree(self, x: Sequence[int]) -> int | None:
        """Least number of generators summing to ``x`` (``None`` if ``x ∉ S``)."""
        x = _ivec(x)
        if not self.contains(x):
            return None
        memo: dict[Vec, int] = {self.zero: 0}

        def rec(y):
            if y in memo:
                return memo[y]
            best = None
            for g in self.generators:
                z = _sub(y, g)
                if self.contains(z):
                    d = rec(z)
                    if best is None or d + 1 < best:
                        best = d + 1
            memo[y] = best
            return best

        return rec(x)

    def minimal_generators(self) -> list[Vec]:
        """Generators that are not sums of two nonzero elements."""
        out = []
        for g in self.generators:
            if not any(h != g and self.contains(_sub(g, h)) for h in self.generators):
                out.append(g)
        return out

    def group(self) -> IntLattice:
        return IntLattice.spanned_by(self.rank, self.generators) if self.generators else IntLattice(self.rank, ())

    def to_json(self) -> dict:
        return {"rank": self.rank, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "AffineSemigroup":
        return cls([tuple(int(x) for x in g) for g in data["generators"]], rank=int(data["rank"]))


@dataclass
class SemigroupPair:
    """``T ⊆ S`` inside a common ambient ``ℤ^n``."""

    T: AffineSemigroup
    S: AffineSemigroup

    def __post_init__(self):
        if self.T.rank != self.S.rank:
            raise ValueError("T and S must share the ambient group")
        for t in self.T.generators:
            if not self.S.contains(t):
                raise ValueError(f"generator {t} of T is not in S")
        self._dec: dict[Vec, list] = {}
        self._t_cache: tuple[int, list] | None = None

    @property
    def rank(self) -> int:
        return self.S.rank

    def is_boundary(self, s: Sequence[int]) -> bool:
        s = _ivec(s)
        return self.S.contains(s) and not any(self.S.contains(_sub(s, t)) for t in self.T.generators)

    def _t_elements(self, level: int) -> list[Vec]:
        if self._t_cache is None or self._t_cache[0] < level:
            self._t_cache = (level, self.T.elements_up_to_grade(level, self.S.grading))
        return [t for t in self._t_cache[1] if self.S.grade(t) <= level]

    def decompositions(self, s: Sequence[int]) -> list[tuple[Vec, Vec]]:
        """All ``(b, t)`` with ``b ∈ ∂_T(S)``, ``t ∈ T`` and ``b + t = s``."""
        s = _ivec(s)
        if s in self._dec:
            return self._dec[s]
        out = []
        if self.S.contains(s):
            for t in self._t_elements(self.S.grade(s)):
                b = _sub(s, t)
                if self.is_boundary(b):
                    out.append((b, t))
        out.sort()
        self._dec[s] = out
        return out

    def to_json(self) -> dict:
        return {"T": self.T.to_json(), "S": self.S.to_json()}


def relative_boundary(pair: SemigroupPair, bound: int = DEFAULT_BOUND) -> list[Vec]:
    """Elements of ``∂_T(S)`` of degree ``<= bound`` (sorted by degree, then lexicographically)."""
    elems = pair.S.elements(bound)
    out = [s for s in elems if pair.is_boundary(s)]
    return sorted(out, key=lambda s: (elems[s], s))


@dataclass(frozen=True)
class Free:
    bound: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotFree:
    """Two decompositions ``b + t = b2 + t2`` of one element."""

    witness: tuple  # (b, t, b2, t2)

    def __bool__(self):
        return False


def is_free(pair: SemigroupPair, bound: int = DEFAULT_BOUND) -> Free | NotFree:
    """Search for an element of degree ``<= bound`` with two boundary decompositions."""
    elems = pair.S.elements(bound)
    for s in sorted(elems, key=lambda x: (elems[x], x)):
        dec = pair.decompositions(s)
        if len(dec) >= 2:
            (b1, t1), (b2, t2) = dec[0], dec[1]
            return NotFree((b1, t1, b2, t2))
    return Free(bound)


def decompose(pair: SemigroupPair, s: Sequence[int], bound: int = DEFAULT_BOUND) -> tuple[Vec, Vec]:
    """The retractions ``(∂(s), λ(s))`` of a free pair."""
    if not is_free(pair, bound):
        raise NotFreePair("pair is not free within the search bound")
    s = _ivec(s)
    if not pair.S.contains(s):
        raise ValueError(f"{s} is not an element of S")
    dec = pair.decompositions(s)
    if len(dec) != 1:
        raise NotFreePair(f"{s} has {len(dec)} boundary decompositions")
    return dec[0]


# ---------------------------------------------------------------------------
# quotient groups


class QuotientGroup:
    """``Q = (S - S)/(T - T)`` computed from Hermite and Smith normal forms."""

    def __init__(self, S_generators: Sequence[Sequence[int]], T_generators: Sequence[Sequence[int]], rank: int):
        self.ambient_rank = rank
        G = IntLattice.spanned_by(rank, S_generators) if S_generators else IntLattice(rank, ())
        self.G = G
        rows = []
        for t in T_generators:
            y = G.coordinates(t)
            if y is None or any(a.denominator != 1 for a in y):
                raise ValueError("T - T is not contained in S - S")
            rows.append([int(a) for a in y])
        g = G.rank
        self._rel = rows
        if rows and g:
            D, U, V = smith_normal_form(rows)
            diag = [D[i][i] for i in range(min(len(D), g))]
        else:
            V = [[int(i == j) for j in range(g)] for i in range(g)]
            diag = []
        self._V = V
        self._diag = [d for d in diag if d != 0]
        r = len(self._diag)
        self.rank = g - r
        self.torsion = tuple(d for d in self._diag if d > 1)

    @property
    def invariants(self) -> tuple:
        return (self.rank, self.torsion)

    def q(self, x: Sequence[int]) -> tuple:
        """Normal form of the class of ``x``: torsion residues, then free coordinates."""
        y = self.G.coordinates(tuple(x))
        if y is None or any(a.denominator != 1 for a in y):
            raise ValueError("element is not in S - S")
        y = [int(a) for a in y]
        z = [sum(y[i] * self._V[i][j] for i in range(len(y))) for j in range(len(self._V))]
        r = len(self._diag)
        tors = tuple(z[i] % d for i, d in enumerate(self._diag) if d > 1)
        return tors + tuple(z[r:])

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


# ---------------------------------------------------------------------------
# extension diagrams


@dataclass
class ExtensionDiagram:
    """``(T̃, S̃) → (T, S)`` induced by an integer matrix ``pi`` (lower rank × upper rank)."""

    upper: SemigroupPair
    lower: SemigroupPair
    pi: tuple

    def __post_init__(self):
        self.pi = tuple(tuple(int(a) for a in row) for row in self.pi)
        if len(self.pi) != self.lower.rank or any(len(r) != self.upper.rank for r in self.pi):
            raise ValueError("pi has the wrong shape")
        for g in self.upper.T.generators:
            if not self.lower.T.contains(self.apply(g)):
                raise ValueError(f"pi does not map T̃-generator {g} into T")
        for g in self.upper.S.generators:
            img = self.apply(g)
            if not any(img):
                raise ValueError(f"pi has a nontrivial kernel on S̃ (generator {g})")
            if not self.lower.S.contains(img):
                raise ValueError(f"pi does not map S̃-generator {g} into S")

    def apply(self, x: Sequence[int]) -> Vec:
        return _apply(self.pi, tuple(x))

    def upper_grading(self) -> Vec:
        w = self.lower.S.grading
        return tuple(sum(w[i] * self.pi[i][j] for i in range(len(w))) for j in range(self.upper.rank))

    def to_json(self) -> dict:
        return {"upper": self.upper.to_json(), "lower": self.lower.to_json(), "pi": [list(r) for r in self.pi]}

    @classmethod
    def from_json(cls, data: dict) -> "ExtensionDiagram":
        def pair(d):
            S = AffineSemigroup.from_json(d["S"])
            T = AffineSemigroup([tuple(int(x) for x in g) for g in d["T"]["generators"]], rank=S.rank, grading=S.grading)
            return SemigroupPair(T, S)

        return cls(pair(data["upper"]), pair(data["lower"]), tuple(tuple(r) for r in data["pi"]))


@dataclass
class CheckResult:
    passed: bool
    witness: object = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"passed": self.passed, "witness": _jsonable(self.witness), "detail": self.detail}


def _jsonable(x):
    if isinstance(x, tuple) or isinstance(x, list):
        return [_jsonable(a) for a in x]
    return x


@dataclass
class CocartesianReport:
    C1: CheckResult
    C2: CheckResult
    C3: CheckResult
    bound: int

    def to_json(self) -> dict:
        return {"bound": self.bound, "C1": self.C1.to_json(), "C2": self.C2.to_json(), "C3": self.C3.to_json()}


class _Enumeration:
    """Shared enumeration data for the checks of one diagram."""

    def __init__(self, D: ExtensionDiagram, bound: int):
        self.D = D
        self.bound = bound
        by_degree = D.lower.S.elements(bound)
        self.level = max((D.lower.S.grade(s) for s in by_degree), default=0)
        low = D.lower.S.elements_up_to_grade(self.level)
        self.lower_elems = {s: D.lower.S.grade(s) for s in low}
        w = D.upper_grading()
        self.upper_elems = D.upper.S.elements_up_to_grade(self.level, w)
        self.images: dict[Vec, list[Vec]] = {}
        for u in self.upper_elems:
            self.images.setdefault(D.apply(u), []).append(u)


def _check_c1(E: _Enumeration) -> CheckResult:
    D = E.D
    lower_boundary = [s for s in E.lower_elems if D.lower.is_boundary(s)]
    upper_boundary = [u for u in E.upper_elems if D.upper.is_boundary(u)]
    hit: dict[Vec, Vec] = {}
    for u in upper_boundary:
        img = D.apply(u)
        if not D.lower.is_boundary(img):
            return CheckResult(False, (u, img), "a boundary element upstairs maps off the boundary")
        if img in hit:
            return CheckResult(False, (hit[img], u, img), "two boundary elements share an image")
        hit[img] = u
    for b in sorted(lower_boundary, key=lambda s: (E.lower_elems[s], s)):
        if b not in hit:
            return CheckResult(False, (b,), "boundary element without a boundary preimage")
    return CheckResult(True, None, f"boundary bijection on {len(lower_boundary)} elements")


def _check_group_iso(D: ExtensionDiagram) -> CheckResult:
    Qu = QuotientGroup(D.upper.S.generators, D.upper.T.generators, D.upper.rank)
    Ql = QuotientGroup(D.lower.S.generators, D.lower.T.generators, D.lower.rank)
    image = [D.apply(g) for g in D.upper.S.generators] + list(D.lower.T.generators)
    lhs = IntLattice.spanned_by(D.lower.rank, image) if image else IntLattice(D.lower.rank, ())
    surjective = lhs == Ql.G
    if not surjective:
        return CheckResult(False, {"upper": Qu.to_json(), "lower": Ql.to_json()}, "induced map on quotients is not surjective")
    if Qu.invariants != Ql.invariants:
        return CheckResult(False, {"upper": Qu.to_json(), "lower": Ql.to_json()}, "quotient groups are not isomorphic")
    return CheckResult(True, {"upper": Qu.to_json(), "lower": Ql.to_json()}, "induced map on quotients is an isomorphism")


def _check_c2(E: _Enumeration) -> CheckResult:
    D = E.D
    for u in E.upper_elems:
        dec = D.upper.decompositions(u)
        if len(dec) >= 2:
            return CheckResult(False, (u, dec[0], dec[1]), "upper pair is not free")
    iso = _check_group_iso(D)
    if not iso.passed:
        return iso
    return CheckResult(True, None, "upper pair free within bound and quotient map an isomorphism")


def _check_c3(E: _Enumeration) -> CheckResult:
    D = E.D
    for img in sorted(E.images):
        us = E.images[img]
        if len(us) < 2:
            continue
        bsets = {u: {b for b, _ in D.upper.decompositions(u)} for u in us}
        for u1, u2 in itertools.combinations(us, 2):
            if not (bsets[u1] & bsets[u2]):
                return CheckResult(False, (u1, u2, img), "no common T̃-descendant")
    return CheckResult(True, None, "all fibres connected through common descendants")


def check_cocartesian(diagram: ExtensionDiagram, bound: int = DEFAULT_BOUND) -> CocartesianReport:
    """Conditions C1 (boundary bijection), C2 (free upstairs, quotient iso), C3 (integrality)."""
    E = _Enumeration(diagram, bound)
    return CocartesianReport(_check_c1(E), _check_c2(E), _check_c3(E), bound)


def identity_diagram(pair: SemigroupPair) -> ExtensionDiagram:
    n = pair.rank
    return ExtensionDiagram(pair, pair, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def product_extension(pair: SemigroupPair, F: AffineSemigroup, ell: Sequence[Sequence[int]]) -> ExtensionDiagram:
    """``(T × F, S × F) → (T, S)`` with ``(s, f) ↦ s + ell(f)``; ``ell`` maps ``F`` into ``T``."""
    n, k = pair.rank, F.rank
    pad = lambda v, left: tuple(v) + (0,) * k if left else (0,) * n + tuple(v)
    S_gens = [pad(g, True) for g in pair.S.generators] + [pad(f, False) for f in F.generators]
    T_gens = [pad(g, True) for g in pair.T.generators] + [pad(f, False) for f in F.generators]
    pi = tuple(tuple([int(i == j) for j in range(n)] + [ell[i][j] for j in range(k)]) for i in range(n))
    S = AffineSemigroup(S_gens, rank=n + k)
    T = AffineSemigroup(T_gens, rank=n + k, grading=S.grading)
    return ExtensionDiagram(SemigroupPair(T, S), pair, pi)


def make_pair(T_gens: Sequence[Sequence[int]], S_gens: Sequence[Sequence[int]], rank: int) -> SemigroupPair:
    S = AffineSemigroup(S_gens, rank=rank)
    T = AffineSemigroup(T_gens, rank=rank, grading=S.grading) if T_gens else AffineSemigroup([], rank=rank, grading=S.grading)
    return SemigroupPair(T, S)


# ---------------------------------------------------------------------------
# pushout


def _sublattice_coords(vectors: Sequence[Sequence[int]], rank: int):
    L = IntLattice.spanned_by(rank, vectors)
    def coords(x):
        y = L.coordinates(tuple(x))
        if y is None or any(a.denominator != 1 for a in y):
            raise ValueError("vector outside the generated group")
        return tuple(int(a) for a in y)
    return L, coords


def pushout(diagram: ExtensionDiagram, f: Sequence[Sequence[int]], target_T: AffineSemigroup,
            target_pi: Sequence[Sequence[int]], bound: int = DEFAULT_BOUND) -> ExtensionDiagram:
    """Push a co-Cartesian extension along ``f : T̃ → T''`` over ``T``.

    ``f`` is an integer matrix from the upper ambient group to the ambient of
    ``target_T``; ``target_pi`` maps that ambient to the lower ambient group and
    must satisfy ``target_pi ∘ f = pi`` on ``T̃``.  The new upper semigroup is
    generated by the images of ``S̃`` and ``T''`` in the amalgamated group
    ``(S̃ - S̃) ⊕ (T'' - T'') / ⟨(t̃, -f(t̃))⟩``; elements correspond to
    ``(∂ s̃, f(λ s̃) + t'')``.
    """
    report = check_cocartesian(diagram, bound)
    if not report.C1.passed:
        raise NotCocartesian(report.C1.detail)
    D = diagram
    f = [tuple(int(a) for a in row) for row in f]
    tpi = [tuple(int(a) for a in row) for row in target_pi]
    for g in D.upper.T.generators:
        fg = _apply(f, g)
        if not target_T.contains(fg):
            raise ValueError(f"f does not map {g} into the target semigroup")
        if _apply(tpi, fg) != D.apply(g):
            raise ValueError("f is not a map over T")
    Lu, cu = _sublattice_coords(D.upper.S.generators, D.upper.rank)
    Lt, ct = _sublattice_coords(target_T.generators, target_T.rank)
    nu, nt = Lu.rank, Lt.rank
    rel = [cu(g) + tuple(-a for a in ct(_apply(f, g))) for g in D.upper.T.generators]
    N = nu + nt
    if rel:
        Dm, U, V = smith_normal_form(rel)
        diag = [Dm[i][i] for i in range(min(len(Dm), N)) if Dm[i][i] != 0]
    else:
        V = [[int(i == j) for j in range(N)] for i in range(N)]
        diag = []
    if any(d > 1 for d in diag):
        raise ValueError("amalgamated group has torsion; pushout is not embeddable in a lattice")
    r = len(diag)
    Vq = [[a for a in row] for row in V]

    def q(x):
        z = [sum(x[i] * Vq[i][j] for i in range(N)) for j in range(N)]
        return tuple(z[r:])

    from .exactcore import inverse
    from fractions import Fraction

    Vinv = inverse([[Fraction(a) for a in row] for row in V])
    # section of the quotient map, composed with the map down to the lower ambient group
    up_basis = [tuple(int(a) for a in b) for b in Lu.basis]
    t_basis = [tuple(int(a) for a in b) for b in Lt.basis]

    def down(x):  # x in coordinates (upper-sublattice, target-sublattice)
        ux = [sum(x[i] * up_basis[i][j] for i in range(nu)) for j in range(D.upper.rank)]
        tx = [sum(x[nu + i] * t_basis[i][j] for i in range(nt)) for j in range(target_T.rank)]
        return _add(D.apply(tuple(ux)), _apply(tpi, tuple(tx)))

    cols = []
    for j in range(N - r):
        z = [0] * N
        z[r + j] = 1
        x = [sum(Fraction(z[i]) * Vinv[i][k] for i in range(N)) for k in range(N)]
        x = tuple(int(a) for a in x)
        cols.append(down(x))
    new_pi = tuple(tuple(cols[j][i] for j in range(N - r)) for i in range(D.lower.rank))
    S_gens = [q(cu(g) + (0,) * nt) for g in D.upper.S.generators] + [q((0,) * nu + ct(t)) for t in target_T.generators]
    T_gens = [q((0,) * nu + ct(t)) for t in target_T.generators]
    S = AffineSemigroup(S_gens, rank=N - r)
    T = AffineSemigroup(T_gens, rank=N - r, grading=S.grading)
    return ExtensionDiagram(SemigroupPair(T, S), D.lower, new_pi)
