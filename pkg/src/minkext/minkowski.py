"""Minkowski summands parametrised by ``T(P)``.

For ``ξ = (t, s) ∈ T₊(P)`` the map ``ψ(ξ, ·)`` sends the reference vertex
``v★`` to ``s_v★(ξ)·v★`` and is extended along compact edges by
``ψ(ξ, v^j) - ψ(ξ, v^i) = t_ij(ξ)·(v^j - v^i)``; the closing conditions make
this path independent.  ``P_ξ`` is the convex hull of the images plus the
tail cone of ``P``.  The Kodaira–Spencer vector ``κ(Q)`` of a positioned
summand records the edge dilation factors and which vertices of ``Q`` are
lattice points.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .etaspace import EtaSpace, NotInTP
from .exactcore import (
    UnboundedRegion,
    dot,
    enumerate_lattice_points,
    fmt_rat,
    is_integral,
    primitive,
    qvec,
    rat,
    vadd,
    vscale,
    vsub,
    zero_vec,
)
from .polyhedron import (
    ConeZ,
    RationalPolyhedron,
    TailMismatch,
    cone_over,
    dual_cone,
    face_at,
    minkowski_sum_all,
    normal_cone,
)
from .semigroup import AffineSemigroup, ExtensionDiagram, SemigroupPair, lattice_monoid_generators


class NotASummand(ValueError):
    pass


class SumMismatch(ValueError):
    pass


class NotSurjective(ValueError):
    pass


class NegativeParameterWarning(UserWarning):
    """A parameter with negative entries was used to build a summand."""


# ---------------------------------------------------------------------------
# ψ and P_ξ


@dataclass
class SummandResult:
    xi: tuple
    polyhedron: RationalPolyhedron
    vertex_map: tuple  # ψ(ξ, v^i) for every vertex of P
    in_T_plus: bool
    in_T_Z: bool
    warning: str | None = None

    def to_json(self) -> dict:
        return {
            "xi": [fmt_rat(x) for x in self.xi],
            "polyhedron": self.polyhedron.to_json(),
            "vertex_map": [[fmt_rat(x) for x in v] for v in self.vertex_map],
            "in_T_plus": self.in_T_plus,
            "in_T_Z": self.in_T_Z,
            "warning": self.warning,
        }


def psi_vertex_map(es: EtaSpace, xi: Sequence) -> tuple:
    """``ψ(ξ, v)`` for all vertices, by breadth-first search from ``v★``."""
    P = es.P
    T = es.T
    xi = qvec(xi)
    ref = es.oracle.reference
    out: list = [None] * len(P.vertices)
    out[ref] = vscale(xi[T.s_index(ref)], P.vertices[ref])
    queue = deque([ref])
    while queue:
        a = queue.popleft()
        for b in P.neighbors[a]:
            if out[b] is None:
                k = P.edge_index(a, b)
                out[b] = vadd(out[a], vscale(xi[k], vsub(P.vertices[b], P.vertices[a])))
                queue.append(b)
    for k, e in enumerate(P.edges):
        if vsub(out[e.j], out[e.i]) != vscale(xi[k], e.direction):
            raise NotInTP("closing conditions violated along a compact 2-face")
    return tuple(out)


def psi_summand(es: EtaSpace, xi: Sequence, strict: bool = True) -> SummandResult:
    """``P_ξ``.  Outside ``T₊(P)``: error when ``strict``, otherwise a flagged warning."""
    xi = qvec(xi)
    T = es.T
    if not T.contains(xi):
        raise NotInTP(f"{[fmt_rat(x) for x in xi]} violates the equations of T(P)")
    plus = all(x >= 0 for x in xi)
    msg = None
    if not plus:
        msg = "parameter has negative entries; the summand is built from the formal vertex map"
        if strict:
            raise NotInTP(msg)
        warnings.warn(msg, NegativeParameterWarning, stacklevel=2)
    vmap = psi_vertex_map(es, xi)
    Q = RationalPolyhedron.from_vrep(list(vmap), es.P.tail_rays, dim=es.P.dim)
    return SummandResult(xi, Q, vmap, plus, es.L.contains(xi), msg)


def summand_from_edges(P: RationalPolyhedron, t: Sequence) -> RationalPolyhedron:
    """The polyhedron with edge dilations ``t`` (no vertex parameters), first vertex at 0."""
    out: list = [None] * len(P.vertices)
    out[0] = zero_vec(P.dim)
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in P.neighbors[a]:
            if out[b] is None:
                k = P.edge_index(a, b)
                out[b] = vadd(out[a], vscale(rat(t[k]), vsub(P.vertices[b], P.vertices[a])))
                queue.append(b)
    return RationalPolyhedron.from_vrep(out, P.tail_rays, dim=P.dim)


# ---------------------------------------------------------------------------
# cones of summands


def closing_conditions(P: RationalPolyhedron) -> list[tuple]:
    r = len(P.edges)
    rows = []
    for cyc in P.compact_two_faces:
        for k in range(P.dim):
            row = [Fraction(0)] * r
            for e_idx, sgn in enumerate(cyc.signs):
                if sgn:
                    row[e_idx] += sgn * P.edges[e_idx].direction[k]
            if any(row):
                rows.append(tuple(row))
    return rows


def summand_cone(P: RationalPolyhedron) -> ConeZ:
    """``C(P) = V(P) ∩ ℝ^r_{>=0}``: edge dilations satisfying the closing conditions."""
    r = len(P.edges)
    ineqs = [tuple(int(i == k) for i in range(r)) for k in range(r)]
    return ConeZ.from_hrep(ineqs, r, closing_conditions(P)) if r else ConeZ.from_rays([], 0)


def dim_V(P: RationalPolyhedron) -> int:
    from .exactcore import rank

    rows = closing_conditions(P)
    return len(P.edges) - (rank(rows) if rows else 0)


def t1_dimension(es: EtaSpace) -> int:
    """``dim T(P) - 1``."""
    return es.T.dim - 1


def smooth_in_codim_two(P: RationalPolyhedron) -> list[bool]:
    """Per compact edge: is the cone over the edge unimodular?

    Informational only.  The two primitive generators ``(v, 1)`` span a
    unimodular 2-cone exactly when the gcd of their 2×2 minors is one.
    """
    out = []
    for e in P.edges:
        a = primitive(P.vertices[e.i] + (Fraction(1),))
        b = primitive(P.vertices[e.j] + (Fraction(1),))
        g = 0
        for k, l in itertools.combinations(range(len(a)), 2):
            g = math.gcd(g, a[k] * b[l] - a[l] * b[k])
        out.append(g == 1)
    return out


class TautologicalCone:
    """``{(ξ, w) : ξ ∈ T₊(P), w ∈ P_ξ}`` in ``ℝ^(r+m) ⊕ N_ℝ`` by inequalities."""

    def __init__(self, es: EtaSpace):
        self.es = es
        P = es.P
        T = es.T
        n, d = T.n, P.dim
        self.n, self.d = n, d
        ineqs = []
        for k in range(n):
            ineqs.append(tuple(Fraction(int(j == k)) for j in range(n + d)))
        eqs = [tuple(p) + (Fraction(0),) * d for p in T.perp]
        for a, _b in P.ineqs:
            v = next(i for i, vert in enumerate(P.vertices) if dot(a, vert) == _b)
            ineqs.append(tuple(-x for x in self._psi_form(v, a)) + tuple(a))
        for a, _b in P.eqs:
            eqs.append(tuple(-x for x in self._psi_form(es.oracle.reference, a)) + tuple(a))
        self.ineqs = tuple(ineqs)
        self.eqs = tuple(eqs)

    def _psi_form(self, v: int, a: Sequence) -> tuple:
        """The linear form ``ξ ↦ <ψ(ξ, v), a>`` on ``ℝ^(r+m)``."""
        es = self.es
        P, T = es.P, es.T
        ref = es.oracle.reference
        row = [Fraction(0)] * T.n
        row[T.s_index(ref)] += dot(P.vertices[ref], a)
        path = es.path(ref, v)
        for x, y in zip(path, path[1:]):
            row[P.edge_index(x, y)] += dot(vsub(P.vertices[y], P.vertices[x]), a)
        return tuple(row)

    def contains(self, xi: Sequence, w: Sequence) -> bool:
        x = qvec(xi) + qvec(w)
        return all(dot(a, x) >= 0 for a in self.ineqs) and all(dot(e, x) == 0 for e in self.eqs)

    def fiber(self, xi: Sequence) -> RationalPolyhedron:
        xi = qvec(xi)
        n = self.n
        ineqs = [(a[n:], -dot(a[:n], xi)) for a in self.ineqs[n:]]
        eqs = [(e[n:], -dot(e[:n], xi)) for e in self.eqs if any(e[n:])]
        if any(x < 0 for x in xi) or not self.es.T.contains(xi):
            raise ValueError("parameter outside T₊(P)")
        return RationalPolyhedron.from_hrep(ineqs, eqs, dim=self.d)

    def cone(self) -> ConeZ:
        return ConeZ.from_hrep(self.ineqs, self.n + self.d, self.eqs)

    def to_json(self) -> dict:
        return {
            "inequalities": [[fmt_rat(x) for x in a] for a in self.ineqs],
            "equations": [[fmt_rat(x) for x in e] for e in self.eqs],
        }


def tautological_cone(es: EtaSpace) -> TautologicalCone:
    return TautologicalCone(es)


def cayley_cone(parts: Sequence[RationalPolyhedron]) -> ConeZ:
    """The cone over ``P_0 * ... * P_m`` in ``N_ℝ ⊕ ℝ^(m+1)``."""
    parts = list(parts)
    d = parts[0].dim
    tail = parts[0].tail_cone
    for Q in parts[1:]:
        if Q.dim != d or Q.tail_cone.rays != tail.rays or Q.tail_cone.lineality != tail.lineality:
            raise TailMismatch("summands must share the tail cone")
    k = len(parts)
    gens = []
    for i, Q in enumerate(parts):
        e = tuple(Fraction(int(j == i)) for j in range(k))
        gens.extend(tuple(v) + e for v in Q.vertices)
    gens.extend(tuple(r) + (Fraction(0),) * k for r in parts[0].tail_rays)
    from .exactcore import primitive

    return ConeZ.from_rays([primitive(g) for g in gens], d + k)


def _same_cone(A: ConeZ, B: ConeZ) -> bool:
    return A.dim == B.dim and set(A.rays) == set(B.rays) and A.lineality == B.lineality


def check_fiber_product(es: EtaSpace, xis: Sequence[Sequence]) -> bool:
    """Pulling back the tautological cone along ``e_i ↦ ξ_i`` gives the Cayley cone of the ``P_ξi``."""
    xis = [qvec(x) for x in xis]
    taut = TautologicalCone(es)
    n, d, k = taut.n, taut.d, len(xis)
    ineqs, eqs = [], []
    for i in range(k):
        ineqs.append(tuple(Fraction(0) for _ in range(d)) + tuple(Fraction(int(j == i)) for j in range(k)))

    def pull(row):
        a_xi, a_w = row[:n], row[n:]
        return tuple(a_w) + tuple(dot(a_xi, xi) for xi in xis)

    for a in taut.ineqs[n:]:
        ineqs.append(pull(a))
    for e in taut.eqs:
        r = pull(e)
        if any(r):
            eqs.append(r)
    pulled = ConeZ.from_hrep(ineqs, d + k, eqs)
    parts = [psi_summand(es, xi).polyhedron for xi in xis]
    return _same_cone(pulled, cayley_cone(parts))


def cayley_extension(es: EtaSpace, parts: Sequence[RationalPolyhedron]) -> ExtensionDiagram:
    """The co-Cartesian extension of ``(ℕ, σ^∨)`` attached to ``P = P_0 + ... + P_m``.

    Upstairs: ``S' = C^∨ ∩ (M ⊕ ℤ^(m+1))`` for the Cayley cone ``C`` and
    ``T' = ⟨[0, e_i]⟩``; the map is ``(c, k) ↦ (c, Σ k_i)``.
    """
    parts = list(parts)
    d = es.P.dim
    k = len(parts)
    total = minkowski_sum_all(parts)
    if total != es.P:
        raise SumMismatch("summands do not add up to the polyhedron")
    C = cayley_cone(parts)
    gens = lattice_monoid_generators(dual_cone(C))
    lower_gens = lattice_monoid_generators(dual_cone(cone_over(es.P)))
    lower_S = AffineSemigroup(lower_gens, rank=d + 1)
    lower_T = AffineSemigroup([tuple([0] * d + [1])], rank=d + 1, grading=lower_S.grading)
    pi = tuple(tuple(int(i == j) for j in range(d)) + (0,) * k for i in range(d)) + (tuple([0] * d + [1] * k),)
    w = lower_S.grading
    grading = tuple(sum(w[i] * pi[i][j] for i in range(d + 1)) for j in range(d + k))
    S = AffineSemigroup(gens, rank=d + k, grading=grading)
    T = AffineSemigroup(cayley_t_basis(d, k), rank=d + k, grading=grading)
    return ExtensionDiagram(SemigroupPair(T, S), SemigroupPair(lower_T, lower_S), pi)


def cayley_t_basis(d: int, k: int) -> list[tuple]:
    """``[0, e_0], ..., [0, e_m]`` in summand order."""
    return [tuple([0] * d + [int(j == i) for j in range(k)]) for i in range(k)]


# ---------------------------------------------------------------------------
# Kodaira–Spencer


@dataclass(frozen=True)
class KSVector:
    t: tuple
    s: tuple

    def as_xi(self) -> tuple:
        return tuple(self.t) + tuple(Fraction(x) for x in self.s)

    def to_json(self) -> dict:
        return {"t": [fmt_rat(x) for x in self.t], "s": list(self.s)}


def vertex_correspondence(P: RationalPolyhedron, Q: RationalPolyhedron) -> tuple:
    """``v ↦ v(Q)``: the face of ``Q`` in a generic direction of the normal cone of ``v``."""
    out = []
    for i in range(len(P.vertices)):
        c = normal_cone(P, i).interior_point()
        F = face_at(Q, c)
        if len(F.vertices) != 1 or F.tail_rays:
            raise NotASummand(f"the normal fan of P does not refine that of Q at vertex {i}")
        out.append(F.vertices[0])
    return tuple(out)


def kodaira_spencer(es: EtaSpace, Q: RationalPolyhedron, correspondence: Sequence | None = None) -> KSVector:
    """Edge dilation factors and vertex latticeness flags of a positioned summand ``Q``."""
    P = es.P
    if Q.tail_cone.rays != P.tail_cone.rays or Q.tail_cone.lineality != P.tail_cone.lineality:
        raise NotASummand("tail cones differ")
    vq = tuple(qvec(v) for v in correspondence) if correspondence is not None else vertex_correspondence(P, Q)
    t = []
    for e in P.edges:
        diff = vsub(vq[e.j], vq[e.i])
        k = next(a for a in range(P.dim) if e.direction[a] != 0)
        lam = diff[k] / e.direction[k]
        if vscale(lam, e.direction) != diff or lam < 0:
            raise NotASummand(f"edge {e.i}-{e.j} is not dilated by a nonnegative factor")
        t.append(lam)
    s = tuple(0 if is_integral(v) else 1 for v in vq)
    return KSVector(tuple(t), s)


# ---------------------------------------------------------------------------
# lattice-friendly decompositions


@dataclass
class DecompositionReport:
    summands: list
    correspondences: list
    exceptions: list  # per vertex of P: index of the non-lattice summand, or None / "many"
    direct_verdict: bool
    ks_vectors: list
    additive: bool
    in_T_Z: list
    in_T: list
    ks_verdict: bool

    @property
    def lattice_friendly(self) -> bool:
        return self.direct_verdict

    @property
    def verdicts_agree(self) -> bool:
        return self.direct_verdict == self.ks_verdict

    def to_json(self) -> dict:
        return {
            "summands": [Q.to_json() for Q in self.summands],
            "exceptions": self.exceptions,
            "lattice_friendly": self.direct_verdict,
            "ks_vectors": [k.to_json() for k in self.ks_vectors],
            "additive": self.additive,
            "in_T": self.in_T,
            "in_T_Z": self.in_T_Z,
            "ks_verdict": self.ks_verdict,
            "verdicts_agree": self.verdicts_agree,
        }


def is_lattice_friendly(es: EtaSpace, summands: Sequence[RationalPolyhedron]) -> DecompositionReport:
    """Decide lattice friendliness directly and via ``κ``; both verdicts are reported."""
    P = es.P
    summands = list(summands)
    if minkowski_sum_all(summands) != P:
        raise SumMismatch("summands do not add up to the polyhedron")
    corr = [vertex_correspondence(P, Q) for Q in summands]
    exceptions = []
    ok = True
    for i in range(len(P.vertices)):
        bad = [j for j, vq in enumerate(corr) if not is_integral(vq[i])]
        if len(bad) > 1:
            ok = False
            exceptions.append("many")
        else:
            exceptions.append(bad[0] if bad else None)
    ks = [kodaira_spencer(es, Q, vq) for Q, vq in zip(summands, corr)]
    total = tuple(sum(k.as_xi()[a] for k in ks) for a in range(es.T.n))
    additive = total == es.T.oneone
    in_T = [es.T.contains(k.as_xi()) for k in ks]
    in_TZ = [es.L.contains(k.as_xi()) for k in ks]
    ks_ok = additive and all(in_TZ)
    return DecompositionReport(summands, corr, exceptions, ok, ks, additive, in_TZ, in_T, ks_ok)


def slice_points(es: EtaSpace) -> list[tuple]:
    """``B = T_ℤ(P) ∩ {ξ : ξ ∈ T₊, oneone - ξ ∈ T₊}`` by lattice-point enumeration."""
    T = es.T
    n = T.n
    one = T.oneone
    region = []
    for k in range(n):
        e = tuple(Fraction(int(j == k)) for j in range(n))
        region.append((e, Fraction(0)))
        region.append((tuple(-x for x in e), -one[k]))
    for p in T.perp:
        region.append((p, Fraction(0)))
        region.append((tuple(-x for x in p), Fraction(0)))
    if es.L.rank == 0:
        return [zero_vec(n)]
    pts = enumerate_lattice_points(region, lattice=es.L.lattice, dim=n)
    return sorted(tuple(p) for p in pts)


def _partitions(remaining: tuple, items: list, start: int):
    if all(x == 0 for x in remaining):
        yield []
        return
    for idx in range(start, len(items)):
        b = items[idx]
        if all(x <= y for x, y in zip(b, remaining)):
            rest = tuple(y - x for x, y in zip(b, remaining))
            for tail in _partitions(rest, items, idx):
                yield [b] + tail


@dataclass
class LatticeFriendlyCatalog:
    B: list
    decompositions: list  # lists of ξ
    reports: list

    @property
    def nontrivial(self) -> list:
        return [dec for dec in self.decompositions if len(dec) > 1]

    def to_json(self) -> dict:
        return {
            "B": [[fmt_rat(x) for x in b] for b in self.B],
            "decompositions": [[[fmt_rat(x) for x in xi] for xi in dec] for dec in self.decompositions],
            "certified": [r.lattice_friendly and r.verdicts_agree for r in self.reports],
        }


def enumerate_lattice_friendly(es: EtaSpace) -> LatticeFriendlyCatalog:
    """All decompositions of ``oneone`` into nonzero elements of ``B``, each certified."""
    B = slice_points(es)
    items = sorted((b for b in B if any(b)), reverse=True)
    decs = []
    seen = set()
    for part in _partitions(es.T.oneone, items, 0):
        # a polyhedron without compact edges only decomposes as itself
        key = tuple(sorted(part)) or (tuple(es.T.oneone),)
        if key not in seen:
            seen.add(key)
            decs.append(list(key))
    decs.sort(key=lambda d: (len(d), d))
    reports = [is_lattice_friendly(es, [psi_summand(es, xi).polyhedron for xi in dec]) for dec in decs]
    return LatticeFriendlyCatalog(B, decs, reports)


# ---------------------------------------------------------------------------
# fibers of linear maps of cones


def _apply(M, x):
    return tuple(sum(rat(a) * rat(b) for a, b in zip(row, x)) for row in M)


def positive_fiber(pr: Sequence[Sequence], C: ConeZ, xi: Sequence) -> RationalPolyhedron:
    """``pr^{-1}(ξ) ∩ C`` as a polyhedron."""
    xi = qvec(xi)
    ineqs = [(qvec(a), Fraction(0)) for a in C.ineqs]
    eqs = [(qvec(e), Fraction(0)) for e in C.eqs] + [(qvec(row), x) for row, x in zip(pr, xi)]
    try:
        return RationalPolyhedron.from_hrep(ineqs, eqs, dim=C.dim)
    except (ValueError, UnboundedRegion) as exc:
        raise NotSurjective(f"empty fiber over {[fmt_rat(x) for x in xi]}") from exc


def _poly_equal(A: RationalPolyhedron, B: RationalPolyhedron) -> bool:
    return A == B


def minkowski_linearity_check(pr: Sequence[Sequence], C: ConeZ, samples: Sequence[Sequence]) -> bool:
    """``pr^{-1}(ξ) + pr^{-1}(ξ') = pr^{-1}(ξ + ξ')`` for all pairs of samples."""
    fibers = {tuple(qvec(x)): positive_fiber(pr, C, x) for x in samples}
    keys = list(fibers)
    for a, b in itertools.combinations_with_replacement(keys, 2):
        lhs = minkowski_sum_all([fibers[a], fibers[b]])
        rhs = positive_fiber(pr, C, vadd(a, b))
        if lhs != rhs:
            return False
    return True


def _faces(C: ConeZ) -> list[tuple]:
    """All faces of a cone, each as a sorted tuple of extreme rays."""
    out = set()
    m = len(C.ineqs)
    for size in range(m + 1):
        for Z in itertools.combinations(range(m), size):
            rays = tuple(sorted(r for r in C.rays if all(dot(C.ineqs[k], r) == 0 for k in Z)))
            out.add(rays)
    return sorted(out)


def face_map_check(pr: Sequence[Sequence], C: ConeZ) -> tuple[bool, tuple | None]:
    """Does ``pr`` map every face of ``C`` onto a face of ``pr(C)``?  Returns a witness face on failure."""
    rows = [qvec(r) for r in pr]
    target_dim = len(rows)
    img_rays = [_apply(rows, r) for r in C.rays]
    img_lin = [_apply(rows, l) for l in C.lineality]
    D = ConeZ.from_rays(img_rays, target_dim, img_lin)
    for F in _faces(C):
        imgs = [_apply(rows, r) for r in F]
        x = zero_vec(target_dim)
        for y in imgs:
            x = vadd(x, y)
        Z = [k for k, a in enumerate(D.ineqs) if dot(a, x) == 0]
        minimal = [r for r in D.rays if all(dot(D.ineqs[k], r) == 0 for k in Z)]
        Fimg = ConeZ.from_rays(imgs, target_dim, img_lin)
        if not all(Fimg.contains(r) for r in minimal):
            return False, F
    return True, None


def tautological_projection(es: EtaSpace) -> tuple[list, ConeZ]:
    """The projection ``(ξ, w) ↦ ξ`` together with the tautological cone."""
    taut = TautologicalCone(es)
    n, d = taut.n, taut.d
    pr = [[int(i == j) for j in range(n + d)] for i in range(n)]
    return pr, taut.cone()
