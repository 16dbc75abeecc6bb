"""Rational polyhedra and polyhedral cones.

Conversions between inequality descriptions and generators use the double
description method: constraints are inserted one at a time, the lineality
space is split off first and pairs of rays on opposite sides of the new
hyperplane are combined only when they are combinatorially adjacent.

A :class:`RationalPolyhedron` is stored by its vertices (sorted
lexicographically) and primitive tail rays, together with the irredundant
inequality description computed at construction.  Faces, compact edges and
oriented boundary cycles of compact 2-faces are derived from incidences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exactcore import (
    dot,
    express_in_basis,
    is_zero,
    mat_kernel,
    primitive,
    primitive_line,
    qvec,
    rank,
    rat,
    rref,
    vadd,
    vec_mat,
    vscale,
    vsub,
    zero_vec,
    fmt_rat,
    parse_rat,
)


class UnboundedDirection(ValueError):
    """A linear form is unbounded below on the polyhedron."""


class TailMismatch(ValueError):
    """Two polyhedra were combined although their tail cones differ."""


class NotAFace(ValueError):
    """The given point set is not a face of the polyhedron."""


# ---------------------------------------------------------------------------
# double description


def _dd(ineqs: list[tuple], n: int) -> tuple[list[tuple], list[tuple]]:
    """Extreme rays and a lineality basis of ``{x ∈ ℚ^n : a·x >= 0}``."""
    lin = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    rays: list[tuple] = []
    zsets: list[frozenset] = []
    for k, a in enumerate(ineqs):
        vals = [dot(a, l) for l in lin]
        idx = next((i for i, v in enumerate(vals) if v != 0), None)
        if idx is not None:
            l0 = lin.pop(idx)
            a0 = vals.pop(idx)
            if a0 < 0:
                l0, a0 = tuple(-x for x in l0), -a0
            lin = [primitive_line(vsub(l, vscale(v / a0, l0))) for l, v in zip(lin, vals)]
            new_rays = []
            for r in rays:
                v = dot(a, r)
                new_rays.append(primitive(vsub(r, vscale(v / a0, l0))) if v else r)
            prev = frozenset(range(k))
            rays = new_rays + [primitive(l0)]
            zsets = [z | {k} for z in zsets] + [prev]
            continue
        vals = [dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        new_rays = [rays[i] for i in pos] + [rays[i] for i in zer]
        new_z = [zsets[i] for i in pos] + [zsets[i] | {k} for i in zer]
        for p in pos:
            for q in neg:
                common = zsets[p] & zsets[q]
                adjacent = True
                for i in range(len(rays)):
                    if i != p and i != q and common <= zsets[i]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = vsub(vscale(vals[p], rays[q]), vscale(vals[q], rays[p]))
                new_rays.append(primitive(r))
                new_z.append(common | {k})
        rays, zsets = new_rays, new_z
    return rays, lin


def cone_hrep_to_vrep(ineqs: Sequence[Sequence], eqs: Sequence[Sequence], n: int) -> tuple[list[tuple], list[tuple]]:
    """Generators of ``{x : A x >= 0, E x = 0}`` as (primitive integer rays, lineality basis).

    Rays are canonical: they are projected orthogonally to the lineality space,
    made primitive and sorted.
    """
    ineqs = [qvec(a) for a in ineqs]
    eqs = [qvec(e) for e in eqs]
    K = mat_kernel(eqs, n) if eqs else [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    if not K:
        return [], []
    k = len(K)
    local = [tuple(dot(a, v) for v in K) for a in ineqs]
    local = [a for a in local if not is_zero(a)]
    rays_l, lin_l = _dd(local, k)
    lin = [vec_mat(y, K, n) for y in lin_l]
    lin = _canonical_subspace(lin, n)
    rays = {primitive(_project_out(vec_mat(y, K, n), lin)) for y in rays_l}
    rays = [r for r in rays if not is_zero(r)]
    return sorted(tuple(int(x) for x in r) for r in rays), lin


def _canonical_subspace(vectors: Sequence[Sequence], n: int) -> list[tuple]:
    if not vectors:
        return []
    R, _ = rref([qvec(v) for v in vectors])
    return [tuple(int(x) for x in primitive_line(r)) for r in R]


def _project_out(v: Sequence, subspace: Sequence[Sequence]) -> tuple:
    """Orthogonal projection of ``v`` onto the complement of ``span(subspace)``."""
    if not subspace:
        return qvec(v)
    S = [qvec(s) for s in subspace]
    gram = [[dot(a, b) for b in S] for a in S]
    rhs = [dot(a, v) for a in S]
    from .exactcore import solve

    y = solve(gram, rhs)
    return vsub(qvec(v), vec_mat(y, S, len(v)))


def cone_vrep_to_hrep(rays: Sequence[Sequence], lineality: Sequence[Sequence], n: int) -> tuple[list[tuple], list[tuple]]:
    """Facet normals and equations of ``cone(rays) + span(lineality)``."""
    cons = [qvec(r) for r in rays] + [qvec(l) for l in lineality] + [vscale(-1, qvec(l)) for l in lineality]
    return cone_hrep_to_vrep(cons, [], n)


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class ConeZ:
    """A rational polyhedral cone in ``ℝ^dim`` with both descriptions cached.

    ``rays`` are primitive integer generators of the cone modulo its
    lineality space; ``ineqs``/``eqs`` are primitive facet normals and
    equations: the cone is ``{x : a·x >= 0 for a in ineqs, e·x = 0 for e in eqs}``.
    """

    dim: int
    rays: tuple
    lineality: tuple
    ineqs: tuple
    eqs: tuple

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence], dim: int, lineality: Sequence[Sequence] = ()) -> "ConeZ":
        rays = [qvec(r) for r in rays if not is_zero(r)]
        ineqs, eqs = cone_vrep_to_hrep(rays, lineality, dim)
        r, l = cone_hrep_to_vrep(ineqs, eqs, dim)
        return cls(dim, tuple(r), tuple(l), tuple(ineqs), tuple(eqs))

    @classmethod
    def from_hrep(cls, ineqs: Sequence[Sequence], dim: int, eqs: Sequence[Sequence] = ()) -> "ConeZ":
        r, l = cone_hrep_to_vrep(ineqs, eqs, dim)
        i, e = cone_vrep_to_hrep(r, l, dim)
        return cls(dim, tuple(r), tuple(l), tuple(i), tuple(e))

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def cone_dim(self) -> int:
        return self.dim - len(self.eqs)

    def contains(self, x: Sequence) -> bool:
        x = qvec(x)
        return all(dot(a, x) >= 0 for a in self.ineqs) and all(dot(e, x) == 0 for e in self.eqs)

    def in_interior(self, x: Sequence) -> bool:
        """Relative interior membership."""
        x = qvec(x)
        return all(dot(a, x) > 0 for a in self.ineqs) and all(dot(e, x) == 0 for e in self.eqs)

    def interior_point(self) -> tuple:
        """A point of the relative interior (sum of rays; the origin for linear subspaces)."""
        p = zero_vec(self.dim)
        for r in self.rays:
            p = vadd(p, qvec(r))
        return p

    def grading(self) -> tuple:
        """An integer linear form positive on every nonzero element of a pointed cone."""
        if not self.is_pointed:
            raise ValueError("only pointed cones admit a positive grading")
        w = zero_vec(self.dim)
        for a in self.ineqs:
            w = vadd(w, qvec(a))
        if not self.ineqs:
            return tuple(int(x) for x in w)
        # w is positive on the cone except on directions killed by all facets, which is only 0;
        # directions in span(eqs)^perp are fine; add nothing else.
        return tuple(int(x) for x in w)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "lineality": [list(l) for l in self.lineality],
            "inequalities": [list(a) for a in self.ineqs],
            "equations": [list(e) for e in self.eqs],
        }


def dual_cone(C: ConeZ) -> ConeZ:
    """The dual cone ``{y : <x, y> >= 0 for all x in C}``; both descriptions are swapped."""
    return ConeZ(C.dim, C.ineqs, C.eqs, C.rays, C.lineality)


# ---------------------------------------------------------------------------
# polyhedra


@dataclass(frozen=True)
class CompactEdge:
    i: int
    j: int
    direction: tuple  # v^j - v^i


@dataclass(frozen=True)
class OrientedFaceCycle:
    """Signs of the compact edges along the boundary of a compact 2-face."""

    face: tuple  # sorted vertex indices of the face
    signs: tuple  # one entry in {-1, 0, 1} per compact edge
    order: tuple  # edge indices in cyclic order


@dataclass(frozen=True, eq=False)
class RationalPolyhedron:
    """``conv(vertices) + cone(tail_rays)`` with at least one vertex."""

    dim: int
    vertices: tuple
    tail_rays: tuple
    ineqs: tuple  # pairs (a, b) meaning a·x >= b, a primitive integer
    eqs: tuple  # pairs (a, b) meaning a·x = b

    # -- construction -------------------------------------------------------

    @classmethod
    def from_vrep(cls, points: Sequence[Sequence], tail_rays: Sequence[Sequence] = (), dim: int | None = None) -> "RationalPolyhedron":
        points = [qvec(p) for p in points]
        if not points:
            raise ValueError("a polyhedron needs at least one point")
        d = len(points[0]) if dim is None else dim
        gens = [p + (Fraction(1),) for p in points] + [qvec(r) + (Fraction(0),) for r in tail_rays if not is_zero(r)]
        ineqs, eqs = cone_vrep_to_hrep(gens, [], d + 1)
        return cls._from_homogeneous(d, ineqs, eqs, gens)

    @classmethod
    def from_hrep(cls, ineqs: Sequence[tuple], eqs: Sequence[tuple] = (), dim: int | None = None) -> "RationalPolyhedron":
        """From inequalities ``a·x >= b`` and equations ``a·x = b``."""
        d = dim if dim is not None else len((list(ineqs) + list(eqs))[0][0])
        hom = [qvec(a) + (-rat(b),) for a, b in ineqs] + [zero_vec(d) + (Fraction(1),)]
        heq = [qvec(a) + (-rat(b),) for a, b in eqs]
        rays, lin = cone_hrep_to_vrep(hom, heq, d + 1)
        if lin:
            raise ValueError("polyhedron has a nontrivial lineality space (no vertex)")
        if not any(r[-1] > 0 for r in rays):
            raise ValueError("polyhedron is empty")
        gens = [tuple(Fraction(x) for x in r) for r in rays]
        return cls.from_vrep([tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays if r[-1] > 0],
                             [r[:-1] for r in rays if r[-1] == 0], dim=d)

    @classmethod
    def _from_homogeneous(cls, d: int, ineqs, eqs, gens) -> "RationalPolyhedron":
        n = d + 1
        facets = [qvec(a) for a in ineqs]
        equations = [qvec(e) for e in eqs]
        verts, rays = set(), set()
        for g in gens:
            tight = [a for a in facets if dot(a, g) == 0]
            if rank(tight + equations) != n - 1:
                continue
            if g[-1] > 0:
                verts.add(tuple(x / g[-1] for x in g[:-1]))
            else:
                rays.add(primitive(g[:-1]))
        if not verts:
            raise ValueError("polyhedron without vertices is not supported")
        h_ineqs = tuple(sorted((tuple(int(x) for x in a[:-1]), -a[-1]) for a in facets if not is_zero(a[:-1])))
        h_eqs = tuple(sorted((tuple(int(x) for x in e[:-1]), -e[-1]) for e in equations))
        return cls(d, tuple(sorted(verts)), tuple(sorted(tuple(int(x) for x in r) for r in rays)), h_ineqs, h_eqs)

    # -- identity -------------------------------------------------------------

    def key(self):
        return (self.dim, self.vertices, self.tail_rays)

    def __eq__(self, other):
        return isinstance(other, RationalPolyhedron) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        vs = ", ".join("(" + ",".join(fmt_rat(x) for x in v) + ")" for v in self.vertices)
        tail = f" + cone{list(self.tail_rays)}" if self.tail_rays else ""
        return f"RationalPolyhedron[{vs}]{tail}"

    # -- basic data -----------------------------------------------------------

    @property
    def is_bounded(self) -> bool:
        return not self.tail_rays

    @property
    def affine_dim(self) -> int:
        return self.dim - len(self.eqs)

    def contains(self, x: Sequence) -> bool:
        x = qvec(x)
        return all(dot(a, x) >= b for a, b in self.ineqs) and all(dot(a, x) == b for a, b in self.eqs)

    @cached_property
    def tail_cone(self) -> ConeZ:
        return ConeZ.from_rays(self.tail_rays, self.dim)

    def in_tail_dual(self, c: Sequence) -> bool:
        c = qvec(c)
        return all(dot(r, c) >= 0 for r in self.tail_rays)

    def support(self, c: Sequence) -> Fraction:
        """``min <P, c>``; raises :class:`UnboundedDirection` outside ``tail(P)^∨``."""
        c = qvec(c)
        if not self.in_tail_dual(c):
            raise UnboundedDirection(f"{list(c)} is unbounded below on the polyhedron")
        return min(dot(v, c) for v in self.vertices)

    def minimizers(self, c: Sequence) -> list[int]:
        m = self.support(c)
        return [i for i, v in enumerate(self.vertices) if dot(v, qvec(c)) == m]

    def translate(self, w: Sequence) -> "RationalPolyhedron":
        w = qvec(w)
        return RationalPolyhedron(self.dim, tuple(vadd(v, w) for v in self.vertices), self.tail_rays,
                                  tuple((a, b + dot(a, w)) for a, b in self.ineqs),
                                  tuple((a, b + dot(a, w)) for a, b in self.eqs))

    def scale(self, lam) -> "RationalPolyhedron":
        lam = rat(lam)
        if lam < 0:
            raise ValueError("only nonnegative dilations are supported")
        if lam == 0:
            return RationalPolyhedron.from_vrep([zero_vec(self.dim)], self.tail_rays, dim=self.dim)
        return RationalPolyhedron.from_vrep([vscale(lam, v) for v in self.vertices], self.tail_rays, dim=self.dim)

    def lattice_points(self) -> list[tuple]:
        from .exactcore import enumerate_lattice_points

        cons = [(a, b) for a, b in self.ineqs] + [(a, b) for a, b in self.eqs] + [(tuple(-x for x in a), -b) for a, b in self.eqs]
        return enumerate_lattice_points(cons, dim=self.dim)

    def has_lattice_point(self) -> bool:
        return bool(self.lattice_points())

    # -- incidences -----------------------------------------------------------

    def _tight_vertex(self, i: int) -> frozenset:
        v = self.vertices[i]
        return frozenset(k for k, (a, b) in enumerate(self.ineqs) if dot(a, v) == b)

    def _tight_ray(self, r: Sequence) -> frozenset:
        return frozenset(k for k, (a, b) in enumerate(self.ineqs) if dot(a, r) == 0)

    @cached_property
    def _vertex_tight(self) -> tuple:
        return tuple(self._tight_vertex(i) for i in range(len(self.vertices)))

    def _face_rank(self, Z: frozenset) -> int:
        return rank([qvec(self.ineqs[k][0]) for k in Z] + [qvec(a) for a, _ in self.eqs])

    @cached_property
    def edges(self) -> tuple:
        """Compact edges ``(i, j)`` with ``i < j`` in lexicographic index order."""
        out = []
        m = len(self.vertices)
        for i in range(m):
            for j in range(i + 1, m):
                Z = self._vertex_tight[i] & self._vertex_tight[j]
                if self._face_rank(Z) == self.dim - 1:
                    out.append(CompactEdge(i, j, vsub(self.vertices[j], self.vertices[i])))
        return tuple(out)

    def edge_index(self, i: int, j: int) -> int:
        a, b = min(i, j), max(i, j)
        for k, e in enumerate(self.edges):
            if (e.i, e.j) == (a, b):
                return k
        raise KeyError((i, j))

    @cached_property
    def neighbors(self) -> tuple:
        nb = [[] for _ in self.vertices]
        for e in self.edges:
            nb[e.i].append(e.j)
            nb[e.j].append(e.i)
        return tuple(tuple(sorted(x)) for x in nb)

    def face_of(self, Z: frozenset) -> tuple[tuple, tuple]:
        """Vertex indices and tail rays of the face cut out by the tight set ``Z``."""
        vs = tuple(i for i, t in enumerate(self._vertex_tight) if Z <= t)
        rs = tuple(r for r in self.tail_rays if Z <= self._tight_ray(r))
        return vs, rs

    @cached_property
    def compact_two_faces(self) -> tuple:
        """Oriented boundary cycles of the compact 2-faces."""
        faces = {}
        edges = self.edges
        for a in range(len(edges)):
            for b in range(a + 1, len(edges)):
                ea, eb = edges[a], edges[b]
                if not ({ea.i, ea.j} & {eb.i, eb.j}):
                    continue
                Z = (self._vertex_tight[ea.i] & self._vertex_tight[ea.j]
                     & self._vertex_tight[eb.i] & self._vertex_tight[eb.j])
                if self._face_rank(Z) != self.dim - 2:
                    continue
                vs, rs = self.face_of(Z)
                if rs:
                    continue
                faces.setdefault(vs, None)
        cycles = []
        for vs in sorted(faces):
            cycles.append(self._orient(vs))
        return tuple(cycles)

    def _orient(self, vs: tuple) -> OrientedFaceCycle:
        inside = set(vs)
        idx = [k for k, e in enumerate(self.edges) if e.i in inside and e.j in inside]
        signs = [0] * len(self.edges)
        first = self.edges[idx[0]]
        order = [idx[0]]
        signs[idx[0]] = 1
        start, cur = first.i, first.j
        used = {idx[0]}
        while cur != start:
            nxt = next(k for k in idx if k not in used and cur in (self.edges[k].i, self.edges[k].j))
            e = self.edges[nxt]
            if e.i == cur:
                signs[nxt], cur = 1, e.j
            else:
                signs[nxt], cur = -1, e.i
            used.add(nxt)
            order.append(nxt)
        if used != set(idx):
            raise AssertionError("2-face boundary is not a single cycle")
        return OrientedFaceCycle(vs, tuple(signs), tuple(order))

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [[fmt_rat(x) for x in v] for v in self.vertices],
            "tail_rays": [list(r) for r in self.tail_rays],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalPolyhedron":
        if not isinstance(data, dict) or "vertices" not in data:
            raise ValueError("polyhedron JSON needs a 'vertices' list")
        d = int(data.get("dim", len(data["vertices"][0]) if data["vertices"] else 0))
        verts = [tuple(parse_rat(x) for x in v) for v in data["vertices"]]
        rays = [tuple(int(x) for x in r) for r in data.get("tail_rays", [])]
        if any(len(v) != d for v in verts) or any(len(r) != d for r in rays):
            raise ValueError("coordinate count does not match 'dim'")
        return cls.from_vrep(verts, rays, dim=d)


def polytope(*points) -> RationalPolyhedron:
    """Convenience constructor: ``polytope((0, 0), (1, 0), ("1/2", 1))``."""
    pts = [tuple(rat(x) for x in (p if isinstance(p, (tuple, list)) else (p,))) for p in points]
    return RationalPolyhedron.from_vrep(pts)


# ---------------------------------------------------------------------------
# operations


def cone_over(P: RationalPolyhedron) -> ConeZ:
    """The closed cone over ``P × {1}`` in ``N_ℝ ⊕ ℝ``."""
    gens = [primitive(v + (Fraction(1),)) for v in P.vertices] + [tuple(r) + (0,) for r in P.tail_rays]
    return ConeZ.from_rays(gens, P.dim + 1)


def face_at(P: RationalPolyhedron, c: Sequence) -> RationalPolyhedron:
    """The face of ``P`` on which ``<·, c>`` attains its minimum."""
    c = qvec(c)
    idx = P.minimizers(c)
    rays = [r for r in P.tail_rays if dot(r, c) == 0]
    return RationalPolyhedron.from_vrep([P.vertices[i] for i in idx], rays, dim=P.dim)


def face_vertices(P: RationalPolyhedron, c: Sequence) -> tuple:
    return tuple(P.minimizers(c))


def minkowski_sum(A: RationalPolyhedron, B: RationalPolyhedron) -> RationalPolyhedron:
    if A.dim != B.dim:
        raise ValueError("ambient dimensions differ")
    if A.tail_cone.rays != B.tail_cone.rays or A.tail_cone.lineality != B.tail_cone.lineality:
        raise TailMismatch("Minkowski summands must share the tail cone")
    pts = {vadd(a, b) for a in A.vertices for b in B.vertices}
    return RationalPolyhedron.from_vrep(sorted(pts), A.tail_rays, dim=A.dim)


def minkowski_sum_all(parts: Sequence[RationalPolyhedron]) -> RationalPolyhedron:
    out = parts[0]
    for Q in parts[1:]:
        out = minkowski_sum(out, Q)
    return out


def normal_cone(P: RationalPolyhedron, face) -> ConeZ:
    """The cone of linear forms minimised on ``face``.

    ``face`` may be a vertex index, a vertex (coordinate tuple), a collection
    of vertex indices, or a :class:`RationalPolyhedron` that is a face of ``P``.
    """
    vs = _face_vertex_indices(P, face)
    if not vs:
        raise NotAFace("a face must contain a vertex")
    base = P.vertices[vs[0]]
    ineqs = [vsub(v, base) for k, v in enumerate(P.vertices) if k not in vs]
    ineqs += [qvec(r) for r in P.tail_rays]
    eqs = [vsub(P.vertices[k], base) for k in vs[1:]]
    if isinstance(face, RationalPolyhedron):
        eqs += [qvec(r) for r in face.tail_rays]
    C = ConeZ.from_hrep([a for a in ineqs if not is_zero(a)], P.dim, [e for e in eqs if not is_zero(e)])
    c = C.interior_point()
    if tuple(P.minimizers(c)) != tuple(vs):
        raise NotAFace("vertex set is not the vertex set of a face")
    if isinstance(face, RationalPolyhedron):
        if face != face_at(P, c):
            raise NotAFace("polyhedron is not a face")
    return C


def _face_vertex_indices(P: RationalPolyhedron, face) -> tuple:
    """Normalise the accepted face encodings to sorted vertex indices.

    Integers are vertex indices; a sequence containing ``Fraction`` or string
    entries is a single vertex given by coordinates; a sequence of integers is
    a collection of indices; nested sequences are lists of vertex coordinates.
    """
    def lookup(v):
        v = qvec(v)
        if v not in P.vertices:
            raise NotAFace(f"{[fmt_rat(x) for x in v]} is not a vertex")
        return P.vertices.index(v)

    if isinstance(face, RationalPolyhedron):
        return tuple(sorted(lookup(v) for v in face.vertices))
    if isinstance(face, int):
        if not 0 <= face < len(P.vertices):
            raise NotAFace(f"no vertex with index {face}")
        return (face,)
    items = list(face)
    if items and all(isinstance(x, (tuple, list)) for x in items):
        return tuple(sorted({lookup(v) for v in items}))
    if any(isinstance(x, (Fraction, str)) for x in items):
        return (lookup(items),)
    if any(not 0 <= x < len(P.vertices) for x in items):
        raise NotAFace("vertex index out of range")
    return tuple(sorted(set(items)))
