"""The η-family of a rational polyhedron and its parameter spaces.

For ``c`` in the dual of the tail cone, ``η(c) = -min <P, c>`` and
``η_ℤ(c) = ⌈η(c)⌉``.  The space ``T(P) ⊂ ℝ^(r+m)`` carries one coordinate
``t_ij`` per compact edge and one coordinate ``s_i`` per vertex; it is cut
out by the closing conditions of the compact 2-faces and by the
identifications forced by lattice vertices, lattice-free edges and short
half-open edges.  ``T_ℤ(P)`` is the lattice of parameters for which all
edge-wise translated vertices stay integral.

Functionals on ``T(P)`` (elements of ``T*(P)``) are stored by their values on
a canonical basis of ``T(P)`` — the reduced row echelon basis — so equality
of functionals is plain tuple equality.

Polyhedra are normalised on construction: if ``P`` has a lattice vertex,
``P`` is translated so that the lexicographically smallest one sits at the
origin.  That vertex (or, without lattice vertices, the lexicographically
smallest vertex) is the reference vertex ``v★`` from which all edge paths
start.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .exactcore import (
    IntLattice,
    ceil_rat,
    dot,
    express_in_basis,
    floor_rat,
    fmt_rat,
    frac_up,
    hermite_normal_form,
    is_integral,
    lcm_denominators,
    mat_kernel,
    parse_rat,
    preimage_lattice,
    primitive,
    qvec,
    rat,
    rref,
    vadd,
    vscale,
    vsub,
    zero_vec,
)
from .polyhedron import ConeZ, RationalPolyhedron, UnboundedDirection, normal_cone


class NotInTP(ValueError):
    """A parameter vector violates the defining equations of ``T(P)``."""


# ---------------------------------------------------------------------------
# η and friends


class EtaOracle:
    """``η``, ``η_ℤ`` and the vertex selector ``v(c)`` of a normalised polyhedron."""

    def __init__(self, P: RationalPolyhedron, normalize: bool = True):
        self.input_polyhedron = P
        lattice = [v for v in P.vertices if is_integral(v)]
        shift = zero_vec(P.dim)
        if normalize and lattice:
            shift = tuple(-x for x in min(lattice))
            P = P.translate(shift)
        self.P = P
        self.shift = shift
        lattice_idx = [i for i, v in enumerate(P.vertices) if is_integral(v)]
        self.reference = lattice_idx[0] if lattice_idx else 0
        self._eta_cache: dict = {}

    @property
    def dim(self) -> int:
        return self.P.dim

    def eta(self, c: Sequence) -> Fraction:
        c = qvec(c)
        if c not in self._eta_cache:
            self._eta_cache[c] = -self.P.support(c)
        return self._eta_cache[c]

    def eta_Z(self, c: Sequence) -> int:
        return ceil_rat(self.eta(c))

    def frac(self, c: Sequence) -> Fraction:
        """``{η(c)} = ⌈η(c)⌉ - η(c)``."""
        return frac_up(self.eta(c))

    def v_of(self, c: Sequence) -> int:
        """Index of the lexicographically smallest vertex minimising ``c``."""
        return self.P.minimizers(c)[0]

    def vertex(self, c: Sequence) -> tuple:
        return self.P.vertices[self.v_of(c)]

    def is_super_integral(self, c: Sequence) -> bool:
        c = qvec(c)
        return all(dot(v, c).denominator == 1 for v in self.P.vertices)

    def is_lattice_vertex(self, i: int) -> bool:
        return is_integral(self.P.vertices[i])

    def in_domain(self, c: Sequence) -> bool:
        return self.P.in_tail_dual(c)


@dataclass(frozen=True)
class EdgeData:
    i: int
    j: int
    g: int
    short_forward: bool  # [v^i, v^j)
    short_backward: bool  # [v^j, v^i)
    lattice_disjoint: bool


def _edge_frame(v: Sequence, w: Sequence):
    """Return ``(g, mu0, alpha)`` for the line through ``v`` and ``w``.

    With ``p`` the primitive direction of ``w - v`` and ``U`` unimodular with
    ``U p = e_1``, the line ``g·v + ℝp`` meets ``ℤ^d`` exactly when the last
    ``d-1`` coordinates of ``U g v`` are integers.  ``g·v = x0 + mu0·p`` for a
    lattice point ``x0`` on that line and ``g(w - v) = alpha·p``.
    """
    u = vsub(w, v)
    p = primitive(u)
    d = len(p)
    H, U = hermite_normal_form([[x] for x in p])
    if H[0][0] < 0:
        U = [[-x for x in U[0]]] + [list(r) for r in U[1:]]
    Uv = [dot(row, v) for row in U]
    g = lcm_denominators(Uv[1:]) if d > 1 else 1
    nz = next(k for k in range(d) if p[k] != 0)
    alpha = g * u[nz] / p[nz]
    return g, g * Uv[0], alpha


def _count_half_open(mu0: Fraction, alpha: Fraction) -> int:
    """Integers ``k`` with ``mu0 <= k < mu0 + alpha``."""
    return ceil_rat(mu0 + alpha) - ceil_rat(mu0)


def edge_data(P: RationalPolyhedron) -> list[EdgeData]:
    """g(e), shortness of both half-open edges and lattice-freeness per compact edge."""
    out = []
    for e in P.edges:
        v, w = P.vertices[e.i], P.vertices[e.j]
        g, mu0, alpha = _edge_frame(v, w)
        fwd = _count_half_open(mu0, alpha)
        # [w, v) in the same frame: integers k with mu0 < k <= mu0 + alpha
        bwd = floor_rat(mu0 + alpha) - floor_rat(mu0)
        if g == 1:
            disjoint = floor_rat(mu0 + alpha) < ceil_rat(mu0)
        else:
            disjoint = True
        out.append(EdgeData(e.i, e.j, g, fwd <= g - 1, bwd <= g - 1, disjoint))
    return out


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Functional:
    """An element of ``T*(P)``, recorded by its values on the canonical basis of ``T(P)``."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(rat(x) for x in self.values))

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(vadd(self.values, other.values))

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(vsub(self.values, other.values))

    def __neg__(self) -> "Functional":
        return Functional(tuple(-x for x in self.values))

    def __mul__(self, k) -> "Functional":
        return Functional(vscale(rat(k), self.values))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.values)

    def to_json(self) -> dict:
        return {"basis_values": [fmt_rat(x) for x in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "Functional":
        return cls(tuple(parse_rat(x) for x in data["basis_values"]))


# ---------------------------------------------------------------------------
# T(P), T_+(P), T_Z(P)


class TSpace:
    """The parameter space ``T(P)`` with its cone ``T₊(P)`` and element ``oneone``."""

    def __init__(self, oracle: EtaOracle):
        self.oracle = oracle
        P = oracle.P
        self.P = P
        self.edges = P.edges
        self.edge_data = edge_data(P)
        self.r = len(self.edges)
        self.m = len(P.vertices)
        n = self.r + self.m
        self.n = n
        perp: list[tuple] = []
        kinds: list[str] = []
        for cyc in P.compact_two_faces:
            for k in range(P.dim):
                row = [Fraction(0)] * n
                for e_idx, sgn in enumerate(cyc.signs):
                    if sgn:
                        row[e_idx] += sgn * self.edges[e_idx].direction[k]
                if any(row):
                    perp.append(tuple(row))
                    kinds.append("closing")
        for i in range(self.m):
            if oracle.is_lattice_vertex(i):
                perp.append(self._unit(self.s_index(i)))
                kinds.append("lattice_vertex")
        for k, ed in enumerate(self.edge_data):
            if ed.lattice_disjoint:
                perp.append(vsub(self._unit(self.s_index(ed.i)), self._unit(self.s_index(ed.j))))
                kinds.append("lattice_disjoint")
            if ed.short_forward:
                perp.append(vsub(self._unit(k), self._unit(self.s_index(ed.i))))
                kinds.append("short")
            if ed.short_backward:
                perp.append(vsub(self._unit(k), self._unit(self.s_index(ed.j))))
                kinds.append("short")
        self.perp = tuple(perp)
        self.perp_kinds = tuple(kinds)
        kernel = mat_kernel(perp, n) if perp else [self._unit(k) for k in range(n)]
        R, pivots = rref(kernel, n) if kernel else ([], [])
        self.basis = tuple(tuple(row) for row in R[: len(pivots)])
        self.pivots = tuple(pivots)
        self.oneone = tuple(
            [Fraction(1)] * self.r
            + [Fraction(0) if oracle.is_lattice_vertex(i) else Fraction(1) for i in range(self.m)]
        )
        if not self.contains(self.oneone):
            raise AssertionError("oneone violates the defining equations")

    def _unit(self, k: int) -> tuple:
        return tuple(Fraction(int(j == k)) for j in range(self.n))

    def s_index(self, i: int) -> int:
        return self.r + i

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinate_names(self) -> list[str]:
        if self.r == 1:
            tn = ["t"]
        else:
            tn = [f"t{e.i + 1}{e.j + 1}" if self.m < 10 else f"t{e.i + 1}_{e.j + 1}" for e in self.edges]
        return tn + [f"s{i + 1}" for i in range(self.m)]

    def contains(self, xi: Sequence) -> bool:
        xi = qvec(xi)
        return len(xi) == self.n and all(dot(p, xi) == 0 for p in self.perp)

    def in_T_plus(self, xi: Sequence) -> bool:
        return self.contains(xi) and all(x >= 0 for x in qvec(xi))

    def basis_coordinates(self, xi: Sequence) -> tuple:
        """Coordinates of ``xi ∈ T(P)`` on the canonical basis (values at the pivots)."""
        xi = qvec(xi)
        if not self.contains(xi):
            raise NotInTP(f"{[fmt_rat(x) for x in xi]} is not in T(P)")
        return tuple(xi[p] for p in self.pivots)

    def point(self, z: Sequence) -> tuple:
        out = zero_vec(self.n)
        for zk, b in zip(z, self.basis):
            out = vadd(out, vscale(rat(zk), b))
        return out

    # -- functionals -----------------------------------------------------

    def functional(self, raw: Sequence) -> Functional:
        """The class of a linear form on ``ℝ^(r+m)`` restricted to ``T(P)``."""
        raw = qvec(raw)
        return Functional(tuple(dot(raw, b) for b in self.basis))

    def raw_lift(self, f: Functional) -> tuple:
        """A canonical lift supported on the pivot coordinates."""
        out = [Fraction(0)] * self.n
        for val, p in zip(f.values, self.pivots):
            out[p] = val
        return tuple(out)

    def evaluate(self, f: Functional, xi: Sequence) -> Fraction:
        return dot(f.values, self.basis_coordinates(xi))

    def pi(self, f: Functional) -> Fraction:
        """``π(f) = f(oneone)``."""
        return self.evaluate(f, self.oneone)

    def format(self, f: Functional) -> str:
        names = self.coordinate_names()
        raw = self.raw_lift(f)
        terms = []
        for a, nm in zip(raw, names):
            if a == 0:
                continue
            mag = abs(a)
            coef = "" if mag == 1 else f"{fmt_rat(mag)}*"
            terms.append(("-" if a < 0 else "+", coef + nm))
        if not terms:
            return "0"
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    # -- cones ------------------------------------------------------------

    @cached_property
    def T_plus(self) -> ConeZ:
        ineqs = [self._unit(k) for k in range(self.n)]
        return ConeZ.from_hrep(ineqs, self.n, self.perp)

    def t_plus_hrep(self) -> dict:
        return {
            "inequalities": [[fmt_rat(x) for x in self._unit(k)] for k in range(self.n)],
            "equations": [[fmt_rat(x) for x in p] for p in self.perp],
        }

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "dim": self.dim,
            "coordinates": self.coordinate_names(),
            "perp_generators": [{"kind": k, "row": [fmt_rat(x) for x in p]} for k, p in zip(self.perp_kinds, self.perp)],
            "basis": [[fmt_rat(x) for x in b] for b in self.basis],
            "T_plus": self.t_plus_hrep(),
            "oneone": [fmt_rat(x) for x in self.oneone],
        }


def build_tspace(P: RationalPolyhedron | EtaOracle) -> TSpace:
    oracle = P if isinstance(P, EtaOracle) else EtaOracle(P)
    return TSpace(oracle)


class TLattice:
    """``T_ℤ(P)``: parameters with integral ``s`` and integral translated edges."""

    def __init__(self, T: TSpace):
        self.T = T
        P = T.P
        n = T.n
        rows = []
        for i in range(T.m):
            rows.append(T._unit(T.s_index(i)))
        for k, e in enumerate(T.edges):
            vi, vj = P.vertices[e.i], P.vertices[e.j]
            for a in range(P.dim):
                row = [Fraction(0)] * n
                row[k] = vi[a] - vj[a]
                row[T.s_index(e.i)] -= vi[a]
                row[T.s_index(e.j)] += vj[a]
                rows.append(tuple(row))
        self.constraints = tuple(rows)
        if T.dim:
            self.lattice = preimage_lattice(rows, list(T.basis), n)
        else:
            self.lattice = IntLattice(n, ())
        self.basis = self.lattice.basis
        if not self.contains(T.oneone):
            raise AssertionError("oneone is not in T_Z(P)")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, xi: Sequence) -> bool:
        xi = qvec(xi)
        if not self.T.contains(xi):
            return False
        return all(dot(r, xi).denominator == 1 for r in self.constraints)

    def coordinates(self, xi: Sequence) -> tuple:
        """Integer coordinates of ``xi ∈ T_ℤ`` on the lattice basis."""
        y = self.lattice.coordinates(xi)
        if y is None or not is_integral(y):
            raise ValueError("not a lattice element")
        return tuple(int(a) for a in y)

    def lattice_values(self, f: Functional) -> tuple:
        """``f`` evaluated on the ``T_ℤ`` basis (integers iff ``f ∈ T*_ℤ``)."""
        return tuple(self.T.evaluate(f, b) for b in self.basis)

    def dual_coordinates(self, f: Functional) -> tuple:
        vals = self.lattice_values(f)
        if not is_integral(vals):
            raise ValueError("functional is not in the dual lattice")
        return tuple(int(a) for a in vals)

    def functional_from_dual(self, z: Sequence[int]) -> Functional:
        """The functional taking values ``z`` on the lattice basis."""
        B = [self.T.basis_coordinates(b) for b in self.basis]
        # f.values · B_k = z_k  for all k; B is square and invertible
        from .exactcore import solve

        sol = solve(B, [rat(x) for x in z])
        return Functional(sol)

    def dual_lattice_member(self, f: Functional) -> bool:
        return is_integral(self.lattice_values(f))

    def to_json(self) -> dict:
        return {"rank": self.rank, "basis": [[fmt_rat(x) for x in b] for b in self.basis]}


def build_tlattice(P, T: TSpace | None = None) -> TLattice:
    if T is None:
        T = build_tspace(P)
    return TLattice(T)


# ---------------------------------------------------------------------------
# the bundle


class EtaSpace:
    """``η``, ``T(P)``, ``T_ℤ(P)`` and the lifted functionals ``η̃``, ``η̃_ℤ``."""

    def __init__(self, P: RationalPolyhedron, normalize: bool = True):
        self.oracle = EtaOracle(P, normalize=normalize)
        self.T = TSpace(self.oracle)
        self.L = TLattice(self.T)
        self._etZ_cache: dict = {}

    @property
    def P(self) -> RationalPolyhedron:
        return self.oracle.P

    # -- elementary functionals ---------------------------------------------

    def functional_t(self, edge: int) -> Functional:
        return self.T.functional(self.T._unit(edge))

    def functional_s(self, vertex: int) -> Functional:
        return self.T.functional(self.T._unit(self.T.s_index(vertex)))

    def functional_L(self, edge: int, c: Sequence) -> Functional:
        """``L_ij(c) = <v^i - v^j, c> t_ij + <v^j, c> s_j - <v^i, c> s_i``."""
        e = self.T.edges[edge]
        vi, vj = self.P.vertices[e.i], self.P.vertices[e.j]
        c = qvec(c)
        return (dot(vsub(vi, vj), c) * self.functional_t(edge)
                + dot(vj, c) * self.functional_s(e.j)
                - dot(vi, c) * self.functional_s(e.i))

    def zero(self) -> Functional:
        return Functional(zero_vec(self.T.dim))

    # -- paths ----------------------------------------------------------------

    def path(self, start: int, goal: int) -> list[int]:
        """Breadth-first vertex path along compact edges (neighbours in index order)."""
        if start == goal:
            return [start]
        prev = {start: None}
        queue = deque([start])
        nb = self.P.neighbors
        while queue:
            x = queue.popleft()
            for y in nb[x]:
                if y not in prev:
                    prev[y] = x
                    if y == goal:
                        out = [y]
                        while prev[out[-1]] is not None:
                            out.append(prev[out[-1]])
                        return out[::-1]
                    queue.append(y)
        raise ValueError(f"vertices {start} and {goal} are not connected by compact edges")

    def _raw_eta_tilde(self, c, vertex: int, path: Sequence[int] | None, reference: int | None) -> tuple:
        T = self.T
        P = self.P
        ref = self.oracle.reference if reference is None else reference
        if path is None:
            path = self.path(ref, vertex)
        path = list(path)
        if path[0] != ref or path[-1] != vertex:
            raise ValueError("path must run from the reference vertex to v(c)")
        raw = [Fraction(0)] * T.n
        raw[T.s_index(ref)] -= dot(P.vertices[ref], c)
        for a, b in zip(path, path[1:]):
            k = P.edge_index(a, b)
            raw[k] -= dot(vsub(P.vertices[b], P.vertices[a]), c)
        return tuple(raw)

    def eta_tilde(self, c: Sequence, *, vertex: int | None = None, path: Sequence[int] | None = None,
                  reference: int | None = None) -> Functional:
        """``η̃(c) = -<v★, c> s_v★ - Σ_path <step, c> t_e`` for ``c ∈ tail(P)^∨``."""
        c = qvec(c)
        mins = self.P.minimizers(c)  # raises UnboundedDirection
        v = mins[0] if vertex is None else vertex
        if v not in mins:
            raise ValueError(f"vertex {v} does not minimise c")
        return self.T.functional(self._raw_eta_tilde(c, v, path, reference))

    def eta_tilde_Z(self, c: Sequence, *, vertex: int | None = None, path: Sequence[int] | None = None,
                    reference: int | None = None) -> Functional:
        """``η̃_ℤ(c) = η̃(c) + {η(c)} s_v(c)``."""
        c = qvec(c)
        canonical = vertex is None and path is None and reference is None
        if canonical and c in self._etZ_cache:
            return self._etZ_cache[c]
        mins = self.P.minimizers(c)
        v = mins[0] if vertex is None else vertex
        base = self.eta_tilde(c, vertex=v, path=path, reference=reference)
        out = base + self.oracle.frac(c) * self.functional_s(v)
        if canonical:
            self._etZ_cache[c] = out
        return out

    def dual_lattice_member(self, f: Functional) -> bool:
        return self.L.dual_lattice_member(f)

    def pi(self, f: Functional) -> Fraction:
        return self.T.pi(f)

    def format(self, f: Functional) -> str:
        return self.T.format(f)

    def parse_functional(self, coeffs: dict) -> Functional:
        """Functional from a ``{"t": "1", "s1": "1/2", ...}`` mapping of raw coefficients."""
        names = self.T.coordinate_names()
        raw = [Fraction(0)] * self.T.n
        for k, v in coeffs.items():
            raw[names.index(k)] = parse_rat(v)
        return self.T.functional(raw)

    # -- grids -----------------------------------------------------------------

    def grid(self, bound: int) -> list[tuple]:
        """Integer ``c`` with ``‖c‖∞ <= bound`` in ``tail(P)^∨``, sorted."""
        import itertools

        d = self.P.dim
        pts = []
        for c in itertools.product(range(-bound, bound + 1), repeat=d):
            if self.P.in_tail_dual(c):
                pts.append(tuple(c))
        return pts


def eta_table(es: EtaSpace, bound: int) -> list[dict]:
    rows = []
    for c in es.grid(bound):
        rows.append({
            "c": list(c),
            "eta": fmt_rat(es.oracle.eta(c)),
            "eta_Z": es.oracle.eta_Z(c),
            "v": [fmt_rat(x) for x in es.oracle.vertex(c)],
            "super_integral": es.oracle.is_super_integral(c),
        })
    return rows
