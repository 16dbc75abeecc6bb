"""Acceptance criteria, one test per item."""

import itertools
import warnings
from fractions import Fraction

import pytest
from conftest import space

from minkext.etaspace import EtaSpace
from minkext.extension import (
    eta_tilde_Z_relation,
    eta_Z_relation,
    initial_morphism,
    kodaira_dual_map,
    minimal_dependents,
    sigma_dual_generators,
    upper_generators,
)
from minkext.minkowski import (
    NegativeParameterWarning,
    cayley_extension,
    cayley_t_basis,
    dim_V,
    enumerate_lattice_friendly,
    is_lattice_friendly,
    kodaira_spencer,
    psi_summand,
    summand_cone,
)
from minkext.polyhedron import ConeZ, cone_over, dual_cone, minkowski_sum, polytope
from minkext.semigroup import (
    AffineSemigroup,
    ExtensionDiagram,
    NotFree,
    check_cocartesian,
    hilbert_basis,
    identity_diagram,
    is_free,
    make_pair,
    product_extension,
    relative_boundary,
)

HALF = Fraction(1, 2)
WEDGE = [(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1)]
ARTIN = [(HALF, 1, 0), (HALF, 0, 1)]
QG = [(0, 1, 1), (1, 0, 0)]
# T~ generators come out as (A, s1, B, s2); the reference matrices use (s1, s2, A, B)
COLUMNS = [1, 3, 0, 2]


def reorder(M):
    return [[row[j] for j in COLUMNS] for row in M]


def interval_upper():
    e = space("interval")
    return upper_generators(e, minimal_dependents(e))


def cayley_target(xis):
    e = space("interval")
    return cayley_extension(e, [psi_summand(e, xi).polyhedron for xi in xis])


def test_criterion_1_hilbert_basis():
    sigma_dual = dual_cone(cone_over(polytope(("-1/2",), ("1/2",))))
    assert hilbert_basis(sigma_dual) == WEDGE
    assert sigma_dual_generators(space("interval")) == WEDGE


def test_criterion_2_eta_tables():
    O = space("interval").oracle
    expected = {-2: (1, 1), -1: (HALF, 1), 0: (0, 0), 1: (HALF, 1), 2: (1, 1)}
    assert {c: (O.eta((c,)), O.eta_Z((c,))) for c in expected} == expected


def test_criterion_3_lifted_eta_tables():
    e = space("interval")
    f = lambda spec: e.parse_functional(spec)
    singles = {
        -2: (f({"s1": -1, "t": 2}), f({"s1": -1, "t": 2})),
        -1: (f({"s1": "-1/2", "t": 1}), f({"s1": "-1/2", "s2": "1/2", "t": 1})),
        0: (e.zero(), e.zero()),
        1: (f({"s1": "1/2"}), f({"s1": 1})),
        2: (f({"s1": 1}), f({"s1": 1})),
    }
    for c, (tilde, tilde_Z) in singles.items():
        assert e.eta_tilde((c,)) == tilde
        assert e.eta_tilde_Z((c,)) == tilde_Z
    pairs = {
        (1, 1): f({"s1": 1}),
        (-1, -1): f({"s2": 1}),
        (-1, 1): f({"t": 1, "s1": "1/2", "s2": "1/2"}),
        (-2, 2): f({"t": 2}),
        (-1, 2): f({"t": 1, "s1": "-1/2", "s2": "1/2"}),
        (-2, 1): f({"t": 1, "s1": "1/2", "s2": "-1/2"}),
    }
    for (a, b), value in pairs.items():
        assert eta_tilde_Z_relation(e, [(a,), (b,)]) == value


def test_criterion_4_universal_extension_generators():
    up = interval_upper()
    e = up.es
    assert {e.format(g) for g in up.t_generators} == {"s1", "s2", "t + 1/2*s1 - 1/2*s2", "t - 1/2*s1 + 1/2*s2"}
    assert len(up.t_generators) == 4
    assert up.rank_T() == 3
    assert up.ambient_rank() == 4


def test_criterion_5_dual_map_matrices():
    up = interval_upper()
    basis = cayley_t_basis(1, 2)
    for xis, expected in [(ARTIN, [[1, 0, 1, 0], [0, 1, 0, 1]]), (QG, [[1, 1, 0, 0], [0, 0, 1, 1]])]:
        direct = kodaira_dual_map(up, xis)
        forced = initial_morphism(up, cayley_target(xis), t_basis=basis).matrix
        assert reorder(direct) == expected
        assert reorder(forced) == expected


def test_criterion_6_hexagon():
    P = polytope((0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1))
    assert dim_V(P) == 4
    assert len(summand_cone(P).rays) == 5


def test_criterion_7_negative_vertex_parameter():
    e = space("negative")
    xi = (Fraction(1, 7), 1, -1)
    assert e.L.contains(xi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeParameterWarning)
        res = psi_summand(e, xi, strict=False)
    assert res.polyhedron == polytope(("-1/3",), ("-1/4",))
    rest = polytope((0,), ("1/2",))
    assert minkowski_sum(res.polyhedron, rest) == e.P
    rep = is_lattice_friendly(e, [res.polyhedron, rest])
    assert not rep.lattice_friendly
    assert rep.verdicts_agree


def test_criterion_8_kodaira_spencer_not_additive():
    e = space("short")
    Q1, Q2 = polytope((0,), ("1/4",)), polytope(("1/2",))
    k = [kodaira_spencer(e, Q) for Q in (e.P, Q1, Q2)]
    assert [(v.t, v.s) for v in k] == [((1,), (1, 1)), ((1,), (0, 1)), ((0,), (1, 1))]
    assert tuple(a + b for a, b in zip(k[1].as_xi(), k[2].as_xi())) != k[0].as_xi()
    assert not e.T.contains(k[1].as_xi()) and not e.T.contains(k[2].as_xi())


def test_criterion_9_relative_boundaries():
    T0 = make_pair([(0, 1)], WEDGE, 2)
    T1 = make_pair([(1, 1)], WEDGE, 2)
    heights = range(0, 4)
    closed_T0 = {(s * 2 * b, b) for b in heights for s in (1, -1)} | {
        (s * (2 * b - 1), b) for b in heights if b >= 1 for s in (1, -1)
    }
    closed_T1 = {(s * 2 * b, b) for b in heights for s in (1, -1)} | {
        p for b in heights if b >= 1 for p in ((-2 * b + 1, b), (-2 * b + 2, b))
    }
    assert set(relative_boundary(T0, 3)) == closed_T0
    assert set(relative_boundary(T1, 3)) == closed_T1

    cone_pair = make_pair([(-1, 1), (1, 1)], WEDGE, 2)
    assert isinstance(is_free(cone_pair, 4), NotFree)
    decs = cone_pair.decompositions((4, 4))
    assert ((0, 0), (4, 4)) in decs
    assert ((4, 2), (0, 2)) in decs


@pytest.mark.parametrize("name", ["interval", "short", "g2_long", "g2_short"])
def test_criterion_10a_independence_equivalence(name):
    e = space(name)
    grid = e.grid(4)
    discrepancies = [
        (a, b)
        for a, b in itertools.combinations_with_replacement(grid, 2)
        if (eta_Z_relation(e, [a, b]) == 0) != eta_tilde_Z_relation(e, [a, b]).is_zero()
    ]
    assert discrepancies == []


def _simple_paths(P, start, end):
    out, stack = [], [(start, [start])]
    while stack:
        v, path = stack.pop()
        if v == end:
            out.append(path)
            continue
        for w in P.neighbors[v]:
            if w not in path:
                stack.append((w, path + [w]))
    return out


@pytest.mark.parametrize("name, bound", [("hexagon", 3), ("cube", 2)])
def test_criterion_10b_path_and_vertex_independence(name, bound):
    e = space(name)
    P = e.P
    ref = e.oracle.reference
    paths = {v: _simple_paths(P, ref, v) for v in range(len(P.vertices))}
    discrepancies = []
    for c in e.grid(bound):
        base, base_Z = e.eta_tilde(c), e.eta_tilde_Z(c)
        for v in P.minimizers(c):
            for path in paths[v]:
                if e.eta_tilde(c, vertex=v, path=path) != base or e.eta_tilde_Z(c, vertex=v, path=path) != base_Z:
                    discrepancies.append((c, tuple(path)))
    assert discrepancies == []


@pytest.mark.parametrize("name", ["interval", "length_two"])
def test_criterion_10c_psi_and_kappa(name):
    e = space(name)
    B = enumerate_lattice_friendly(e).B
    summand = {b: psi_summand(e, b).polyhedron for b in B}
    for a, b in itertools.product(B, repeat=2):
        total = tuple(x + y for x, y in zip(a, b))
        assert minkowski_sum(summand[a], summand[b]) == psi_summand(e, total).polyhedron
    for b in B:
        assert kodaira_spencer(e, summand[b]).as_xi() == b
        assert psi_summand(e, kodaira_spencer(e, summand[b]).as_xi()).polyhedron == summand[b]


def test_criterion_10d_boundary_of_upper_pair():
    up = interval_upper()
    e = up.es
    D = up.to_diagram()
    grid = e.grid(3)
    expected = {up.boundary_element(c) for c in grid}
    assert all(D.upper.is_boundary(x) for x in expected)
    level = max(D.lower.S.grade(tuple(c) + (e.oracle.eta_Z(c),)) for c in grid)
    found = {
        u
        for u in D.upper.S.elements_up_to_grade(level, D.upper_grading())
        if abs(u[0]) <= 3 and D.upper.is_boundary(u)
    }
    assert found == expected


def _diagrams():
    free_pairs = [
        make_pair([(0, 1)], WEDGE, 2),
        make_pair([(1, 1)], WEDGE, 2),
        make_pair([(1,)], [(1,)], 1),
        make_pair([], [(1,)], 1),
        make_pair([(1, 1)], [(1, 0), (0, 1)], 2),
        make_pair([(0, 1)], [(1, 0), (0, 1)], 2),
    ]
    out = [("identity", identity_diagram(p)) for p in free_pairs]
    line = AffineSemigroup([(1,)])
    out += [
        ("product-wedge", product_extension(free_pairs[0], line, [[0], [1]])),
        ("product-diagonal", product_extension(free_pairs[1], line, [[1], [1]])),
        ("product-line", product_extension(free_pairs[2], line, [[1]])),
        ("product-plane", product_extension(free_pairs[4], line, [[1], [1]])),
        ("upper-pair", interval_upper().to_diagram()),
        ("artin", cayley_target(ARTIN)),
        ("qG", cayley_target(QG)),
        ("C2-not-C1", ExtensionDiagram(make_pair([], [(2,), (3,)], 1), free_pairs[3], ((1,),))),
        ("C3-not-C2", ExtensionDiagram(make_pair([], [(1,)], 1), free_pairs[4], ((1,), (1,)))),
        ("numerical-3-5", ExtensionDiagram(make_pair([], [(3,), (5,)], 1), free_pairs[3], ((1,),))),
        ("numerical-2-5", ExtensionDiagram(make_pair([], [(2,), (5,)], 1), free_pairs[3], ((1,),))),
        ("numerical-3-4", ExtensionDiagram(make_pair([], [(3,), (4,)], 1), free_pairs[3], ((1,),))),
        ("doubling", ExtensionDiagram(make_pair([], [(1,)], 1), free_pairs[3], ((2,),))),
        ("plane-over-line", ExtensionDiagram(make_pair([(1, 0)], [(1, 0), (0, 1)], 2), free_pairs[2], ((1, 1),))),
    ]
    return out


def test_criterion_10e_cocartesian_implications():
    diagrams = _diagrams()
    assert len(diagrams) == 20
    seen = {}
    for name, D in diagrams:
        assert not isinstance(is_free(D.lower, 4), NotFree), name
        rep = check_cocartesian(D, 4)
        c1, c2, c3 = rep.C1.passed, rep.C2.passed, rep.C3.passed
        assert not c1 or c2, name
        assert not c2 or c3, name
        seen[name] = (c1, c2, c3)
    assert seen["C2-not-C1"] == (False, True, True)
    assert seen["C3-not-C2"] == (False, False, True)
    assert seen["upper-pair"] == (True, True, True)


@pytest.mark.parametrize("xis", [ARTIN, QG])
def test_criterion_10f_well_defined_morphisms(xis):
    up = interval_upper()
    md = initial_morphism(up, cayley_target(xis), bound=4, degree=4, t_basis=cayley_t_basis(1, 2))
    assert md.checked_multisets > 0
    assert md.matrix == kodaira_dual_map(up, xis)


def test_criterion_10g_lattice_friendly_catalog():
    e = space("interval")
    cat = enumerate_lattice_friendly(e)
    grid = [Fraction(k, 12) for k in range(13)]
    brute = sorted(
        xi
        for xi in itertools.product(grid, repeat=3)
        if e.T.contains(xi) and e.L.contains(xi) and all(x <= 1 for x in xi)
    )
    assert cat.B == brute
    assert len(cat.B) == 6
    assert sorted(map(sorted, cat.nontrivial)) == sorted(map(sorted, [ARTIN, QG]))
    assert all(r.lattice_friendly and r.verdicts_agree for r in cat.reports)
