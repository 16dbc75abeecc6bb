import warnings
from fractions import Fraction

import pytest
from conftest import space
from hypothesis import given, settings
from hypothesis import strategies as st

from minkext.etaspace import NotInTP
from minkext.minkowski import (
    NegativeParameterWarning,
    NotASummand,
    SumMismatch,
    check_fiber_product,
    closing_conditions,
    dim_V,
    enumerate_lattice_friendly,
    face_map_check,
    is_lattice_friendly,
    kodaira_spencer,
    minkowski_linearity_check,
    psi_summand,
    psi_vertex_map,
    slice_points,
    smooth_in_codim_two,
    summand_cone,
    summand_from_edges,
    tautological_cone,
    tautological_projection,
)
from minkext.polyhedron import ConeZ, minkowski_sum, minkowski_sum_all, polytope


def test_hexagon_summand_cone():
    P = space("hexagon").P
    assert dim_V(P) == 4
    assert len(summand_cone(P).rays) == 5
    assert len(closing_conditions(P)) == 2


@pytest.mark.parametrize("name, dim", [("interval", 1), ("triangle", 1), ("cube", 3), ("point", 0)])
def test_dim_V(name, dim):
    assert dim_V(space(name).P) == dim


def test_summand_from_edges_reproduces_polytope():
    P = space("hexagon").P
    assert summand_from_edges(P, (1,) * 6) == P
    assert summand_from_edges(P, (2,) * 6) == P.scale(2)


@pytest.mark.parametrize(
    "xi, vertices",
    [
        ((1, 1, 1), [("-1/2",), ("1/2",)]),
        (("1/2", 1, 0), [("-1/2",), (0,)]),
        (("1/2", 0, 1), [(0,), ("1/2",)]),
        ((0, 1, 1), [("-1/2",)]),
        ((1, 0, 0), [(0,), (1,)]),
    ],
)
def test_psi_summand(xi, vertices):
    res = psi_summand(space("interval"), xi)
    assert res.polyhedron == polytope(*vertices)
    assert res.in_T_plus


def test_psi_rejects_vectors_outside_T():
    with pytest.raises(NotInTP):
        psi_summand(space("short"), (1, 0, 1))


def test_negative_parameters():
    e = space("negative")
    with pytest.raises(NotInTP):
        psi_summand(e, ("1/7", 1, -1))
    with pytest.warns(NegativeParameterWarning):
        res = psi_summand(e, ("1/7", 1, -1), strict=False)
    assert res.polyhedron == polytope(("-1/3",), ("-1/4",))
    assert res.in_T_Z and not res.in_T_plus
    assert res.warning


@pytest.mark.parametrize("name", ["interval", "length_two", "hexagon"])
def test_psi_is_additive_on_slice(name):
    e = space(name)
    B = slice_points(e)
    for a in B:
        for b in B:
            s = tuple(x + y for x, y in zip(a, b))
            lhs = minkowski_sum(psi_summand(e, a).polyhedron, psi_summand(e, b).polyhedron)
            assert lhs == psi_summand(e, s).polyhedron


@given(st.fractions(0, 3, max_denominator=6), st.fractions(0, 3, max_denominator=6), st.fractions(0, 3, max_denominator=6))
@settings(max_examples=50, deadline=None)
def test_psi_is_additive_on_cone(a, b, c):
    e = space("interval")
    x, y = (a, b, c), (c, a, b)
    s = tuple(p + q for p, q in zip(x, y))
    assert minkowski_sum(psi_summand(e, x).polyhedron, psi_summand(e, y).polyhedron) == psi_summand(e, s).polyhedron


@pytest.mark.parametrize("name", ["interval", "length_two", "unit", "triangle"])
def test_kappa_inverts_psi(name):
    e = space(name)
    for xi in slice_points(e):
        Q = psi_summand(e, xi).polyhedron
        assert kodaira_spencer(e, Q).as_xi() == xi


def test_psi_vertex_map_starts_at_reference():
    e = space("hexagon")
    vm = psi_vertex_map(e, e.T.oneone)
    assert vm == e.P.vertices


def test_kappa_on_short_interval():
    e = space("short")
    assert kodaira_spencer(e, e.P).as_xi() == (1, 1, 1)
    Q1, Q2 = polytope((0,), ("1/4",)), polytope(("1/2",))
    k1, k2 = kodaira_spencer(e, Q1), kodaira_spencer(e, Q2)
    assert (k1.t, k1.s) == ((1,), (0, 1))
    assert (k2.t, k2.s) == ((0,), (1, 1))
    rep = is_lattice_friendly(e, [Q1, Q2])
    assert not rep.additive
    assert rep.in_T == [False, False]


def test_kappa_rejects_non_summands():
    e = space("hexagon")
    with pytest.raises(NotASummand):
        kodaira_spencer(e, polytope((0, 0), (1, -1)))


def test_sum_mismatch():
    e = space("interval")
    with pytest.raises(SumMismatch):
        is_lattice_friendly(e, [polytope((0,), (1,))])


def test_negative_decomposition_is_not_lattice_friendly():
    e = space("negative")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeParameterWarning)
        Q1 = psi_summand(e, ("1/7", 1, -1), strict=False).polyhedron
    Q2 = polytope((0,), ("1/2",))
    assert minkowski_sum(Q1, Q2) == e.P
    rep = is_lattice_friendly(e, [Q1, Q2])
    assert not rep.lattice_friendly
    assert rep.verdicts_agree
    assert rep.exceptions == [0, "many"]


def test_catalog_of_length_two_segment():
    cat = enumerate_lattice_friendly(space("length_two"))
    assert cat.B == [(0, 0, 0), (Fraction(1, 2), 0, 0), (1, 0, 0)]
    assert cat.nontrivial == [[(Fraction(1, 2), 0, 0), (Fraction(1, 2), 0, 0)]]


def test_catalog_of_point():
    cat = enumerate_lattice_friendly(space("point"))
    assert cat.nontrivial == []
    assert len(cat.decompositions) == 1


def test_catalog_reports_are_certified():
    cat = enumerate_lattice_friendly(space("interval"))
    assert all(r.lattice_friendly and r.verdicts_agree for r in cat.reports)


def test_tautological_cone_fibers():
    e = space("interval")
    taut = tautological_cone(e)
    assert taut.fiber((1, 1, 1)) == e.P
    assert taut.contains((1, 1, 1), (0,))
    assert not taut.contains((1, 1, 1), (1,))


def test_tautological_projection_is_minkowski_linear():
    e = space("interval")
    pr, C = tautological_projection(e)
    assert minkowski_linearity_check(pr, C, [(1, 1, 1), ("1/2", 1, 0), (0, 1, 1), (1, 0, 0)])
    assert face_map_check(pr, C) == (True, None)


def test_face_map_check_finds_failing_face():
    orthant = ConeZ.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    ok, witness = face_map_check([[1, 0, 1], [0, 1, 1]], orthant)
    assert not ok and witness == ((0, 0, 1),)
    assert face_map_check([[1, 0, 0], [0, 1, 0]], orthant) == (True, None)


@pytest.mark.parametrize("xis", [[("1/2", 1, 0), ("1/2", 0, 1)], [(0, 1, 1), (1, 0, 0)]])
def test_fiber_product(xis):
    assert check_fiber_product(space("interval"), xis)


def test_sum_of_catalog_summands_is_polytope():
    e = space("interval")
    for dec in enumerate_lattice_friendly(e).decompositions:
        assert minkowski_sum_all([psi_summand(e, xi).polyhedron for xi in dec]) == e.P


@pytest.mark.parametrize(
    "name, flags",
    [("interval", [False]), ("unit", [True]), ("length_two", [False]), ("triangle", [True, True, True]), ("point", [])],
)
def test_smoothness_flag(name, flags):
    assert smooth_in_codim_two(space(name).P) == flags
