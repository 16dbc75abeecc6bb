from fractions import Fraction

import pytest
from conftest import space
from hypothesis import given, settings
from hypothesis import strategies as st

from minkext.etaspace import EtaOracle, EtaSpace, Functional, NotInTP, edge_data, eta_table
from minkext.exactcore import dot
from minkext.polyhedron import polytope

c1 = st.tuples(st.integers(-6, 6))
c2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
c3 = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
ONE_DIM = ["interval", "short", "thin", "negative", "unit", "length_two"]
TWO_DIM = ["g2_long", "g2_short", "triangle", "hexagon"]


@pytest.mark.parametrize(
    "c, eta, eta_Z",
    [((-2,), 1, 1), ((-1,), Fraction(1, 2), 1), ((0,), 0, 0), ((1,), Fraction(1, 2), 1), ((2,), 1, 1), ((3,), Fraction(3, 2), 2)],
)
def test_eta_of_symmetric_interval(interval, c, eta, eta_Z):
    assert interval.oracle.eta(c) == eta
    assert interval.oracle.eta_Z(c) == eta_Z


def test_vertex_selector_prefers_lexicographic_minimum():
    O = EtaOracle(polytope((0, 0), (1, 0), (0, 1)))
    assert O.v_of((0, 0)) == 0
    assert O.vertex((1, 1)) == (0, 0)


def test_normalisation_moves_a_lattice_vertex_to_origin():
    O = EtaOracle(polytope((2, 3), (3, 3), ("5/2", 4)))
    assert O.P.vertices[O.reference] == (0, 0)
    assert O.shift == (-2, -3)


def test_without_lattice_vertex_nothing_moves(interval):
    assert interval.oracle.shift == (0,)
    assert interval.P.vertices[interval.oracle.reference] == (Fraction(-1, 2),)


@pytest.mark.parametrize(
    "name, g, forward, backward, disjoint",
    [
        ("interval", 1, False, False, False),
        ("thin", 1, False, False, False),
        ("short", 1, True, True, True),
        ("g2_long", 2, False, False, True),
        ("g2_short", 2, False, True, True),
        ("unit", 1, False, False, False),
    ],
)
def test_edge_data(name, g, forward, backward, disjoint):
    (d,) = edge_data(space(name).P)
    assert (d.g, d.short_forward, d.short_backward, d.lattice_disjoint) == (g, forward, backward, disjoint)


@pytest.mark.parametrize(
    "name, dim_T, rank_TZ",
    [("interval", 3, 3), ("short", 1, 1), ("g2_long", 2, 2), ("g2_short", 1, 1), ("unit", 1, 1),
     ("triangle", 1, 1), ("hexagon", 4, 4), ("cube", 3, 3), ("point", 0, 0)],
)
def test_dimensions(name, dim_T, rank_TZ):
    e = space(name)
    assert e.T.dim == dim_T
    assert e.L.rank == rank_TZ


def test_short_interval_forces_equal_parameters():
    T = space("short").T
    assert T.contains((1, 1, 1))
    assert not T.contains((1, 0, 1))


def test_lattice_of_symmetric_interval(interval):
    L = interval.L
    assert L.contains((Fraction(1, 2), 0, 1))
    assert not L.contains((Fraction(1, 2), 0, 0))
    assert L.contains(interval.T.oneone)


def test_lattice_of_negative_example():
    assert space("negative").L.contains((Fraction(1, 7), 1, -1))


@pytest.mark.parametrize("name", ONE_DIM + TWO_DIM + ["cube", "point"])
def test_oneone_in_cone_and_lattice(name):
    e = space(name)
    one = e.T.oneone
    assert e.T.in_T_plus(one)
    assert e.T.T_plus.contains(one)
    assert e.L.contains(one)


def test_functional_arithmetic(interval):
    t = interval.functional_t(0)
    s1 = interval.functional_s(0)
    f = t + Fraction(1, 2) * s1
    assert interval.format(f) == "t + 1/2*s1"
    assert interval.format(f - f) == "0"
    assert (-f + f).is_zero()
    assert Functional.from_json(f.to_json()) == f
    assert interval.parse_functional({"t": "1", "s1": "1/2"}) == f


@pytest.mark.parametrize(
    "c, eta_tilde, eta_tilde_Z",
    [
        ((-2,), "2*t - s1", "2*t - s1"),
        ((-1,), "t - 1/2*s1", "t - 1/2*s1 + 1/2*s2"),
        ((0,), "0", "0"),
        ((1,), "1/2*s1", "s1"),
        ((2,), "s1", "s1"),
    ],
)
def test_lifted_eta_values(interval, c, eta_tilde, eta_tilde_Z):
    assert interval.format(interval.eta_tilde(c)) == eta_tilde
    assert interval.format(interval.eta_tilde_Z(c)) == eta_tilde_Z


def test_eta_tilde_outside_domain_raises():
    e = EtaSpace(type(space("unit").P).from_vrep([(0,)], [(1,)]))
    with pytest.raises(ValueError):
        e.eta_tilde((-1,))


def test_eta_table_rows(interval):
    rows = eta_table(interval, 1)
    assert [r["eta"] for r in rows] == ["1/2", "0", "1/2"]
    assert [r["eta_Z"] for r in rows] == [1, 0, 1]


@pytest.mark.parametrize("name", ONE_DIM)
@given(c=c1)
def test_projection_recovers_eta_Z_1d(name, c):
    e = space(name)
    assert e.pi(e.eta_tilde_Z(c)) == e.oracle.eta_Z(c)
    assert e.pi(e.eta_tilde(c)) == e.oracle.eta(c)


@pytest.mark.parametrize("name", TWO_DIM)
@given(c=c2)
@settings(max_examples=40, deadline=None)
def test_projection_recovers_eta_Z_2d(name, c):
    e = space(name)
    assert e.pi(e.eta_tilde_Z(c)) == e.oracle.eta_Z(c)


@pytest.mark.parametrize("name", ONE_DIM + TWO_DIM)
def test_dual_lattice_membership(name):
    e = space(name)
    for c in e.grid(3 if e.P.dim == 1 else 2):
        assert e.dual_lattice_member(e.eta_tilde_Z(c))
        assert e.dual_lattice_member(e.eta_tilde(c)) == (e.oracle.eta(c).denominator == 1)


@given(a=c1, b=c1)
def test_eta_Z_is_subadditive(a, b):
    O = space("interval").oracle
    assert O.eta_Z(a) + O.eta_Z(b) >= O.eta_Z((a[0] + b[0],))


@pytest.mark.parametrize("name", ["hexagon", "triangle"])
@given(c=c2)
@settings(max_examples=40, deadline=None)
def test_independent_of_minimising_vertex_2d(name, c):
    e = space(name)
    base = e.eta_tilde_Z(c)
    for v in e.P.minimizers(c):
        assert e.eta_tilde_Z(c, vertex=v) == base


@given(c=c3)
@settings(max_examples=30, deadline=None)
def test_independent_of_minimising_vertex_cube(c):
    e = space("cube")
    base = e.eta_tilde(c)
    for v in e.P.minimizers(c):
        assert e.eta_tilde(c, vertex=v) == base


@pytest.mark.parametrize("name", ["hexagon", "cube"])
def test_independent_of_path(name):
    e = space(name)
    ref = e.oracle.reference
    rng = 2 if e.P.dim == 2 else 1
    for c in e.grid(rng):
        v = e.P.minimizers(c)[0]
        base = e.eta_tilde(c)
        # go the other way round through every neighbour of the reference vertex
        for nb in e.P.neighbors[ref]:
            path = [ref] + e.path(nb, v)
            if len(set(path)) == len(path):
                assert e.eta_tilde(c, path=path) == base


def test_bad_path_rejected():
    e = space("hexagon")
    with pytest.raises(ValueError):
        e.eta_tilde((1, 1), path=[3, 0])


@pytest.mark.parametrize("name", ["interval", "thin", "hexagon"])
def test_reference_change_differs_by_dual_lattice_element(name):
    e = space(name)
    for r in range(len(e.P.vertices)):
        for c in e.grid(2):
            diff = e.eta_tilde(c, reference=r) - e.eta_tilde(c)
            assert e.dual_lattice_member(diff)


def test_tspace_point_and_coordinates():
    T = space("hexagon").T
    one = T.oneone
    assert T.point(T.basis_coordinates(one)) == one
    with pytest.raises(NotInTP):
        T.basis_coordinates((1, 0, 0, 0, 0, 0) + (0,) * 6)


def test_triangle_edges_dilate_together():
    T = space("triangle").T
    # lattice vertices carry no vertex parameter
    assert T.contains((2, 2, 2, 0, 0, 0))
    assert not T.contains((2, 2, 2, 1, 0, 0))
    assert not T.contains((1, 2, 1, 0, 0, 0))


def test_lattice_dual_coordinates_round_trip(interval):
    f = interval.eta_tilde_Z((-1,))
    z = interval.L.dual_coordinates(f)
    assert all(x.denominator == 1 for x in z)
    assert interval.L.functional_from_dual(z) == f


def test_to_json_uses_rational_strings(interval):
    data = interval.T.to_json()
    assert data["coordinates"] == ["t", "s1", "s2"]
    assert data["oneone"] == ["1", "1", "1"]
    assert interval.L.to_json()["basis"][0] == ["1/2", "0", "1"]
