from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkext.exactcore import dot
from minkext.polyhedron import (
    ConeZ,
    RationalPolyhedron,
    cone_hrep_to_vrep,
    cone_over,
    dual_cone,
    face_at,
    minkowski_sum,
    normal_cone,
    polytope,
)

coords = st.fractions(min_value=-3, max_value=3, max_denominator=4)
points2 = st.lists(st.tuples(coords, coords), min_size=1, max_size=6)
directions = st.tuples(st.integers(-4, 4), st.integers(-4, 4))

HEXAGON = polytope((0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1))


def test_cube_double_description():
    ineqs = [tuple(int(i == j) * s for j in range(3)) for i in range(3) for s in (1, -1)]
    # homogenised unit cube: 0 <= x_i <= h
    hom = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (-1, 0, 0, 1), (0, -1, 0, 1), (0, 0, -1, 1)]
    rays, lin = cone_hrep_to_vrep(hom, [], 4)
    assert not lin
    assert len(rays) == 8 and all(r[-1] == 1 for r in rays)
    assert len(ineqs) == 6


def test_cone_with_lineality():
    C = ConeZ.from_hrep([(0, 1)], 2)
    assert C.lineality and not C.is_pointed
    assert C.rays == ((0, 1),)


@pytest.mark.parametrize(
    "rays, dual_rays",
    [
        ([(1, 0), (1, 1)], ((0, 1), (1, -1))),
        ([(-2, 1), (2, 1)], ((-1, 2), (1, 2))),
        ([(1, 0), (0, 1)], ((0, 1), (1, 0))),
    ],
)
def test_dual_cone(rays, dual_rays):
    C = ConeZ.from_rays(rays, 2)
    D = dual_cone(C)
    assert D.rays == dual_rays
    assert dual_cone(D).rays == C.rays


@given(st.lists(directions.filter(any), min_size=1, max_size=4), directions)
@settings(max_examples=60)
def test_dual_cone_pairing(rays, x):
    C = ConeZ.from_rays(rays, 2)
    D = dual_cone(C)
    for r in C.rays:
        assert all(dot(r, y) >= 0 for y in D.rays)
    by_hrep = all(dot(a, x) >= 0 for a in C.ineqs) and all(dot(e, x) == 0 for e in C.eqs)
    by_dual = all(dot(x, y) >= 0 for y in D.rays) and all(dot(x, l) == 0 for l in D.lineality)
    assert C.contains(x) == by_hrep == by_dual


def test_hexagon_combinatorics():
    assert len(HEXAGON.vertices) == 6
    assert len(HEXAGON.edges) == 6
    (face,) = HEXAGON.compact_two_faces
    assert sorted(face.order) == list(range(6))
    assert all(len(n) == 2 for n in HEXAGON.neighbors)


def test_unbounded_polyhedron():
    Q = RationalPolyhedron.from_vrep([(0, 0)], [(1, 0), (0, 1)])
    assert not Q.is_bounded
    assert Q.tail_cone.rays == ((0, 1), (1, 0))
    assert Q.edges == ()


def test_from_hrep_simplex():
    T = RationalPolyhedron.from_hrep([((1, 0), 0), ((0, 1), 0), ((-1, -1), -1)])
    assert T == polytope((0, 0), (1, 0), (0, 1))


def test_json_round_trip():
    P = polytope(("-1/2", "1/3"), (1, 0), (0, 2))
    data = P.to_json()
    assert data["vertices"][0] == ["-1/2", "1/3"]
    assert RationalPolyhedron.from_json(data) == P


@pytest.mark.parametrize("bad", [{}, {"vertices": []}, {"vertices": [["x"]]}])
def test_from_json_rejects(bad):
    with pytest.raises((ValueError, KeyError, ZeroDivisionError)):
        RationalPolyhedron.from_json(bad)


def test_cone_over_interval():
    C = cone_over(polytope(("-1/2",), ("1/2",)))
    assert C.rays == ((-1, 2), (1, 2))


def test_normal_cone_and_face():
    assert normal_cone(HEXAGON, 0).rays == ((0, 1), (1, 0))
    F = face_at(HEXAGON, (1, 0))
    assert F == polytope((0, 0), (0, 1))


@given(points2, points2, directions)
@settings(max_examples=40, deadline=None)
def test_support_function_is_additive(a, b, c):
    A = RationalPolyhedron.from_vrep(a)
    B = RationalPolyhedron.from_vrep(b)
    assert minkowski_sum(A, B).support(c) == A.support(c) + B.support(c)


@given(points2, directions)
@settings(max_examples=40, deadline=None)
def test_support_attained_at_minimizers(a, c):
    A = RationalPolyhedron.from_vrep(a)
    h = A.support(c)
    assert all(dot(v, c) >= h for v in A.vertices)
    assert all(dot(A.vertices[i], c) == h for i in A.minimizers(c))


def test_translate_and_scale():
    P = polytope((0,), (1,))
    assert P.translate((Fraction(1, 2),)) == polytope(("1/2",), ("3/2",))
    assert P.scale(3) == polytope((0,), (3,))
