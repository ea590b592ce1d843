from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from amoeba_spine.errors import DegeneratePolygon, InputError, NonConvexInput
from amoeba_spine.lattice import (LatticePolygon, enumerate_points, interior_points, normal_fan, pick_check,
                                  standard_triangle)

from oracles import hull_lattice_points

HEX = [(1, 0), (4, 0), (4, 1), (2, 3), (0, 3), (0, 1)]

coords = st.integers(-6, 6)
point_sets = st.lists(st.tuples(coords, coords), min_size=3, max_size=9, unique=True)


def test_standard_triangle_counts():
    for d in range(1, 7):
        P = standard_triangle(d)
        assert len(P.points) == (d + 1) * (d + 2) // 2
        assert len(interior_points(P)) == (d - 1) * (d - 2) // 2
        assert P.area == Fraction(d * d, 2)


def test_hexagon_points():
    P = enumerate_points(HEX)
    assert len(P.points) == 16
    assert len(P.interior) == 5
    assert P.vertices[0] == (0, 1)


def test_orientation_and_collinear_vertices_normalized():
    a = enumerate_points([(0, 0), (2, 0), (0, 2)])
    c = enumerate_points([(0, 0), (1, 0), (2, 0), (0, 2)])
    assert a.vertices == c.vertices
    assert a.points == c.points
    assert a.vertices == enumerate_points([(0, 2), (2, 0), (0, 0)]).vertices


@pytest.mark.parametrize("verts,err", [
    ([(0, 0), (2, 0), (1, 1), (2, 2), (0, 2)], NonConvexInput),
    ([(0, 0), (1, 1), (2, 2)], DegeneratePolygon),
    ([(0, 0), (1, 0)], DegeneratePolygon),
    ([(0, 0), (0.5, 0), (0, 1)], InputError),
])
def test_bad_polygons(verts, err):
    with pytest.raises(err):
        enumerate_points(verts)


def test_normal_fan_supports():
    P = enumerate_points(HEX)
    fan = normal_fan(P)
    assert len(fan.rays) == len(P.edges)
    for ray, (a, b) in zip(fan.rays, P.edges):
        for m in P.points:
            v = m[0] * ray.e[0] + m[1] * ray.e[1] + ray.l
            assert v >= 0
            assert (v == 0) == (m in P.points_on_edge(P.edges.index((a, b))))


def test_json_round_trip():
    P = enumerate_points(HEX)
    assert LatticePolygon.from_json(P.to_json()) == P


@given(point_sets)
def test_hull_matches_brute_force(pts):
    try:
        P = LatticePolygon.hull(pts)
    except DegeneratePolygon:
        return
    all_pts, inner = hull_lattice_points(P.vertices)
    assert sorted(P.points) == all_pts
    assert sorted(P.interior) == inner
    assert pick_check(P)


@given(point_sets, st.tuples(coords, coords))
def test_translation_preserves_counts(pts, v):
    try:
        P = LatticePolygon.hull(pts)
    except DegeneratePolygon:
        return
    Q = P.translate(v)
    assert len(Q.points) == len(P.points)
    assert len(Q.interior) == len(P.interior)
    assert Q.twice_area == P.twice_area
