import pytest
from hypothesis import assume, given, strategies as st

from amoeba_spine.errors import NonGenericWeight
from amoeba_spine.lattice import enumerate_points, standard_triangle
from amoeba_spine.spine import SpineGraph, VertexKind, bounded_faces, build_spine, legs_per_polygon_edge
from amoeba_spine.subdivision import WeightFunction, standard_weight, subdivide

from frozen import HEXAGON_FACES, HEXAGON_LEGS

HEX = [(1, 0), (4, 0), (4, 1), (2, 3), (0, 3), (0, 1)]


def spine_of(P, w=None):
    return build_spine(subdivide(P, w or standard_weight(P)))


def test_single_triangle_is_y():
    g = spine_of(standard_triangle(1))
    assert len(g.trivalent) == 1
    assert len(g.ends) == 3
    assert len(g.edges) == 3
    assert bounded_faces(g) == 0


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_triangle_genus_and_legs(d):
    P = standard_triangle(d)
    g = spine_of(P)
    assert bounded_faces(g) == (d - 1) * (d - 2) // 2
    assert legs_per_polygon_edge(g, P) == {0: d, 1: d, 2: d}
    assert len(g.trivalent) == d * d
    g.check()


def test_hexagon_spine():
    P = enumerate_points(HEX)
    g = spine_of(P)
    assert bounded_faces(g) == HEXAGON_FACES == len(P.interior)
    assert legs_per_polygon_edge(g, P) == HEXAGON_LEGS
    assert HEXAGON_LEGS == {i: P.edge_lattice_length(i) for i in range(6)}


def test_json_round_trip():
    g = spine_of(enumerate_points(HEX))
    assert SpineGraph.from_json(g.to_json()) == g


def test_vertex_kinds_have_expected_degrees():
    g = spine_of(standard_triangle(3))
    deg = g.degrees()
    for i, v in enumerate(g.vertices):
        assert deg[i] == {VertexKind.TRIVALENT_CENTER: 3, VertexKind.EDGE_BARYCENTER: 2,
                          VertexKind.BOUNDARY_END: 1}[v.kind]


@given(st.data(), st.integers(2, 4))
def test_unimodular_spines_have_genus_interior_points(data, d):
    P = standard_triangle(d)
    # quadratic weight plus noise: mostly full unimodular triangulations, not all the same
    vals = data.draw(st.lists(st.integers(-7, 7), min_size=len(P.points), max_size=len(P.points)))
    q = standard_weight(P)
    w = WeightFunction({m: 4 * q[m] + v for m, v in zip(P.points, vals)})
    try:
        Z = subdivide(P, w)
    except NonGenericWeight:
        assume(False)
    assume(Z.all_unimodular and not Z.hidden)
    g = build_spine(Z)
    assert bounded_faces(g) == len(P.interior)
    assert sum(legs_per_polygon_edge(g, P).values()) == len(P.boundary)
    assert g.components() == 1
