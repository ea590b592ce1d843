from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from amoeba_spine.errors import InputError, InvariantViolation, NonGenericWeight, NotACell
from amoeba_spine.lattice import enumerate_points, standard_triangle
from amoeba_spine.subdivision import (AffineFunctional, Classification, ConeMembership, Subdivision,
                                      WeightFunction, affine_normalize, classify, cone_contains,
                                      convexity_gap, standard_weight, subdivide)

from oracles import is_unimodular, lower_hull_triangles

HEX = [(1, 0), (4, 0), (4, 1), (2, 3), (0, 3), (0, 1)]


def random_weight(data, P, lo=-50, hi=50):
    vals = data.draw(st.lists(st.integers(lo, hi), min_size=len(P.points), max_size=len(P.points)))
    return WeightFunction(dict(zip(P.points, vals)))


fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
affine = st.builds(AffineFunctional, fracs, st.tuples(fracs, fracs))


def test_standard_weight_gives_unimodular_triangulation():
    for d in range(1, 6):
        P = standard_triangle(d)
        Z = subdivide(P, standard_weight(P))
        assert len(Z.triangles) == d * d
        assert Z.all_unimodular and not Z.hidden
        assert classify(Z) is Classification.PARTIAL_SECONDARY
        if d > 1:
            assert convexity_gap(Z, standard_weight(P)) == 1


def test_hexagon_triangulation():
    P = enumerate_points(HEX)
    Z = subdivide(P, standard_weight(P))
    assert len(Z.triangles) == P.twice_area
    assert Z.all_unimodular


def test_hidden_point_makes_secondary_only():
    P = standard_triangle(3)
    w = WeightFunction({m: v + (100 if m == (1, 1) else 0) for m, v in standard_weight(P).items()})
    Z = subdivide(P, w, perturb="lex")
    assert Z.hidden == ((1, 1),)
    assert Z.triangle_containing((1, 1)) is not None
    assert classify(Z) is Classification.SECONDARY_ONLY


def test_flat_weight_is_not_generic():
    P = standard_triangle(2)
    w = WeightFunction({m: 0 for m in P.points})
    with pytest.raises(NonGenericWeight):
        subdivide(P, w)
    Z = subdivide(P, w, perturb="lex")
    Z.validate()


def test_weight_domain_checked():
    P = standard_triangle(2)
    with pytest.raises(InputError):
        subdivide(P, WeightFunction({(0, 0): 1}))


def test_overlapping_triangles_rejected():
    P = standard_triangle(1)
    with pytest.raises(InvariantViolation):
        Subdivision(P, (((0, 0), (1, 0), (0, 1)), ((0, 0), (1, 0), (0, 1)))).validate()


def test_affine_normalize():
    P = standard_triangle(3)
    w = standard_weight(P)
    Z = subdivide(P, w)
    S = Z.triangles[0]
    w2, f = affine_normalize(w, S, Z)
    assert all(w2[m] == 0 for m in S)
    assert all(w2[m] > 0 for m in P.points if m not in S)
    with pytest.raises(NotACell):
        affine_normalize(w, ((0, 0), (3, 0), (0, 3)), Z)


def test_json_round_trip():
    P = enumerate_points(HEX)
    w = standard_weight(P)
    Z = subdivide(P, w)
    assert Subdivision.from_json(Z.to_json()) == Z
    assert WeightFunction.from_json(w.to_json()) == w


def test_cone_membership():
    P = standard_triangle(2)
    w = standard_weight(P)
    Z = subdivide(P, w)
    assert cone_contains(Z, w) is ConeMembership.INSIDE
    assert cone_contains(Z, WeightFunction({m: 0 for m in P.points})) is ConeMembership.BOUNDARY
    assert cone_contains(Z, WeightFunction({m: -v for m, v in w.items()})) is ConeMembership.OUTSIDE


@given(st.data(), st.integers(1, 4))
def test_subdivision_matches_brute_force_lower_hull(data, d):
    P = standard_triangle(d)
    w = random_weight(data, P)
    tris, generic = lower_hull_triangles(P.points, w)
    try:
        Z = subdivide(P, w)
    except NonGenericWeight:
        assert not generic
        return
    assert generic
    assert sorted(Z.triangles) == tris
    assert list(Z.unimodular) == [is_unimodular(t) for t in Z.triangles]


@given(st.data(), affine)
def test_affine_change_keeps_subdivision(data, f):
    P = standard_triangle(3)
    w = random_weight(data, P)
    try:
        Z = subdivide(P, w)
    except NonGenericWeight:
        assume(False)
    assert subdivide(P, w.plus_affine(f)) == Z
    assert convexity_gap(Z, w.plus_affine(f)) == convexity_gap(Z, w)


@given(st.data())
def test_lex_perturbation_always_tiles(data):
    P = enumerate_points(HEX)
    w = random_weight(data, P, -2, 2)
    Z = subdivide(P, w, perturb="lex")
    Z.validate()
    assert sum(abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
               for a, b, c in Z.triangles) == P.twice_area


@given(st.data())
def test_weight_inside_own_cone(data):
    P = standard_triangle(3)
    w = random_weight(data, P)
    try:
        Z = subdivide(P, w)
    except NonGenericWeight:
        assume(False)
    assert cone_contains(Z, w) is ConeMembership.INSIDE
    assert convexity_gap(Z, w) > 0 or Z.hidden
    assert isinstance(convexity_gap(Z, w), Fraction)
