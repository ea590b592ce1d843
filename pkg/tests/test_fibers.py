import numpy as np
import pytest
from hypothesis import given, strategies as st

from amoeba_spine.errors import InputError
from amoeba_spine.families import standard_family
from amoeba_spine.fibers import (FiberKind, boundary_fiber, classify_fiber, component_betti, cutoff_section,
                                 fiber_topology, line_model_fiber, periodic_label, torus_fiber)
from amoeba_spine.local_models import CutoffProfile, IsotopyMap, ProfileKind
from amoeba_spine.moment import MomentParams, invert_moment
from amoeba_spine.subdivision import subdivide

PW1 = IsotopyMap(CutoffProfile(ProfileKind.PIECEWISE_MAX), 1.0)
THIRD = (1 / 3, 1 / 3)


def test_classify():
    assert classify_fiber([0, 0]) is FiberKind.POINTS
    assert classify_fiber([1, 1]) is FiberKind.CIRCLES
    assert classify_fiber([2]) is FiberKind.THETA
    assert classify_fiber([2, 1]) is FiberKind.OTHER


def test_betti_of_synthetic_masks():
    m = np.zeros((40, 40), bool)
    m[10, :] = True                   # closed loop around the periodic torus
    assert component_betti(m) == [1]
    assert component_betti(m, (False, False)) == [0]
    m[:, 20] = True                   # wedge of two loops
    assert component_betti(m) == [2]
    ring = np.zeros((40, 40), bool)
    ring[5:15, 5] = ring[5:15, 14] = ring[5, 5:15] = ring[14, 5:15] = True
    assert component_betti(ring, (False, False)) == [1]
    assert component_betti(np.ones((8, 8), bool)) == [2]  # full torus


@given(st.integers(0, 39), st.integers(0, 39))
def test_periodic_label_wraps(i, j):
    m = np.zeros((40, 40), bool)
    m[i, :] = True
    m[:, j] = True
    _, n = periodic_label(m)
    assert n == 1


def test_line_fibers_over_y():
    assert line_model_fiber(PW1, THIRD).kind is FiberKind.THETA
    rep = line_model_fiber(PW1, THIRD)
    assert (rep.components, rep.betti1) == (1, 2)
    for r in [(0.42, 0.42), (0.2, 0.4), (0.4, 0.2), (0.45, 0.05), (0.05, 0.45)]:
        rep = line_model_fiber(PW1, r)
        assert (rep.kind, rep.components, rep.betti1) == (FiberKind.CIRCLES, 1, 1), r


def test_boundary_and_torus_fibers():
    P, w, s = standard_family(1)
    p = MomentParams()
    for r in [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]:
        rep = fiber_topology(s, p, r, model=PW1, polygon=P)
        assert rep.kind is FiberKind.POINTS and rep.components == 1
    rep = boundary_fiber(s, p, P, 0, (0.5, 0.0))
    assert rep.components == 1
    rep = torus_fiber(s, p, (0.3, 0.3), 200)
    assert (rep.kind, rep.components) == (FiberKind.POINTS, 2)


def test_fibers_through_subdivision():
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    p = MomentParams(delta=1e-3, w=w)
    tri = Z.triangles[0]
    c = tuple(np.mean(np.array(tri, float), axis=0))
    assert fiber_topology(s, p, c, model=PW1, Z=Z).kind is FiberKind.THETA
    a, b = tri[0], tri[1]
    mid = ((a[0] + b[0]) / 2 * 0.9 + c[0] * 0.1, (a[1] + b[1]) / 2 * 0.9 + c[1] * 0.1)
    assert fiber_topology(s, p, mid, model=PW1, Z=Z).kind is FiberKind.CIRCLES


def test_angle_grid_validated():
    P, w, s = standard_family(1)
    with pytest.raises(InputError):
        fiber_topology(s, MomentParams(), THIRD, angle_grid=4, model=PW1)


def test_cutoff_section_localizes_on_cells():
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    p = MomentParams(delta=1e-4, w=w)
    cs = cutoff_section(s, p, Z, eps=0.1)
    assert len(cs.neighbourhoods[(1, 1)]) == 7  # itself and six neighbours
    rng = np.random.default_rng(0)
    for tri in Z.triangles:
        c = np.mean(np.array(tri, float), axis=0)
        L = invert_moment(s, p, c[None, :])
        th = rng.uniform(0, 2 * np.pi, (1, 2))
        hat = cs.hat(L, th)[0]
        loc = sum(s.coefficients[m] * 1e-4 ** float(w[m]) * np.exp(np.dot(L[0] + 1j * th[0], m)) for m in tri)
        assert hat == pytest.approx(loc, rel=1e-9)


def test_cutoff_section_parameter_checks():
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    with pytest.raises(InputError):
        cutoff_section(s, MomentParams(delta=1e-3, w=w), Z, eps=0.05, eps_check=0.02)
    with pytest.raises(InputError):
        cutoff_section(s, MomentParams(delta=1e-4, w=w), Z, eps=0.05, eps_check=0.1)
