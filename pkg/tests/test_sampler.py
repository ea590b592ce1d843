import numpy as np
import pytest
from hypothesis import given, strategies as st

from amoeba_spine.errors import InputError, ResolutionTooCoarse
from amoeba_spine.families import standard_family
from amoeba_spine.lattice import standard_triangle
from amoeba_spine.moment import LaurentSection, MomentParams, eval_section
from amoeba_spine.sampler import (AmoebaConfig, AmoebaRaster, HoleReport, RasterGrid, SliceSpec, amoeba_raster,
                                  complement_components, count_holes, count_legs, disk, hausdorff_to_spine,
                                  sample_curve)
from amoeba_spine.spine import build_spine
from amoeba_spine.subdivision import subdivide

SMALL = AmoebaConfig(resolution=160, slices=240, angles=32)


def line():
    return LaurentSection({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0})


def test_slice_samples_lie_on_curve():
    s = line()
    blk = sample_curve(s, MomentParams(), SliceSpec("fix_x1", (-5.0, 5.0), slices=20, angles=8))
    assert blk.failures == 0
    lr, th = blk.points()
    ok = np.isfinite(lr).all(axis=1)
    vals = eval_section(s, MomentParams(), (lr[ok], th[ok]))
    assert np.abs(vals).max() < 1e-9


def test_sampling_is_thread_count_independent():
    P, w, s = standard_family(3)
    p = MomentParams(delta=1e-2, w=w)
    spec = SliceSpec("fix_x2", (-10.0, 10.0), slices=96, angles=16)
    a = sample_curve(s, p, spec, seed=5, threads=1)
    b = sample_curve(s, p, spec, seed=5, threads=4)
    assert np.array_equal(a.roots, b.roots, equal_nan=True)
    assert np.array_equal(a.ok, b.ok)


def test_raster_determinism_and_round_trip():
    P, w, s = standard_family(2)
    p = MomentParams(delta=1e-2, w=w)
    r1 = amoeba_raster(s, p, AmoebaConfig(120, 160, 24, threads=1), P)
    r2 = amoeba_raster(s, p, AmoebaConfig(120, 160, 24, threads=3), P)
    assert r1 == r2
    assert AmoebaRaster.from_json(r1.to_json()) == r1


def test_line_raster_has_three_legs_and_no_hole():
    P = standard_triangle(1)
    r = amoeba_raster(line(), MomentParams(), SMALL, P)
    rep = count_holes(r)
    assert rep.holes == 0
    assert rep.legs == {0: 1, 1: 1, 2: 1}
    assert HoleReport.from_json(rep.to_json()) == rep


def test_resolution_check_against_spine():
    # the spine itself must resolve at the raster's scale and dilation
    P, w, s = standard_family(3)
    p = MomentParams(delta=1e-3, w=w)
    g = build_spine(subdivide(P, w))
    r = amoeba_raster(s, p, AmoebaConfig(300, 400, 48), P)
    assert count_holes(r, spine=g).holes == 1
    fat = AmoebaRaster(r.grid, r.occupancy, 60.0, dict(r.meta))
    with pytest.raises(ResolutionTooCoarse):
        count_holes(fat, spine=g)
    with pytest.raises(InputError):
        count_holes(AmoebaRaster(r.grid, np.zeros_like(r.occupancy), 1.5, {}))


def test_complement_components_synthetic():
    occ = np.zeros((30, 30), bool)
    occ[5:25, 5] = occ[5:25, 24] = occ[5, 5:25] = occ[24, 5:25] = True
    occ[14, 5:25] = True
    holes = complement_components(occ)
    assert sorted(holes) == [8 * 18, 9 * 18]


def test_count_legs_synthetic():
    g = RasterGrid(standard_triangle(1), 100)
    X, Y = g.centers()
    occ = g.inside() & ((np.abs(Y - 0.2) < 0.02) | (np.abs(Y - 0.6) < 0.02)) & (X < 0.1)
    legs = count_legs(occ, g)
    # both strips touch the x = 0 side
    side = [k for k, (a, b) in enumerate(g.polygon.edges) if a[0] == b[0] == 0][0]
    assert legs[side] == 2


def test_spine_distance_of_rasterized_spine_is_small():
    P, w, s = standard_family(2)
    g = build_spine(subdivide(P, w))
    r = amoeba_raster(s, MomentParams(delta=1e-3, w=w), SMALL, P)
    d = hausdorff_to_spine(r, g)
    assert d.spine_to_amoeba_cells <= 2


@given(st.floats(0.5, 4.0))
def test_disk_is_symmetric(radius):
    k = disk(radius)
    assert k.shape[0] == k.shape[1] and k.shape[0] % 2 == 1
    assert np.array_equal(k, k.T) and np.array_equal(k, k[::-1])
    assert k[k.shape[0] // 2, k.shape[0] // 2]


def test_config_validation():
    with pytest.raises(InputError):
        AmoebaConfig(resolution=4)
    with pytest.raises(InputError):
        SliceSpec("fix_x3", (0.0, 1.0))
