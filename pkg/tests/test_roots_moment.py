import numpy as np
import pytest
from hypothesis import given, strategies as st

from amoeba_spine.errors import InputError, LemmaViolation
from amoeba_spine.families import standard_family
from amoeba_spine.lattice import standard_triangle
from amoeba_spine.moment import (LaurentSection, MomentParams, TorusPoint, active_sets, active_simplex,
                                 default_a_exponent, eval_section, invert_moment, localized_moment_array,
                                 moment, moment_array, rho_array)
from amoeba_spine.roots import newton_polygon_radii, polyroots
from amoeba_spine.subdivision import standard_weight, subdivide

complex_coef = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)


# --- roots ------------------------------------------------------------------

def test_polyroots_simple():
    C = np.array([[-6, 11, -6, 1]], dtype=complex)  # (z-1)(z-2)(z-3)
    res = polyroots(C)
    assert res.converged.all()
    assert np.allclose(np.sort(res.roots[0].real), [1, 2, 3], atol=1e-12)


def test_polyroots_wide_dynamic_range():
    roots = np.array([1e-8, 1e-3, 1.0, 1e4, 1e9])
    c = np.poly(roots)[::-1].astype(complex)
    res = polyroots(c[None, :])
    got = np.sort(np.abs(res.roots[0]))
    assert np.allclose(got / roots, 1, rtol=1e-8)


def test_polyroots_rejects_bad_shape():
    with pytest.raises(ValueError):
        polyroots(np.array([1.0, 2.0]))


@given(st.lists(complex_coef, min_size=2, max_size=9))
def test_polyroots_reconstructs(coefs):
    C = np.array([coefs], dtype=complex)
    res = polyroots(C, rng=np.random.default_rng(0))
    assert res.converged.all()
    z = res.roots[0]
    vals = np.polyval(C[0, ::-1], z)
    scale = np.polyval(np.abs(C[0, ::-1]), np.abs(z))
    assert (np.abs(vals) <= 1e-9 * scale).all()


def test_tropical_radii_match_root_moduli():
    roots = np.array([1e-4, 1e-1, 1e3])
    c = np.abs(np.poly(roots)[::-1])
    est = newton_polygon_radii(np.log(c)[None, :])[0]
    assert np.allclose(np.log(est), np.log(roots), atol=0.01)


# --- moment map ---------------------------------------------------------------

def unit(d):
    return LaurentSection({m: 1.0 for m in standard_triangle(d).points})


def test_moment_of_line_at_origin_is_barycenter():
    s = unit(1)
    F = moment(s, MomentParams(), TorusPoint((0.0, 0.0), (0.0, 0.0)))
    assert np.allclose(F, (1 / 3, 1 / 3))


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=2), st.sampled_from(["section", "unit", "fubini_study"]))
def test_moment_lands_in_polygon(u, metric):
    s = unit(3)
    R = rho_array(s, MomentParams(metric=metric), np.array([u]))
    assert np.isclose(R.sum(), 1.0)
    F = moment_array(s, MomentParams(metric=metric), np.array([u]))[0]
    assert F.min() >= -1e-12 and F.sum() <= 3 + 1e-12


def test_moment_is_overflow_safe():
    s = unit(4)
    F = moment_array(s, MomentParams(delta=1e-3, w=standard_weight(standard_triangle(4))),
                     np.array([[1e4, -1e4], [700.0, 700.0]]))
    assert np.isfinite(F).all()


def test_localized_moment_on_single_point_is_that_point():
    s = unit(2)
    F = localized_moment_array(s, MomentParams(), [(1, 1)], np.zeros((3, 2)))
    assert np.allclose(F, [[1, 1]] * 3)


def test_eval_section_at_root():
    s = unit(1)  # 1 + x1 + x2
    x = TorusPoint((np.log(0.5), np.log(1.5)), (0.0, np.pi))
    assert abs(eval_section(s, MomentParams(), x)) < 1e-14


def test_invert_moment_round_trip():
    s = unit(3)
    p = MomentParams()
    rng = np.random.default_rng(3)
    T = rng.uniform(0.2, 1.2, size=(50, 2))
    L = invert_moment(s, p, T)
    assert np.allclose(moment_array(s, p, L), T, atol=1e-9)


def test_cell_inversion_after_large_affine_shift():
    # large shifts make the potential big; Newton must still reach tol
    from fractions import Fraction
    from amoeba_spine.sampler import RasterGrid, invert_cells
    from amoeba_spine.subdivision import AffineFunctional
    P, w, s = standard_family(3)
    f = AffineFunctional(Fraction(-13, 4), (Fraction(9), Fraction(-11, 4)))
    pre = invert_cells(s, MomentParams(delta=1e-3, w=w.plus_affine(f)), RasterGrid(P, 75), levels=0)
    assert pre.failures == 0


def test_fs_metric_needs_triangle():
    s = LaurentSection({(-1, 0): 1, (2, 0): 1, (0, 1): 1})
    with pytest.raises(InputError):
        rho_array(s, MomentParams(metric="fubini_study"), np.zeros((1, 2)))


def test_params_validation():
    for kw in ({"delta": 0}, {"delta": 2}, {"metric": "nope"}, {"temper": 0}, {"a_exponent": -1}):
        with pytest.raises(InputError):
            MomentParams(**kw)


# --- active sets ----------------------------------------------------------------

def test_active_sets_small_batch():
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    p = MomentParams(delta=1e-3, w=w)
    assert default_a_exponent(Z, w) == 0.5
    rep = active_sets(s, p, Z, np.random.default_rng(0).uniform(-20, 20, (2000, 2)))
    assert rep.violations == []
    assert all(len(S) in (1, 2, 3) for S in rep.sets)


def test_active_simplex_violation_when_delta_large():
    # at delta = 1 nothing is localized: the origin activates all ten points
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    p = MomentParams(delta=0.999, w=w)
    with pytest.raises(LemmaViolation):
        active_simplex(s, p, TorusPoint((0.0, 0.0), (0.0, 0.0)), Z)


@given(st.lists(st.floats(-40, 40), min_size=2, max_size=2))
def test_active_set_is_a_cell(u):
    P, w, s = standard_family(3)
    Z = subdivide(P, w)
    rep = active_sets(s, MomentParams(delta=1e-3, w=w), Z, np.array([u]))
    assert not rep.violations
    assert Z.has_cell(rep.sets[0])


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40))
def test_cell_inversion_under_any_affine_shift(l, a, b):
    from fractions import Fraction
    from amoeba_spine.sampler import RasterGrid, invert_cells
    from amoeba_spine.subdivision import AffineFunctional
    P, w, s = standard_family(3)
    f = AffineFunctional(Fraction(l, 4), (Fraction(a, 4), Fraction(b, 4)))
    p = MomentParams(delta=1e-3, w=w.plus_affine(f))
    base = invert_cells(s, MomentParams(delta=1e-3, w=w), RasterGrid(P, 37), levels=0)
    pre = invert_cells(s, p, RasterGrid(P, 37), levels=0)
    assert pre.failures == 0
    shift = -np.log(1e-3) * np.array([a / 4, b / 4])   # u moves by n log(1/delta)
    assert np.allclose(pre.logr[pre.valid] - base.logr[base.valid], shift, atol=1e-6)
