import numpy as np
import pytest
from hypothesis import given, strategies as st

from amoeba_spine.errors import InputError, RegionMismatch
from amoeba_spine.local_models import (CutoffProfile, IsotopyMap, ProfileKind, base_region_grid, certify_bounds,
                                       cutoff_image_check, deviation_scaling, line_map, numeric_pullback_ratio,
                                       piecewise_ratio, pullback_ratio, smoothed_ratio_terms,
                                       unperturbed_y_distance, y_image_check)

from frozen import LINE_AMOEBA_TO_Y
from oracles import line_amoeba_to_y

PW = CutoffProfile(ProfileKind.PIECEWISE_MAX)
base_pts = st.tuples(st.floats(0.501, 0.999), st.floats(-0.999, 0.999))


def to_x1(rho_frac):
    rho, frac = rho_frac
    phi = frac * np.arccos(1 / (2 * rho))
    return -1.0 + rho * np.exp(1j * phi)


@pytest.mark.parametrize("kind", list(ProfileKind))
def test_profile_constraints(kind):
    c = CutoffProfile(kind, 0.05).check()
    assert c["h_symmetry"] < 1e-12 and c["h_below"] < 1e-12 and c["h_monotone"]
    assert c["lambda_fd"] < 1e-5
    assert c["b_monotone"] and c["b_zero_below"] < 1e-12 and c["b_one_above"] < 1e-12
    assert c["b_slope_times_sqrt_eps"] <= 15 / 8 + 1e-9
    assert c["gamma_low"] < 1e-12 and c["gamma_high"] < 1e-12


def test_profile_validation():
    with pytest.raises(InputError):
        CutoffProfile(ProfileKind.GAMMA_EPS, 0.1, A1=2.0, A2=1.5)
    with pytest.raises(InputError):
        CutoffProfile("pw", eps=-1)
    with pytest.raises(InputError):
        IsotopyMap(PW, 1.5)


def test_region_mismatch():
    with pytest.raises(RegionMismatch):
        pullback_ratio(IsotopyMap(PW, 1.0), (np.array([-3.0 + 0j]), np.array([2.0 + 0j])))


def test_t0_is_identity_and_fs_ratio_one():
    x1 = base_region_grid(20)
    X1, X2 = IsotopyMap(PW, 0.0).apply(x1, -1 - x1)
    assert np.array_equal(X1, x1)
    assert np.allclose(piecewise_ratio(0.0, x1, -1 - x1, "fs"), 1.0)


@given(base_pts, st.floats(0, 1))
def test_piecewise_closed_form_matches_numeric(pt, t):
    x1 = np.array([to_x1(pt)])
    r1, r2 = abs(x1[0]), abs(-1 - x1[0])
    if min(abs(r1 - r2), abs(1 - r2)) < 1e-4:
        return  # finite-difference stencil would straddle a kink
    closed = piecewise_ratio(t, x1, -1 - x1)
    num = numeric_pullback_ratio(line_map(IsotopyMap(PW, t)), x1)
    assert np.allclose(closed, num, rtol=1e-6)
    assert closed[0] >= 1 / 6 - 1e-9


@given(base_pts, st.floats(0, 1), st.sampled_from([0.05, 0.1, 0.2]))
def test_smoothed_decomposition_is_exact(pt, t, eps):
    x1 = np.array([to_x1(pt)])
    T = smoothed_ratio_terms(CutoffProfile(ProfileKind.SMOOTHED_H, eps), t, x1, -1 - x1)
    assert np.allclose(T.total, T.omega_tilde + t * T.remainder_exact, rtol=1e-12, atol=1e-14)
    assert T.total[0] > 0


def test_smoothed_closed_form_matches_numeric():
    prof = CutoffProfile(ProfileKind.SMOOTHED_H, 0.1)
    x1 = base_region_grid(30)
    for t in (0.3, 1.0):
        m = IsotopyMap(prof, t)
        assert np.allclose(pullback_ratio(m, (x1, -1 - x1)), numeric_pullback_ratio(line_map(m), x1),
                           rtol=1e-5, atol=1e-8)


def test_y_image_at_endpoints():
    assert y_image_check(IsotopyMap(PW, 1.0)) <= 1e-9
    d0 = y_image_check(IsotopyMap(PW, 0.0))
    assert d0 == pytest.approx(LINE_AMOEBA_TO_Y, abs=2e-3)


def test_line_amoeba_distance_oracle():
    assert unperturbed_y_distance() == pytest.approx(line_amoeba_to_y(), abs=1e-4)
    assert line_amoeba_to_y() == pytest.approx(LINE_AMOEBA_TO_Y, abs=1e-4)


def test_small_certificate():
    rep = certify_bounds(PW, t_steps=4, grid=40)
    assert rep.min_ratio_dx >= 1 / 6 - 1e-9
    assert rep.min_ratio_fs >= 0.5 - 1e-9
    assert rep.fd_max_error < 1e-6
    assert len(rep.region_minima) == 4 * (2 + 5)


@pytest.mark.parametrize("kind,expo", [(ProfileKind.SMOOTHED_H, 1.0), (ProfileKind.OPTIMAL_B, 0.5)])
def test_scaling_small(kind, expo):
    sc = deviation_scaling(kind, (0.2, 0.1, 0.05), t_steps=3, grid=40)
    assert sc.exponent == expo
    assert all(0.3 <= q <= 3 for q in sc.halving_ratios)


def test_scaling_needs_smoothed_kind():
    with pytest.raises(InputError):
        deviation_scaling("pw")


def test_cutoff_image_small():
    rep = cutoff_image_check(CutoffProfile(ProfileKind.GAMMA_EPS, 0.05), n=60)
    assert rep.outside_max_deviation < 1e-9
    assert rep.saturated_root_error < 1e-12
    assert rep.saturated_roots > 0
