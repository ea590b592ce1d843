from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from amoeba_spine.config import (ConvergeConfig, Cp2Config, LocalConfig, SamplingOptions, parse_floats,
                                 parse_point, parse_vertices, resolve_family)
from amoeba_spine.errors import InputError
from amoeba_spine.families import (EdgePolynomialSpec, FamilySpec, build_pd, build_qd, default_edge_roots,
                                   edge_moment, expected_holes, fermat, hexagon_polygon, hollow_strata,
                                   leg_positions, multinomial)
from amoeba_spine.lattice import standard_triangle


@pytest.mark.parametrize("d", range(1, 8))
def test_edge_roots_are_reciprocal_and_evenly_spaced(d):
    t = np.array(default_edge_roots(d))
    assert np.allclose(t * t[::-1], 1.0)
    assert np.allclose(np.sort(edge_moment(t)), (2 * np.arange(1, d + 1) - 1) / (2 * d))
    assert np.allclose(leg_positions(d), np.sort(edge_moment(t)))


def test_edge_polynomial_coefficients():
    e = EdgePolynomialSpec.from_roots([1.0, 2.0])
    assert e.coefficients == (1.0, 3.0, 2.0)  # z1^2 + 3 z1 z2 + 2 z2^2
    with pytest.raises(InputError):
        EdgePolynomialSpec.from_roots([-1.0])


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6])
def test_qd_support_is_the_boundary(d):
    s = build_qd(d)
    assert set(s.support) == set(standard_triangle(d).boundary)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6, 7])
def test_pd_strata_partition_the_triangle(d):
    strata = hollow_strata(d)
    flat = [m for S in strata for m in S]
    assert sorted(flat) == sorted(standard_triangle(d).points)
    assert len(flat) == len(set(flat))
    s = build_pd(d)
    assert set(s.support) == set(flat)


def test_pd_amplification_ladder():
    s = build_pd(FamilySpec(6, c_ratio=100.0))
    # the innermost point (2, 2) carries c_2 = 100^2 times q_0 = 1
    assert s.coefficients[(2, 2)] == pytest.approx(1e4)
    with pytest.raises(InputError):
        FamilySpec(6, c=(10.0, 5.0))
    with pytest.raises(InputError):
        FamilySpec(3, c_ratio=1.0)


def test_expected_holes_and_multinomial():
    assert [expected_holes(d) for d in range(1, 6)] == [0, 0, 1, 3, 6]
    assert multinomial(3, (1, 1)) == Fraction(6)
    assert sum(multinomial(4, m) for m in standard_triangle(4).points) == 3 ** 4


def test_fermat_and_hexagon():
    assert set(fermat(4).support) == {(0, 0), (4, 0), (0, 4)}
    P = hexagon_polygon()
    assert len(P.points) == 16 and len(P.interior) == 5


def test_resolve_family():
    f = resolve_family("cp2:3")
    assert f.weight is not None and f.params(1e-3).w is f.weight
    assert f.params().delta == 1.0
    assert resolve_family("pd:4").base_params.temper == 0.25
    assert resolve_family("hexagon").polygon == hexagon_polygon()
    for bad in ("cp2", "cp2:x", "cp2:0", "torus:2"):
        with pytest.raises(InputError):
            resolve_family(bad)


def test_parsers():
    assert parse_floats("0.3, 0.1,") == [0.3, 0.1]
    assert parse_point("0.2,0.4") == (0.2, 0.4)
    assert parse_vertices("0,0;2,0;0,2") == [(0, 0), (2, 0), (0, 2)]
    for fn, bad in ((parse_floats, ""), (parse_point, "1,2,3"), (parse_vertices, "0,0;1")):
        with pytest.raises(InputError):
            fn(bad)


def test_config_validation():
    assert SamplingOptions().amoeba().resolution == 600
    with pytest.raises(InputError):
        ConvergeConfig("cp2:3", (0.3, 1.0))
    with pytest.raises(InputError):
        LocalConfig("pw", eps=0)
    with pytest.raises(InputError):
        LocalConfig("zigzag")
    with pytest.raises(InputError):
        Cp2Config(3, delta=0)


@given(st.integers(1, 12))
def test_edge_roots_positive(d):
    t = default_edge_roots(d)
    assert len(t) == d and min(t) > 0
    assert list(t) == sorted(t)
