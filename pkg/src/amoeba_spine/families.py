"""Explicit curve families in CP^2 and on the blown-up hexagon.

``q_d`` puts the coefficients of ``prod_i (z1 + t_i z2)`` on each edge of
the degree-d triangle and nothing inside. The roots are placed so that the
edge moment map sends ``t_i`` to ``(2i-1)/(2d)``. ``p_d`` stacks shifted
copies ``c_k z^{kE} q_{d-3k}`` on the hollow triangles of the degree-d
triangle, with a ladder of amplification constants ``c_k``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, sqrt

import numpy as np

from .errors import InputError
from .lattice import LatticePolygon, Point, enumerate_points, standard_triangle
from .moment import LaurentSection, MomentParams
from .sampler import AmoebaConfig, HoleReport, amoeba_raster, count_holes
from .subdivision import WeightFunction, standard_weight

HEXAGON_VERTICES = ((1, 0), (4, 0), (4, 1), (2, 3), (0, 3), (0, 1))

# moment map used for the CP^2 experiments: |a_m| metric, norms tempered by 1/4
CP2_METRIC = "section"
CP2_TEMPER = 0.25


@dataclass(frozen=True)
class EdgePolynomialSpec:
    degree: int
    roots: tuple[float, ...]
    coefficients: tuple[float, ...]  # b_0..b_d of prod (z1 + t_i z2)

    def __post_init__(self):
        if self.degree < 1 or len(self.roots) != self.degree or len(self.coefficients) != self.degree + 1:
            raise InputError("edge polynomial needs d roots and d+1 coefficients")
        if any(t <= 0 for t in self.roots):
            raise InputError("edge roots must be positive")

    @classmethod
    def default(cls, d: int) -> "EdgePolynomialSpec":
        return cls.from_roots(default_edge_roots(d))

    @classmethod
    def from_roots(cls, roots) -> "EdgePolynomialSpec":
        roots = tuple(float(t) for t in roots)
        c = np.array([1.0])
        for t in roots:
            c = np.convolve(c, [1.0, t])
        return cls(len(roots), roots, tuple(float(x) for x in c))


def edge_moment(t):
    """Moment coordinate ``t^2 / (1 + t^2)`` of the root ``z1 = -t z2`` on an edge."""
    t = np.asarray(t, dtype=float)
    return t * t / (1.0 + t * t)


def default_edge_roots(d: int) -> tuple[float, ...]:
    """``t_i`` with edge moment ``(2i-1)/(2d)``; ``t_{d+1-i} = 1/t_i`` by construction."""
    if d < 1:
        raise InputError("degree must be at least 1")
    half = [sqrt((2 * i - 1) / (2 * d - (2 * i - 1))) for i in range(1, (d + 1) // 2 + 1)]
    out = [0.0] * d
    for i, t in enumerate(half):
        out[i] = t
        out[d - 1 - i] = 1.0 / t if d - 1 - i != i else 1.0
    return tuple(out)


def _edge_support(d: int, shift: int = 0) -> dict[Point, float]:
    """``b_i`` on the three edges of the degree-d triangle, shifted by ``shift*(1,1)``.

    In homogeneous terms the pattern is cyclic in ``(z1, z2, z3)``: the term
    ``z_a^{d-i} z_b^i`` gets ``b_i`` for ``(a, b)`` in ``(1,2), (2,3), (3,1)``.
    Chart exponents are the powers of ``z1, z2``.
    """
    b = EdgePolynomialSpec.default(d).coefficients
    out: dict[Point, float] = {}
    for a, c in ((0, 1), (1, 2), (2, 0)):
        for i in range(d + 1):
            e = [0, 0, 0]
            e[a] = d - i
            e[c] = i
            out[(e[0] + shift, e[1] + shift)] = b[i]
    return out


def build_qd(d: int) -> LaurentSection:
    return LaurentSection(_edge_support(d))


@dataclass(frozen=True)
class FamilySpec:
    degree: int
    c: tuple[float, ...] = ()   # c_1..c_{floor(d/3)}; empty = geometric ladder
    c_ratio: float = 1e3

    def __post_init__(self):
        if self.degree < 1:
            raise InputError("degree must be at least 1")
        if not self.c_ratio > 1:
            raise InputError("c-ratio must exceed 1")
        if self.c and len(self.c) != self.degree // 3:
            raise InputError("need one constant per hollow triangle")
        ladder = (1.0,) + tuple(self.constants[1:])
        if any(x <= 0 for x in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise InputError("amplification constants must be positive and increasing")

    @property
    def constants(self) -> tuple[float, ...]:
        """``(c_0, c_1, ...)`` with ``c_0 = 1``."""
        if self.c:
            return (1.0,) + tuple(self.c)
        return tuple(self.c_ratio ** k for k in range(self.degree // 3 + 1))


def build_pd(spec: FamilySpec | int) -> LaurentSection:
    """``sum_k c_k z^{kE} q_{d-3k}``; the innermost ``q_0`` is the single point ``kE``."""
    if isinstance(spec, int):
        spec = FamilySpec(spec)
    d = spec.degree
    coef: dict[Point, float] = {}
    for k, ck in enumerate(spec.constants):
        dd = d - 3 * k
        part = {(k, k): 1.0} if dd == 0 else _edge_support(dd, k)
        for m, v in part.items():
            coef[m] = coef.get(m, 0.0) + ck * v
    return LaurentSection(coef)


def hollow_strata(d: int) -> list[list[Point]]:
    """Lattice points of the degree-d triangle grouped by hollow triangle ``N^d_k``."""
    out = []
    for k in range(d // 3 + 1):
        dd = d - 3 * k
        if dd == 0:
            out.append([(k, k)])
        else:
            out.append(sorted(_edge_support(dd, k)))
    return out


def fermat(d: int) -> LaurentSection:
    """``z1^d + z2^d + z3^d`` in the chart."""
    if d < 1:
        raise InputError("degree must be at least 1")
    return LaurentSection({(0, 0): 1.0, (d, 0): 1.0, (0, d): 1.0})


def hexagon_polygon() -> LatticePolygon:
    return enumerate_points(HEXAGON_VERTICES)


def hexagon_section() -> tuple[LatticePolygon, WeightFunction, LaurentSection]:
    poly = hexagon_polygon()
    return poly, standard_weight(poly), LaurentSection({m: 1.0 for m in poly.points})


def standard_family(d: int) -> tuple[LatticePolygon, WeightFunction, LaurentSection]:
    """Unit coefficients on the degree-d triangle with the quadratic weight."""
    poly = standard_triangle(d)
    return poly, standard_weight(poly), LaurentSection({m: 1.0 for m in poly.points})


def cp2_params() -> MomentParams:
    return MomentParams(metric=CP2_METRIC, temper=CP2_TEMPER)


# ---------------------------------------------------------------------------
# experiments

def expected_holes(d: int) -> int:
    return (d - 1) * (d - 2) // 2


@dataclass
class Cp2Result:
    degree: int
    c_ratio: float
    report: HoleReport
    expected_holes: int
    runtime_s: float
    search: list[dict] = field(default_factory=list)   # doubling attempts, if any
    threshold: float | None = None                     # first ratio that worked

    @property
    def ok(self) -> bool:
        return (self.report.holes == self.expected_holes
                and all(v == self.degree for v in self.report.legs.values()))

    def to_json(self) -> dict:
        return {"schema": "cp2/1", "degree": self.degree, "c_ratio": self.c_ratio,
                "expected_holes": self.expected_holes, "ok": self.ok,
                "report": self.report.to_json(), "runtime_s": self.runtime_s,
                "search": self.search, "threshold": self.threshold}


def run_cp2(d: int, c_ratio: float = 1e3, cfg: AmoebaConfig = AmoebaConfig(),
            search: bool = True, section: LaurentSection | None = None,
            params: MomentParams | None = None) -> tuple[Cp2Result, object]:
    """Holes and legs of ``p_d`` (or of ``section``) on the degree-d triangle.

    When the hole count falls short and ``search`` is set, the c-ratio is
    doubled starting from 10 until it matches (up to 2^20 * 10).
    """
    t0 = time.perf_counter()
    poly = standard_triangle(d)
    p = params or cp2_params()

    def once(ratio):
        s = section if section is not None else build_pd(FamilySpec(d, c_ratio=ratio))
        r = amoeba_raster(s, p, cfg, poly)
        return count_holes(r), r

    rep, r = once(c_ratio)
    res = Cp2Result(d, c_ratio, rep, expected_holes(d), 0.0)
    if search and section is None and rep.holes < res.expected_holes and d >= 3:
        ratio = 10.0
        for _ in range(21):
            rep2, r2 = once(ratio)
            res.search.append({"c_ratio": ratio, "holes": rep2.holes})
            if rep2.holes == res.expected_holes:
                res.threshold, res.report, res.c_ratio, r = ratio, rep2, ratio, r2
                break
            ratio *= 2
    res.runtime_s = time.perf_counter() - t0
    return res, r


def leg_positions(d: int) -> np.ndarray:
    """Edge moment coordinates of the ``q_d`` roots (sorted)."""
    return np.sort(edge_moment(np.array(default_edge_roots(d))))


def multinomial(d: int, m: Point) -> Fraction:
    i, j = m
    return Fraction(factorial(d), factorial(i) * factorial(j) * factorial(d - i - j))
