"""Topology of the curve over a single point of the moment polygon.

For the unperturbed curve the fiber over an interior point ``r`` is the
zero set of ``s`` on the torus ``|x| = R`` with ``F(log R) = r``. For a
perturbed line ``C_t = F_t(C_0)`` the fiber is ``{x in C_0 : F(F_t(x)) = r}``;
``C_0`` is parametrized by the two angles of its points, solving
``r1 e^{i th1} + r2 e^{i th2} = -1`` for positive radii.

A grid cell is marked when the residual there is no larger than its jump to
some neighbour, i.e. the zero set passes within a cell. Components use
8-connectivity on the periodic grid; the first Betti number of each
component comes from the Euler characteristic of its closed cells.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .errors import InputError, InversionFailure
from .lattice import LatticePolygon, cross, normal_fan
from .local_models import IsotopyMap, line_moment
from .moment import LaurentSection, MomentParams, eval_section_scaled, invert_moment, log_metric_weights
from .roots import polyroots
from .subdivision import Subdivision

BOUNDARY_TOL = 1e-9


class FiberKind(enum.Enum):
    POINTS = "Points"
    CIRCLES = "Circles"
    THETA = "ThetaGraph"
    OTHER = "Other"


@dataclass
class FiberReport:
    components: int
    betti1: int
    kind: FiberKind
    component_betti: list[int]
    cells: int

    def to_json(self) -> dict:
        return {"schema": "fiber/1", "components": self.components, "betti1": self.betti1,
                "kind": self.kind.value, "component_betti": self.component_betti, "cells": self.cells}


def classify_fiber(component_betti: list[int]) -> FiberKind:
    C, b = len(component_betti), sum(component_betti)
    if b == 0:
        return FiberKind.POINTS
    if all(x == 1 for x in component_betti):
        return FiberKind.CIRCLES
    if (C, b) == (1, 2):
        return FiberKind.THETA
    return FiberKind.OTHER


# ---------------------------------------------------------------------------
# periodic cubical complexes

def periodic_label(mask: np.ndarray, periodic: tuple[bool, bool] = (True, True)) -> tuple[np.ndarray, int]:
    """8-connected labels on a grid with optional wrap-around per axis (1..n, 0 = background)."""
    lab, n = ndimage.label(mask, np.ones((3, 3), dtype=bool))
    if n == 0:
        return lab, 0
    parent = np.arange(n + 1)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    H, W = mask.shape
    for d in (-1, 0, 1):
        if periodic[0]:
            for j in range(W):
                jj = j + d
                if periodic[1] or 0 <= jj < W:
                    union(lab[H - 1, j], lab[0, jj % W])
        if periodic[1]:
            for i in range(H):
                ii = i + d
                if periodic[0] or 0 <= ii < H:
                    union(lab[i, W - 1], lab[ii % H, 0])
    roots = np.array([find(a) for a in range(n + 1)])
    uniq = np.unique(roots[1:])
    remap = np.zeros(n + 1, dtype=np.int64)
    remap[uniq] = np.arange(1, uniq.size + 1)
    return remap[roots][lab], int(uniq.size)


def component_betti(mask: np.ndarray, periodic: tuple[bool, bool] = (True, True)) -> list[int]:
    """``b1`` of every component of the union of closed marked cells.

    Axes flagged periodic wrap around; the others get one extra row of
    vertices so corner and edge keys stay distinct.
    """
    lab, n = periodic_label(mask, periodic)
    if n == 0:
        return []
    H0, W0 = mask.shape
    H, W = H0 + (not periodic[0]), W0 + (not periodic[1])
    i, j = np.nonzero(mask)
    L = lab[i, j]

    ip, jp = (i + 1) % H, (j + 1) % W
    verts = np.concatenate([i * W + j, ip * W + j, i * W + jp, ip * W + jp])
    Lv = np.tile(L, 4)
    V = np.bincount(np.unique(Lv.astype(np.int64) * (H * W) + verts) // (H * W), minlength=n + 1)
    # edges: 0 = along i from (i, j), 1 = along j from (i, j)
    ek = np.concatenate([2 * (i * W + j), 2 * (i * W + jp), 2 * (i * W + j) + 1, 2 * (ip * W + j) + 1])
    Le = np.tile(L, 4)
    E = np.bincount(np.unique(Le.astype(np.int64) * (2 * H * W) + ek) // (2 * H * W), minlength=n + 1)
    F = np.bincount(L, minlength=n + 1)
    out = []
    for k in range(1, n + 1):
        chi = int(V[k]) - int(E[k]) + int(F[k])
        b2 = 1 if (all(periodic) and F[k] == H * W) else 0
        out.append(1 - chi + b2)
    return out


def zero_set_mask(G: np.ndarray) -> np.ndarray:
    """Cells whose residual is at most the largest jump to a neighbour.

    ``G`` has shape (H, W) or (H, W, k); NaN marks cells off the curve.
    """
    if G.ndim == 2:
        G = G[..., None]
    nrm = np.linalg.norm(G, axis=2)
    jump = np.zeros(nrm.shape)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            nb = np.roll(np.roll(G, di, axis=0), dj, axis=1)
            dlt = np.linalg.norm(G - nb, axis=2)
            jump = np.fmax(jump, dlt)
    return np.isfinite(nrm) & (nrm <= jump)


def _report(mask: np.ndarray, periodic=(True, True)) -> FiberReport:
    cb = component_betti(mask, periodic)
    return FiberReport(len(cb), int(sum(cb)), classify_fiber(cb), cb, int(mask.sum()))


# ---------------------------------------------------------------------------
# boundary fibers

def _on_edge(polygon: LatticePolygon, r) -> int | None:
    for k, ray in enumerate(normal_fan(polygon).rays):
        if abs(r[0] * ray.e[0] + r[1] * ray.e[1] + ray.l) <= BOUNDARY_TOL * np.hypot(*ray.e):
            return k
    return None


def boundary_fiber(s: LaurentSection, p: MomentParams, polygon: LatticePolygon, edge: int, r,
                   tol: float = 1e-6) -> FiberReport:
    """Points of the curve on the toric divisor of ``edge`` over ``r``.

    The restriction of ``s`` to the divisor is the polynomial of the edge
    terms in the edge coordinate; its roots are kept whose edge moment value
    equals the position of ``r`` along the edge.
    """
    pts = polygon.points_on_edge(edge)
    coef = s.coefficients
    lw_all = dict(zip(s.support, log_metric_weights(s, p)))
    c = np.array([coef.get(m, 0.0) for m in pts], dtype=complex)
    a, b = np.array(pts[0], float), np.array(pts[-1], float)
    L = len(pts) - 1
    pos = float(np.dot(np.asarray(r, float) - a, b - a) / np.dot(b - a, b - a)) * L
    nz = np.flatnonzero(c)
    if nz.size < 2:
        return FiberReport(0, 0, FiberKind.POINTS, [], 0)
    lo, hi = nz.min(), nz.max()
    res = polyroots(c[lo:hi + 1][None, :])
    lk = np.array([lw_all.get(m, 0.0) for m in pts])
    insup = np.array([m in lw_all for m in pts])
    hits = 0
    for z in res.roots[0]:
        e = 2 * p.temper * (lk + np.arange(L + 1) * np.log(abs(z)))
        e = np.where(insup, e, -np.inf)
        e = e - e.max()
        w = np.exp(e)
        if abs(float((w * np.arange(L + 1)).sum() / w.sum()) - pos) <= tol * max(L, 1):
            hits += 1
    return FiberReport(hits, 0, FiberKind.POINTS, [0] * hits, hits)


# ---------------------------------------------------------------------------
# interior fibers

def torus_fiber(s: LaurentSection, p: MomentParams, r, angle_grid: int = 200,
                rng: np.random.Generator | None = None) -> FiberReport:
    """Zero set of ``s`` on the moment fiber over an interior point ``r``."""
    u = invert_moment(s, p, [r], rng=rng)[0]
    th = 2 * np.pi * np.arange(angle_grid) / angle_grid
    T1, T2 = np.meshgrid(th, th, indexing="ij")
    T = np.stack([T1.ravel(), T2.ravel()], axis=1)
    L = np.broadcast_to(u, T.shape)
    m, _ = eval_section_scaled(s, p, L, T)
    G = np.stack([m.real, m.imag], axis=1).reshape(angle_grid, angle_grid, 2)
    return _report(zero_set_mask(G))


def line_cylinder_chart(angle_grid: int, log_extent: float = 8.0):
    """Points ``(z, -1 - z)`` of the line on a (log |z|, arg z) grid.

    The line minus ``z = 0, infinity`` is this cylinder; its third puncture
    ``z = -1`` is avoided by the half-cell offset of the angles.
    """
    rho = np.linspace(-log_extent, log_extent, angle_grid)
    th = 2 * np.pi * (np.arange(angle_grid) + 0.5) / angle_grid
    R, T = np.meshgrid(rho, th, indexing="ij")
    z = np.exp(R + 1j * T)
    return z, -1.0 - z


def y_legs() -> np.ndarray:
    from .local_models import y_segments
    return y_segments()


def y_position(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest leg index and arclength fraction from the vertex, per point."""
    segs = y_legs()
    best = np.full(F.shape[0], np.inf)
    leg = np.zeros(F.shape[0], dtype=np.int64)
    frac = np.zeros(F.shape[0])
    for k, (a, b) in enumerate(segs):
        d = b - a
        t = np.clip(((F - a) @ d) / (d @ d), 0.0, 1.0)
        dist = np.linalg.norm(F - (a + t[:, None] * d), axis=1)
        better = dist < best
        best = np.where(better, dist, best)
        leg = np.where(better, k, leg)
        frac = np.where(better, t, frac)
    return leg, frac


def y_side_labels(F: np.ndarray, r) -> np.ndarray:
    """Component of ``Y minus {r}`` that the nearest Y point of each image lies in."""
    leg, frac = y_position(F)
    lr, fr = y_position(np.asarray(r, float)[None, :])
    if fr[0] <= 1e-12:
        return leg
    return ((leg == lr[0]) & (frac > fr[0])).astype(np.int64)


def interface_mask(labels: np.ndarray, periodic=(False, True)) -> np.ndarray:
    """Cells that differ in label from a 4-neighbour (both cells marked)."""
    out = np.zeros(labels.shape, dtype=bool)
    for ax in (0, 1):
        nb = np.roll(labels, -1, axis=ax)
        diff = labels != nb
        if not periodic[ax]:
            idx = [slice(None)] * 2
            idx[ax] = -1
            diff[tuple(idx)] = False
        out |= diff
        out |= np.roll(diff, 1, axis=ax)
    return out


def line_model_fiber(model: IsotopyMap, r, angle_grid: int = 200) -> FiberReport:
    """Fiber of ``F o F_t`` on the line over a point ``r`` of the Y graph.

    The image of the perturbed line lies on the Y graph (exactly for the
    piecewise-max map at ``t = 1``), so the fiber over ``r`` separates the
    preimages of the components of ``Y minus {r}``.
    """
    r = np.asarray(r, dtype=float)
    if min(r[0], r[1], 1 - r[0] - r[1]) <= BOUNDARY_TOL:
        unit = LatticePolygon.from_vertices([(0, 0), (1, 0), (0, 1)])
        s = LaurentSection({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0})
        k = _on_edge(unit, r)
        return boundary_fiber(s, MomentParams(metric="unit"), unit, k, r)
    x1, x2 = line_cylinder_chart(angle_grid)
    y1, y2 = model.apply(x1.ravel(), x2.ravel())
    F = line_moment(y1, y2)
    lab = y_side_labels(F, r).reshape(angle_grid, angle_grid)
    return _report(interface_mask(lab), periodic=(False, True))


def _local_position(Z: Subdivision, r) -> tuple[tuple, np.ndarray]:
    """A triangle of ``Z`` containing ``r`` and the barycentric ``(l1, l2)`` there."""
    rq = (Fraction(r[0]).limit_denominator(10 ** 9), Fraction(r[1]).limit_denominator(10 ** 9))
    for t in Z.triangles:
        a, b, c = t
        if cross(a, b, c) < 0:
            b, c = c, b
        if cross(a, b, rq) >= 0 and cross(b, c, rq) >= 0 and cross(c, a, rq) >= 0:
            M = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]], dtype=float)
            lam = np.linalg.solve(M, np.asarray(r, float) - np.array(a, float))
            return (a, b, c), lam
    raise InputError("point lies outside the subdivision")


def fiber_topology(s: LaurentSection, p: MomentParams, r, angle_grid: int = 200,
                   model: IsotopyMap | None = None, Z: Subdivision | None = None,
                   polygon: LatticePolygon | None = None) -> FiberReport:
    """Fiber over ``r``.

    * on the polygon boundary: points of the curve on that toric divisor;
    * without ``model``: zero set of ``s`` on the torus over ``r``;
    * with ``model`` and no ``Z``: the perturbed line in the unit simplex;
    * with ``model`` and ``Z``: ``r`` is moved to the unit simplex by the
      affine map of its triangle and the perturbed line is used there. A
      point on an interior edge of ``Z`` is moved a short way into the cell
      along its leg, where the fiber type is the same.
    """
    if angle_grid < 8:
        raise InputError("angle grid must be at least 8")
    polygon = polygon or (Z.polygon if Z is not None else s.newton_polygon())
    k = _on_edge(polygon, r)
    if k is not None:
        return boundary_fiber(s, p, polygon, k, r)
    if model is None:
        return torus_fiber(s, p, r, angle_grid)
    if Z is None:
        return line_model_fiber(model, r, angle_grid)
    _, lam = _local_position(Z, r)
    l0 = 1 - lam.sum()
    if min(l0, lam[0], lam[1]) <= BOUNDARY_TOL:
        # interior edge midpoint: step towards the barycenter
        lam = lam + 1e-3 * (np.array([1 / 3, 1 / 3]) - lam)
    return line_model_fiber(model, lam, angle_grid)


# ---------------------------------------------------------------------------
# cutoff sections

@dataclass
class CutoffSection:
    """Position-dependent coefficients ``gamma(rho_m) s_m`` and the check version."""

    section: LaurentSection
    params: MomentParams
    eps: float
    eps_check: float
    neighbourhoods: dict
    A1: float = 1.5
    A2: float = 2.5

    def _gamma(self, u, eps):
        from .local_models import CutoffProfile, ProfileKind
        return CutoffProfile(ProfileKind.GAMMA_EPS, eps, self.A1, self.A2).gamma(u)

    def hat_factors(self, logr) -> np.ndarray:
        from .moment import rho_array
        return self._gamma(rho_array(self.section, self.params, logr), self.eps)

    def check_factors(self, logr) -> np.ndarray:
        from .moment import rho_array
        R = rho_array(self.section, self.params, logr)
        sup = self.section.support
        out = np.empty_like(R)
        for j, m in enumerate(sup):
            far = [k for k, q in enumerate(sup) if q not in self.neighbourhoods[m]]
            mx = R[:, far].max(axis=1) if far else np.zeros(R.shape[0])
            out[:, j] = 1.0 - self._gamma(mx, self.eps_check)
        return out

    def _eval(self, factors, logr, theta):
        L = np.asarray(logr, float).reshape(-1, 2)
        T = np.asarray(theta, float).reshape(-1, 2)
        P = self.section.exponents.astype(float)
        from .moment import tropical_log_coefficients
        la = np.log(np.abs(self.section.values)) + tropical_log_coefficients(self.section, self.params)
        E = L @ P.T + la
        with np.errstate(over="ignore"):
            terms = np.exp(E) * np.exp(1j * (T @ P.T + np.angle(self.section.values)))
        return (factors * terms).sum(axis=1)

    def hat(self, logr, theta):
        return self._eval(self.hat_factors(logr), logr, theta)

    def check(self, logr, theta):
        return self._eval(self.check_factors(logr), logr, theta)


def cutoff_section(s: LaurentSection, p: MomentParams, Z: Subdivision, eps: float,
                   eps_check: float | None = None) -> CutoffSection:
    """Evaluators for the two cutoff sections attached to ``s`` and ``Z``.

    ``Delta_m`` is ``m`` together with its neighbours along 1-cells of ``Z``.
    """
    eps_check = eps if eps_check is None else eps_check
    if not (0 < eps_check <= eps):
        raise InputError("need 0 < eps_check <= eps")
    if p.w is not None and p.delta < 1:
        from .moment import default_a_exponent
        a = p.a_exponent if p.a_exponent is not None else default_a_exponent(Z, p.w)
        if p.delta ** a > eps_check:
            raise InputError("need delta^a <= eps_check")
    nb = {m: frozenset([m, *Z.neighbours(m)]) for m in s.support}
    return CutoffSection(s, p, eps, eps_check, nb)
