"""Weighted sections, monomial densities and the toric moment map.

A section ``s = sum a_m x^m`` is evaluated after the tropical rescaling
``a_m -> delta^{w_m} a_m``. Densities are

    rho_m(x) = kappa_m^2 delta^{2 w_m} |x^m|^2 / sum_k (same),

computed by log-sum-exp. The metric weights ``kappa`` select the moment
map: ``section`` uses ``|a_m|``, ``unit`` uses 1, ``fubini_study`` uses the
square root of the multinomial coefficient (degree-d triangles only).
``log_kappa`` overrides all of them.

``temper`` raises every monomial norm to a power: the densities become
``rho_m ~ (kappa_m |x^m|)^(2 temper)``. This is again a toric moment map
(it is the plain one composed with ``|x| -> |x|^temper``), so images are
homeomorphic; values below 1 widen the thin layers near the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, log
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, InversionFailure, LemmaViolation
from .lattice import LatticePolygon, Point
from .subdivision import Subdivision, WeightFunction, convexity_gap

METRICS = ("section", "unit", "fubini_study")


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class LaurentSection:
    """Coefficients ``a_m`` over lattice points (zero coefficients dropped)."""

    coefficients: Mapping[Point, complex]
    unit_modulus: bool = False

    def __post_init__(self):
        coeffs = {(int(m[0]), int(m[1])): complex(a) for m, a in dict(self.coefficients).items() if a != 0}
        if not coeffs:
            raise InputError("a section needs at least one nonzero coefficient")
        if self.unit_modulus and any(abs(abs(a) - 1) > 1e-12 for a in coeffs.values()):
            raise InputError("unit-modulus flag set but some |a_m| != 1")
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(self.coefficients)

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.support, dtype=np.int64).reshape(-1, 2)

    @property
    def values(self) -> np.ndarray:
        return np.array(list(self.coefficients.values()), dtype=complex)

    def newton_polygon(self) -> LatticePolygon:
        return LatticePolygon.hull(self.support)

    def to_json(self) -> dict:
        return {
            "schema": "section/1",
            "terms": [{"point": list(m), "re": a.real, "im": a.imag} for m, a in self.coefficients.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentSection":
        try:
            return cls({tuple(t["point"]): complex(t.get("re", 0.0), t.get("im", 0.0)) for t in data["terms"]})
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad section JSON: {exc}") from exc


@dataclass(frozen=True)
class TorusPoint:
    logr: tuple[float, float]
    theta: tuple[float, float] = (0.0, 0.0)

    @property
    def x(self) -> np.ndarray:
        return np.exp(np.asarray(self.logr) + 1j * np.asarray(self.theta))


@dataclass(frozen=True)
class MomentParams:
    """Tropical scaling and metric choice.

    ``delta == 1`` means no rescaling (the weight is ignored). ``a_exponent``
    is the threshold exponent of the active set; ``None`` lets callers fill
    in the default half convexity gap.
    """

    delta: float = 1.0
    w: WeightFunction | None = None
    a_exponent: float | None = None
    metric: str = "section"
    log_kappa: Mapping[Point, float] | None = field(default=None, compare=False)
    temper: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise InputError("delta must lie in (0, 1]")
        if self.a_exponent is not None and not self.a_exponent > 0:
            raise InputError("a_exponent must be positive")
        if self.metric not in METRICS:
            raise InputError(f"metric must be one of {METRICS}")
        if not self.temper > 0:
            raise InputError("temper must be positive")


def _fs_log_kappa(m: Point, d: int) -> float:
    i, j = m
    k = d - i - j
    if min(i, j, k) < 0:
        raise InputError("Fubini-Study weights need a section on a degree-d triangle")
    return 0.5 * log(factorial(d) / (factorial(i) * factorial(j) * factorial(k)))


def triangle_degree(support: Iterable[Point]) -> int:
    return max(i + j for i, j in support)


# ---------------------------------------------------------------------------
# evaluation helpers

def tropical_log_coefficients(s: LaurentSection, p: MomentParams) -> np.ndarray:
    """``w_m log(delta)`` for each support point (zeros when delta = 1)."""
    if p.w is None or p.delta == 1.0:
        return np.zeros(len(s.support))
    ld = log(p.delta)
    return np.array([float(p.w[m]) * ld for m in s.support])


def log_metric_weights(s: LaurentSection, p: MomentParams) -> np.ndarray:
    """``log kappa_m + w_m log(delta)``: the per-point offset inside rho."""
    base = tropical_log_coefficients(s, p)
    if p.log_kappa is not None:
        lk = np.array([float(p.log_kappa[m]) for m in s.support])
    elif p.metric == "section":
        lk = np.log(np.abs(s.values))
    elif p.metric == "unit":
        lk = np.zeros(len(s.support))
    else:
        d = triangle_degree(s.support)
        lk = np.array([_fs_log_kappa(m, d) for m in s.support])
    return base + lk


def _as_logr(x) -> np.ndarray:
    if isinstance(x, TorusPoint):
        return np.asarray([x.logr], dtype=float)
    arr = np.asarray(x, dtype=float)
    return arr.reshape(-1, 2)


def _softmax2(E: np.ndarray, temper: float = 1.0) -> np.ndarray:
    E = (2.0 * temper) * E
    E = E - E.max(axis=1, keepdims=True)
    W = np.exp(E)
    return W / W.sum(axis=1, keepdims=True)


def rho_array(s: LaurentSection, p: MomentParams, logr, lw: np.ndarray | None = None) -> np.ndarray:
    """Densities for a batch of ``log r`` rows, shape (N, |support|)."""
    L = _as_logr(logr)
    lw = log_metric_weights(s, p) if lw is None else lw
    return _softmax2(L @ s.exponents.T.astype(float) + lw, p.temper)


def rho(s: LaurentSection, p: MomentParams, x: TorusPoint) -> dict[Point, float]:
    r = rho_array(s, p, x)[0]
    return dict(zip(s.support, r.tolist()))


def moment_array(s: LaurentSection, p: MomentParams, logr, lw: np.ndarray | None = None) -> np.ndarray:
    return rho_array(s, p, logr, lw) @ s.exponents.astype(float)


def moment(s: LaurentSection, p: MomentParams, x: TorusPoint) -> tuple[float, float]:
    v = moment_array(s, p, x)[0]
    return float(v[0]), float(v[1])


def localized_moment_array(s: LaurentSection, p: MomentParams, S: Sequence[Point], logr,
                           lw: np.ndarray | None = None) -> np.ndarray:
    """Moment map using only the monomials of ``S`` (a cell or any subset)."""
    S = {(int(m[0]), int(m[1])) for m in S}
    idx = [k for k, m in enumerate(s.support) if m in S]
    if not idx:
        raise InputError("localized moment needs a nonempty subset of the support")
    lw = log_metric_weights(s, p) if lw is None else lw
    L = _as_logr(logr)
    P = s.exponents[idx].astype(float)
    W = _softmax2(L @ P.T + lw[idx], p.temper)
    return W @ P


def localized_moment(s, p, S, x: TorusPoint) -> tuple[float, float]:
    v = localized_moment_array(s, p, S, x)[0]
    return float(v[0]), float(v[1])


def eval_section_scaled(s: LaurentSection, p: MomentParams, logr, theta) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(mantissa, log_scale)`` with value ``mantissa * exp(log_scale)``."""
    L = _as_logr(logr)
    T = np.asarray(theta, dtype=float).reshape(-1, 2)
    P = s.exponents.astype(float)
    a = s.values
    E = L @ P.T + tropical_log_coefficients(s, p) + np.log(np.abs(a))
    ph = T @ P.T + np.angle(a)
    scale = E.max(axis=1)
    mant = (np.exp(E - scale[:, None]) * np.exp(1j * ph)).sum(axis=1)
    return mant, scale


def eval_section(s: LaurentSection, p: MomentParams, x) -> complex | np.ndarray:
    """Value of the rescaled section at one TorusPoint or a batch (logr, theta)."""
    if isinstance(x, TorusPoint):
        m, sc = eval_section_scaled(s, p, [x.logr], [x.theta])
        return complex(m[0] * np.exp(sc[0]))
    logr, theta = x
    m, sc = eval_section_scaled(s, p, logr, theta)
    with np.errstate(over="ignore"):
        return m * np.exp(sc)


# ---------------------------------------------------------------------------
# active simplex

def default_a_exponent(Z: Subdivision, w: WeightFunction) -> float:
    """Half the convexity gap of ``w`` over ``Z``."""
    g = convexity_gap(Z, w)
    if g <= 0:
        raise InputError("weight is not strictly convex and generic for the subdivision")
    return 0.5 * float(g)


@dataclass
class ActiveReport:
    sets: list[frozenset]
    violations: list[dict]
    max_localized_deviation: float


def active_sets(s: LaurentSection, p: MomentParams, Z: Subdivision, logr) -> ActiveReport:
    """Active sets ``{m : rho_m > delta^a}`` for a batch and their validity.

    A set is valid when it is a vertex, edge or triangle of ``Z``. Also
    returns the largest ``|F^{S_x} - F|`` over the batch.
    """
    a = p.a_exponent if p.a_exponent is not None else default_a_exponent(Z, p.w)
    thr = p.delta ** a
    L = _as_logr(logr)
    lw = log_metric_weights(s, p)
    R = rho_array(s, p, L, lw)
    F = R @ s.exponents.astype(float)
    sup = s.support
    valid = {frozenset([m]) for m in Z.vertices}
    valid |= {frozenset(e) for e in Z.edges}
    valid |= {frozenset(t) for t in Z.triangles}
    mask = R > thr
    sets, viol = [], []
    dev = 0.0
    P = s.exponents.astype(float)
    keys, inv = np.unique(mask, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    for k, row in enumerate(keys):
        S = frozenset(sup[j] for j in np.flatnonzero(row))
        rows = np.flatnonzero(inv == k)
        if S not in valid:
            i = rows[0]
            viol.append({"logr": L[i].tolist(), "set": sorted(map(list, S)),
                         "rho": {str(m): float(R[i, j]) for j, m in enumerate(sup)}})
            continue
        idx = np.flatnonzero(row)
        W = R[rows][:, idx]
        FS = (W / W.sum(axis=1, keepdims=True)) @ P[idx]
        dev = max(dev, float(np.abs(FS - F[rows]).max()))
    for k in inv:
        sets.append(frozenset(sup[j] for j in np.flatnonzero(keys[k])))
    return ActiveReport(sets, viol, dev)


def active_simplex(s: LaurentSection, p: MomentParams, x: TorusPoint, Z: Subdivision) -> frozenset:
    rep = active_sets(s, p, Z, [x.logr])
    if rep.violations:
        raise LemmaViolation("active set is not a simplex of the subdivision", rep.violations[0])
    return rep.sets[0]


# ---------------------------------------------------------------------------
# inverse moment map

def _potential(u, P, lw, tg):
    E = 2.0 * (u @ P.T + lw)
    mx = E.max(axis=1)
    return 0.5 * (mx + np.log(np.exp(E - mx[:, None]).sum(axis=1))) - (u * tg).sum(axis=1)


def newton_invert(P: np.ndarray, lw: np.ndarray, targets: np.ndarray, u0: np.ndarray,
                  maxiter: int = 100, tol: float = 1e-12):
    """Solve ``F(u) = target`` by damped Newton on the convex potential.

    Returns ``(u, ok)``; ``ok`` marks rows whose residual fell below ``tol``.
    """
    P = np.asarray(P, dtype=float)
    u = np.array(u0, dtype=float, copy=True)
    act = np.arange(len(u))
    ok = np.zeros(len(u), dtype=bool)
    P0, P1 = P[:, 0], P[:, 1]
    for _ in range(maxiter):
        if act.size == 0:
            break
        uu, t = u[act], targets[act]
        W = _softmax2(uu @ P.T + lw)
        F = W @ P
        g = F - t
        conv = np.abs(g).max(axis=1) < tol
        ok[act[conv]] = True
        keep = ~conv
        act, uu, t, W, F, g = act[keep], uu[keep], t[keep], W[keep], F[keep], g[keep]
        if act.size == 0:
            break
        sxx = 2 * (W @ (P0 * P0) - F[:, 0] ** 2) + 1e-300
        syy = 2 * (W @ (P1 * P1) - F[:, 1] ** 2) + 1e-300
        sxy = 2 * (W @ (P0 * P1) - F[:, 0] * F[:, 1])
        det = sxx * syy - sxy * sxy
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            st = -np.stack([(syy * g[:, 0] - sxy * g[:, 1]) / det,
                            (sxx * g[:, 1] - sxy * g[:, 0]) / det], axis=1)
        bad = ~np.all(np.isfinite(st), axis=1)
        st[bad] = -g[bad]
        nrm = np.linalg.norm(st, axis=1)
        st *= np.minimum(1.0, 5.0 / np.maximum(nrm, 1e-300))[:, None]
        f0 = _potential(uu, P, lw, t)
        slope = (g * st).sum(axis=1)
        # a saturated softmax can give an indefinite Hessian; fall back to steepest descent
        up = ~(slope < 0)
        if up.any():
            st[up] = -g[up] * np.minimum(1.0, 5.0 / np.maximum(np.linalg.norm(g[up], axis=1), 1e-300))[:, None]
            slope[up] = (g[up] * st[up]).sum(axis=1)
        step = np.ones(len(uu))
        # below roundoff of the potential the Armijo test is noise; take the Newton step
        exact = ~up & (-slope <= 1e-13 * (1.0 + np.abs(f0)))
        for _ in range(40):
            trial = _potential(uu + step[:, None] * st, P, lw, t)
            bad = (trial > f0 + 1e-4 * step * slope + 1e-15 * np.abs(f0)) & ~exact
            if not bad.any():
                break
            step[bad] *= 0.5
        u[act] = uu + step[:, None] * st
    return u, ok


def invert_moment(s: LaurentSection, p: MomentParams, targets, starts: int = 4,
                  rng: np.random.Generator | None = None, tol: float = 1e-11) -> np.ndarray:
    """``log r`` with ``F(log r) = target`` for targets in the interior of the polygon.

    Multistart guards against stalls; raises ``InversionFailure`` when none
    of the starts converges.
    """
    T = np.asarray(targets, dtype=float).reshape(-1, 2)
    rng = rng if rng is not None else np.random.default_rng(0)
    P = s.exponents.astype(float)
    lw = p.temper * log_metric_weights(s, p)
    best = np.zeros_like(T)
    done = np.zeros(len(T), dtype=bool)
    for k in range(starts):
        u0 = np.zeros_like(T) if k == 0 else rng.normal(0, 3.0 * k, size=T.shape)
        todo = np.flatnonzero(~done)
        u, ok = newton_invert(P, lw, T[todo], u0[todo], tol=tol)
        best[todo[ok]] = u[ok] / p.temper
        done[todo[ok]] = True
        if done.all():
            break
    if not done.all():
        i = int(np.flatnonzero(~done)[0])
        raise InversionFailure(f"no torus radius maps to {T[i].tolist()}")
    return best
