"""Local models for the line ``x1 + x2 + 1 = 0`` in the standard chart of CP^2.

Three families of radial maps deform the line so that its moment image
becomes the "Y" graph: the piecewise-max map, its h-smoothed version and a
version with a square-root collar b. A fourth model cuts the coefficients
of the line off with a profile gamma and leaves the map alone.

Pullback ratios compare the pulled-back Fubini-Study form on the line with
``dx1 ^ dxbar1`` (normalization "dx") or with the unperturbed restriction
``omega_FS|_C0`` (normalization "fs"). Closed forms are used where they
exist; a finite-difference Jacobian pullback serves as the independent
reference everywhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import BoundViolation, InputError, RegionMismatch

LOCAL_POLYGON_POINTS = 3  # |Delta| for the unit simplex


class ProfileKind(enum.Enum):
    PIECEWISE_MAX = "PiecewiseMax"
    SMOOTHED_H = "SmoothedH"
    OPTIMAL_B = "OptimalB"
    GAMMA_EPS = "GammaEps"

    @classmethod
    def parse(cls, name: str) -> "ProfileKind":
        aliases = {"pw": cls.PIECEWISE_MAX, "smooth": cls.SMOOTHED_H,
                   "optimal": cls.OPTIMAL_B, "cutoff": cls.GAMMA_EPS}
        if name in aliases:
            return aliases[name]
        try:
            return cls(name)
        except ValueError as exc:
            raise InputError(f"unknown model {name!r}") from exc


# ---------------------------------------------------------------------------
# scalar building blocks

def smoothstep(v):
    """C^2 step: 0 for v <= 0, 1 for v >= 1, ``6v^5 - 15v^4 + 10v^3`` between."""
    v = np.clip(v, 0.0, 1.0)
    return v * v * v * (v * (6.0 * v - 15.0) + 10.0)


def smoothstep_prime(v):
    inside = (v > 0) & (v < 1)
    v = np.clip(v, 0.0, 1.0)
    return np.where(inside, 30.0 * v * v * (1.0 - v) ** 2, 0.0)


SMOOTHSTEP_SUP_SLOPE = 15.0 / 8.0


def odd_step(u):
    """``H(u) = (1 + u q(u))/2`` with ``u q(u) = (15u - 10u^3 + 3u^5)/8`` on [-1, 1].

    ``u q(u)`` is odd, so ``H(u) + H(-u) = 1``; ``H`` is C^2 at ``u = +-1``.
    """
    u = np.clip(u, -1.0, 1.0)
    return 0.5 + u * (15.0 - u * u * (10.0 - 3.0 * u * u)) / 16.0


def odd_step_prime(u):
    inside = np.abs(u) < 1
    u = np.clip(u, -1.0, 1.0)
    return np.where(inside, 15.0 * (1.0 - u * u) ** 2 / 16.0, 0.0)


@dataclass(frozen=True)
class CutoffProfile:
    """A concrete choice of the functions h, b and gamma for one model."""

    kind: ProfileKind
    eps: float = 0.1
    A1: float = 1.5
    A2: float = 2.5

    def __post_init__(self):
        if not isinstance(self.kind, ProfileKind):
            object.__setattr__(self, "kind", ProfileKind.parse(self.kind))
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if self.kind is ProfileKind.GAMMA_EPS and not (1.0 < self.A1 < self.A2 < LOCAL_POLYGON_POINTS):
            raise InputError("gamma profile needs 1 < A1 < A2 < |Delta| = 3")

    # h and lambda = d(a h)/da
    def h(self, a):
        return odd_step(np.asarray(a, dtype=float) / self.eps)

    def h_prime(self, a):
        return odd_step_prime(np.asarray(a, dtype=float) / self.eps) / self.eps

    def lam(self, a):
        a = np.asarray(a, dtype=float)
        return self.h(a) + self.h_prime(a) * a

    # collar b
    def b(self, a):
        return smoothstep(np.asarray(a, dtype=float) / np.sqrt(self.eps))

    def b_prime(self, a):
        return smoothstep_prime(np.asarray(a, dtype=float) / np.sqrt(self.eps)) / np.sqrt(self.eps)

    @property
    def b_slope_constant(self) -> float:
        """``C`` in ``|b'| <= C / sqrt(eps)``."""
        return SMOOTHSTEP_SUP_SLOPE

    # cutoff gamma(u), u a squared modulus
    def gamma(self, u):
        s = np.sqrt(np.maximum(np.asarray(u, dtype=float), 0.0))
        return smoothstep((s - self.A1 * self.eps) / ((self.A2 - self.A1) * self.eps))

    def gamma_prime(self, u):
        u = np.maximum(np.asarray(u, dtype=float), 1e-300)
        s = np.sqrt(u)
        w = (self.A2 - self.A1) * self.eps
        return smoothstep_prime((s - self.A1 * self.eps) / w) / w / (2.0 * s)

    def check(self, samples: int = 1000) -> dict:
        """Numerical check of the functional constraints; returns measured maxima."""
        out: dict = {"kind": self.kind.value, "eps": self.eps}
        a = np.linspace(-3 * self.eps, 3 * self.eps, samples)
        out["h_symmetry"] = float(np.abs(self.h(a) + self.h(-a) - 1.0).max())
        out["h_below"] = float(np.abs(self.h(a[a <= -self.eps])).max(initial=0.0))
        out["h_monotone"] = bool(np.all(np.diff(self.h(a)) >= -1e-15))
        step = 1e-6 * self.eps
        fd = ((a + step) * self.h(a + step) - (a - step) * self.h(a - step)) / (2 * step)
        out["lambda_fd"] = float(np.abs(fd - self.lam(a)).max())
        s = np.sqrt(self.eps)
        ab = np.linspace(-s, 2 * s, samples)
        bv = self.b(ab)
        out["b_monotone"] = bool(np.all(np.diff(bv) >= -1e-15))
        out["b_zero_below"] = float(np.abs(bv[ab <= 0]).max(initial=0.0))
        out["b_one_above"] = float(np.abs(bv[ab >= s] - 1).max(initial=0.0))
        out["b_slope_times_sqrt_eps"] = float(np.abs(self.b_prime(ab)).max() * s)
        r = np.linspace(0, 3 * self.A2 * self.eps, samples)
        g = self.gamma(r * r)
        out["gamma_low"] = float(np.abs(g[r <= self.A1 * self.eps]).max(initial=0.0))
        out["gamma_high"] = float(np.abs(g[r >= self.A2 * self.eps] - 1).max(initial=0.0))
        return out


# ---------------------------------------------------------------------------
# radial maps

def _lmax(a, b):
    return np.maximum(a, b)


def _a_h_over(profile: CutoffProfile, a, b):
    """``a * h(a / b)`` with the ``b -> 0`` limit ``max(a, 0)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    safe = b > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = a * profile.h(np.where(safe, a / np.where(safe, b, 1.0), 0.0))
    return np.where(safe, val, np.maximum(a, 0.0))


@dataclass(frozen=True)
class IsotopyMap:
    """``x -> ((eta1/eta0)^t x1, (eta2/eta0)^t x2)`` for the profile's etas.

    For the gamma model the map is the piecewise-max one; the cutoff is a
    property of the curve, see ``cutoff_line``.
    """

    profile: CutoffProfile
    t: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0):
            raise InputError("t must lie in [0, 1]")

    def log_etas(self, r1, r2):
        """``(log eta0, log eta1, log eta2)`` as arrays."""
        l1, l2 = np.log(r1), np.log(r2)
        kind = self.profile.kind
        if kind in (ProfileKind.PIECEWISE_MAX, ProfileKind.GAMMA_EPS):
            return _lmax(l1, l2), np.maximum(l2, 0.0), np.maximum(l1, 0.0)
        h = self.profile.h
        if kind is ProfileKind.SMOOTHED_H:
            le2 = l1 * h(l1)
            le1 = l2 * h(l2)
            le0 = l1 + (l2 - l1) * h(l2 - l1)
            return le0, le1, le2
        b = self.profile.b
        b1 = b(l1 - 2 * l2)
        b2 = b(l2 - 2 * l1)
        b0 = b(l1 + l2)
        le2 = _a_h_over(self.profile, l1, b1)
        le1 = _a_h_over(self.profile, l2, b2)
        # log r1 h((l1-l2)/b0) + log r2 h((l2-l1)/b0), written through a h(a/b)
        # so that b0 -> 0 gives log max(r1, r2)
        safe = b0 > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(safe, (l1 - l2) / np.where(safe, b0, 1.0), 0.0)
        le0_s = l1 * h(q) + l2 * h(-q)
        le0 = np.where(safe, le0_s, _lmax(l1, l2))
        return le0, le1, le2

    def apply(self, x1, x2):
        x1 = np.asarray(x1, dtype=complex)
        x2 = np.asarray(x2, dtype=complex)
        if self.t == 0.0:
            return x1.copy(), x2.copy()
        le0, le1, le2 = self.log_etas(np.abs(x1), np.abs(x2))
        return x1 * np.exp(self.t * (le1 - le0)), x2 * np.exp(self.t * (le2 - le0))


def apply_isotopy(m: IsotopyMap, x) -> tuple[complex, complex]:
    X1, X2 = m.apply(x[0], x[1])
    return complex(X1), complex(X2)


# ---------------------------------------------------------------------------
# pullback ratios

def fs_form(X, U, V):
    """Fubini-Study form (unnormalized, as a complex number) on tangent vectors.

    ``X, U, V`` are complex arrays of shape (..., 2). The value of
    ``dx^dxbar`` on ``(U, V)`` is ``U Vbar - V Ubar``.
    """
    def wedge(a, b):
        return a * np.conj(b) - b * np.conj(a)

    q = 1.0 + (np.abs(X) ** 2).sum(axis=-1)
    alpha_u = X[..., 1] * U[..., 0] - X[..., 0] * U[..., 1]
    alpha_v = X[..., 1] * V[..., 0] - X[..., 0] * V[..., 1]
    num = wedge(U[..., 0], V[..., 0]) + wedge(U[..., 1], V[..., 1]) + wedge(alpha_u, alpha_v)
    return num / q ** 2


def numeric_pullback_ratio(f: Callable, x1, *, step: float = 1e-6, normalization: str = "dx"):
    """Pullback of the Fubini-Study form along ``x1 -> f(x1)`` over ``dx1^dxbar1``.

    ``f`` maps complex ``x1`` arrays to a pair of complex arrays. Jacobian by
    central differences along the real and imaginary directions. With
    normalization "fs" the denominator is ``omega_FS`` restricted to the
    line ``x2 = -1 - x1``.
    """
    x1 = np.asarray(x1, dtype=complex)
    hstep = step * np.maximum(1.0, np.abs(x1))

    def F(z):
        a, b = f(z)
        return np.stack([np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)], axis=-1)

    X = F(x1)
    U = (F(x1 + hstep) - F(x1 - hstep)) / (2 * hstep[..., None])
    V = (F(x1 + 1j * hstep) - F(x1 - 1j * hstep)) / (2 * hstep[..., None])
    num = fs_form(X, U, V)
    if normalization == "dx":
        den = -2j
    elif normalization == "fs":
        X0 = np.stack([x1, -1.0 - x1], axis=-1)
        e = np.stack([np.ones_like(x1), -np.ones_like(x1)], axis=-1)
        den = fs_form(X0, e, 1j * e)
    else:
        raise InputError("normalization must be 'dx' or 'fs'")
    return np.real(num / den)


def line_map(m: IsotopyMap) -> Callable:
    """``x1 -> m(x1, -1 - x1)``."""
    return lambda z: m.apply(z, -1.0 - z)


def _on_line(x1, x2, tol=1e-9):
    if np.any(np.abs(np.asarray(x1) + np.asarray(x2) + 1.0) > tol * (1 + np.abs(x1) + np.abs(x2))):
        raise InputError("point is not on the line x1 + x2 + 1 = 0")


def in_base_region(x1, x2, tol: float = 1e-12):
    """Closed region ``|x1| <= |x2| <= 1``."""
    r1, r2 = np.abs(x1), np.abs(x2)
    return (r1 <= r2 + tol) & (r2 <= 1.0 + tol)


def piecewise_ratio(t, x1, x2, normalization: str = "dx"):
    """Closed-form pullback ratio of the piecewise-max map in ``|x1| <= |x2| <= 1``."""
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    r1, r2 = np.abs(x1), np.abs(x2)
    s2 = r2 ** (-2.0 * t)
    num = (1.0 - t) * s2 + s2 * (1.0 + t * np.real(x1 / x2)) + s2 * s2
    if normalization == "dx":
        return num / (1.0 + s2 * (r1 ** 2 + r2 ** 2)) ** 2
    q = 1.0 + r1 ** 2 + r2 ** 2
    return num / (3.0 * (1.0 / q + s2 * (r1 ** 2 + r2 ** 2) / q) ** 2)


@dataclass
class SmoothedRatioTerms:
    total: np.ndarray          # full expression
    omega_tilde: np.ndarray    # leading part
    remainder: np.ndarray      # R_t = (1-l0) R0 + l1 R1 + l2 R2, terms as displayed
    R0: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    remainder_exact: np.ndarray  # total = omega_tilde + t * remainder_exact


def smoothed_ratio_terms(profile: CutoffProfile, t, x1, x2) -> SmoothedRatioTerms:
    """Closed form of the h-smoothed pullback ratio with its decomposition.

    ``total`` should equal ``omega_tilde + t * remainder``; the tests check
    this and compare ``total`` with the numeric Jacobian pullback.
    """
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    r1, r2 = np.abs(x1), np.abs(x2)
    l1, l2 = np.log(r1), np.log(r2)
    h = profile.h
    eta2 = r1 ** h(l1)
    eta1 = r2 ** h(l2)
    eta0 = r1 * (r2 / r1) ** h(l2 - l1)
    lam0 = profile.lam(l2 - l1)
    lam1 = profile.lam(l1)
    lam2 = profile.lam(l2)
    P2 = (eta2 / eta0) ** (2 * t)
    P1 = (eta1 / eta0) ** (2 * t)
    P12 = (eta2 * eta1 / eta0 ** 2) ** (2 * t)
    q21 = np.real(x2 / x1)
    q12 = np.real(x1 / x2)
    den = (1.0 + P2 * r2 ** 2 + P1 * r1 ** 2) ** 2
    total = (P2 * (1 + (1 - lam0 - lam1) * t * q21 - lam0 * t)
             + P1 * (1 - (1 - lam0) * t + (lam0 - lam2) * t * q12)
             + P12 * (1 + t * (lam2 * np.real(x1) + lam1 * np.real(x2)))) / den
    omega = (P2 * (1 + t * q12) + P1 * (1 - t) + P12) / den
    R0 = (P2 * (1 + q21) - P1 * (1 + q12)) / den
    R1 = P2 * (eta1 ** (2 * t) * np.real(x2) - q21) / den
    R2 = P1 * (eta2 ** (2 * t) * np.real(x1) - q12) / den
    rem = (1 - lam0) * R0 + lam1 * R1 + lam2 * R2
    # Exact split: the displayed R1, R2 carry eta^{2t} where the algebra gives
    # (eta/eta0)^{2t}, and a term (P1 - P2)(1 + Re(x1/x2)) is dropped. Both
    # are O(eps) near the smoothing collars.
    exact = ((1 - lam0) * R0 + lam1 * P2 * (P1 * np.real(x2) - q21) / den
             + lam2 * P1 * (P2 * np.real(x1) - q12) / den + (P1 - P2) * (1 + q12) / den)
    return SmoothedRatioTerms(total, omega, rem, R0, R1, R2, exact)


def pullback_ratio(m: IsotopyMap, x, normalization: str = "dx"):
    """Pullback ratio at a point ``x = (x1, x2)`` of the line.

    The piecewise-max closed form is only valid in ``|x1| <= |x2| <= 1``
    (other regions follow by symmetry) and raises ``RegionMismatch``
    elsewhere. The smoothed-h closed form holds on the whole torus chart.
    Models without a closed form use the numeric Jacobian pullback.
    """
    x1, x2 = np.asarray(x[0], dtype=complex), np.asarray(x[1], dtype=complex)
    _on_line(x1, x2)
    kind = m.profile.kind
    if kind is ProfileKind.PIECEWISE_MAX:
        if not np.all(in_base_region(x1, x2)):
            raise RegionMismatch("closed form needs |x1| <= |x2| <= 1")
        return piecewise_ratio(m.t, x1, x2, normalization)
    if kind is ProfileKind.SMOOTHED_H:
        tot = smoothed_ratio_terms(m.profile, m.t, x1, x2).total
        if normalization == "fs":
            tot = tot * (1 + np.abs(x1) ** 2 + np.abs(x2) ** 2) ** 2 / 3.0
        return tot
    if kind is ProfileKind.GAMMA_EPS:
        f = cutoff_graph_map(m.profile, m.t)
        if not np.all(in_base_region(x1, x2)):
            raise RegionMismatch("cutoff graph chart needs |x1| <= |x2| <= 1")
        return numeric_pullback_ratio(f, x1, normalization=normalization)
    return numeric_pullback_ratio(line_map(m), x1, normalization=normalization)


# ---------------------------------------------------------------------------
# region grids and symmetries

def base_region_grid(n: int) -> np.ndarray:
    """``x1`` values filling ``|x1| <= |x1 + 1| <= 1`` on an n-by-n grid.

    ``x1 = -1 + rho e^{i phi}`` with ``rho = |x2|`` in ``[1/2, 1]`` and
    ``|phi| <= arccos(1/(2 rho))``; the degenerate endpoints are nudged
    inward by a relative 1e-9.
    """
    rho = np.linspace(0.5, 1.0, n)
    rho = np.clip(rho, 0.5 * (1 + 1e-9), 1.0 - 1e-9)
    frac = np.linspace(-1.0, 1.0, n) * (1 - 1e-9)
    R, Fr = np.meshgrid(rho, frac, indexing="ij")
    phi = Fr * np.arccos(np.clip(1.0 / (2.0 * R), -1, 1))
    return (-1.0 + R * np.exp(1j * phi)).ravel()


def line_symmetries():
    """Six maps ``x1 -> x1'`` on the line induced by permuting ``[z0 : z1 : z2]``."""
    def s_id(z): return z
    def s_12(z): return -1.0 - z                # swap z1, z2
    def s_01(z): return 1.0 / z                 # swap z0, z1
    def s_02(z): return z / (-1.0 - z)          # swap z0, z2
    def s_012(z): return -1.0 - 1.0 / z         # cycle
    def s_021(z): return (-1.0 - z) / z         # other cycle
    return [("id", s_id), ("swap12", s_12), ("swap01", s_01), ("swap02", s_02),
            ("cycle", s_012), ("cycle2", s_021)]


# ---------------------------------------------------------------------------
# certification

@dataclass
class CertificateReport:
    model: str
    eps: float
    t_values: list[float]
    grid: int
    region_minima: list[dict] = field(default_factory=list)   # rows {t, region, normalization, min}
    min_ratio_dx: float = float("inf")      # base region
    min_ratio_fs: float = float("inf")      # base region
    min_ratio_fs_all: float = float("inf")  # all six regions, numeric pullback
    max_deviation: float | None = None    # vs the piecewise-max ratio, base region
    fd_max_error: float | None = None     # closed form vs numeric Jacobian
    profile_checks: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"schema": "certificate/1", "model": self.model, "eps": self.eps,
                "t_values": self.t_values, "grid": self.grid,
                "min_ratio_dx": self.min_ratio_dx, "min_ratio_fs": self.min_ratio_fs,
                "min_ratio_fs_all": self.min_ratio_fs_all,
                "max_deviation": self.max_deviation, "fd_max_error": self.fd_max_error,
                "region_minima": self.region_minima, "profile_checks": self.profile_checks,
                "witness": self.witness}


def _away_from_kinks(x1, margin):
    r1, r2 = np.abs(x1), np.abs(-1.0 - x1)
    return (np.abs(r1 - r2) > margin) & (np.abs(r2 - 1.0) > margin) & (np.abs(r1 - 1.0) > margin)


def _ratio_grid(m: IsotopyMap, x1, normalization):
    x2 = -1.0 - x1
    kind = m.profile.kind
    if kind in (ProfileKind.PIECEWISE_MAX, ProfileKind.SMOOTHED_H):
        return pullback_ratio(m, (x1, x2), normalization)
    if kind is ProfileKind.GAMMA_EPS:
        return numeric_pullback_ratio(cutoff_graph_map(m.profile, m.t), x1, normalization=normalization)
    return numeric_pullback_ratio(line_map(m), x1, normalization=normalization)


def certify_bounds(profile: CutoffProfile, t_steps: int = 11, grid: int = 200,
                   all_regions: bool = True, fd_points: int = 400) -> CertificateReport:
    """Minimum pullback ratios over the region grid for ``t`` in ``linspace(0, 1, t_steps)``.

    The base region ``|x1| <= |x2| <= 1`` is swept in both normalizations.
    With ``all_regions`` the five symmetric images are swept with the numeric
    pullback in the intrinsic "fs" normalization. Raises ``BoundViolation``
    if any ratio is non-positive.
    """
    ts = [float(v) for v in np.linspace(0.0, 1.0, t_steps)]
    rep = CertificateReport(profile.kind.value, profile.eps, ts, grid)
    rep.profile_checks = profile.check()
    x1 = base_region_grid(grid)
    fd_idx = np.linspace(0, x1.size - 1, min(fd_points, x1.size)).astype(int)
    dev = 0.0
    fd_err = 0.0
    worst = (np.inf, None)
    for t in ts:
        m = IsotopyMap(profile, t)
        if profile.kind is ProfileKind.GAMMA_EPS:
            xs = cutoff_base_grid(profile, grid)
        else:
            xs = x1
        for norm in ("dx", "fs"):
            r = _ratio_grid(m, xs, norm)
            k = int(np.nanargmin(r))
            val = float(r[k])
            rep.region_minima.append({"t": t, "region": "base", "normalization": norm, "min": val})
            if norm == "dx":
                rep.min_ratio_dx = min(rep.min_ratio_dx, val)
            else:
                rep.min_ratio_fs = min(rep.min_ratio_fs, val)
                rep.min_ratio_fs_all = min(rep.min_ratio_fs_all, val)
            if val < worst[0]:
                worst = (val, {"t": t, "x1": [float(xs[k].real), float(xs[k].imag)], "normalization": norm})
            if norm == "dx" and profile.kind in (ProfileKind.PIECEWISE_MAX, ProfileKind.SMOOTHED_H):
                z = xs[fd_idx]
                if profile.kind is ProfileKind.PIECEWISE_MAX:
                    # stencils must not straddle the kinks |x1| = |x2| and |x2| = 1
                    z = z[_away_from_kinks(z, 1e-4)]
                    fd_r = piecewise_ratio(t, z, -1.0 - z, "dx")
                else:
                    fd_r = r[fd_idx]
                num = numeric_pullback_ratio(line_map(m), z, normalization="dx")
                fd_err = max(fd_err, float(np.nanmax(np.abs(num - fd_r))))
            if norm == "dx" and profile.kind in (ProfileKind.SMOOTHED_H, ProfileKind.OPTIMAL_B):
                pw = piecewise_ratio(t, xs, -1.0 - xs, "dx")
                dev = max(dev, float(np.nanmax(np.abs(r - pw))))
        if all_regions and profile.kind is not ProfileKind.GAMMA_EPS:
            for name, sym in line_symmetries()[1:]:
                z = sym(xs)
                r = numeric_pullback_ratio(line_map(m), z, normalization="fs")
                val = float(np.nanmin(r))
                rep.region_minima.append({"t": t, "region": name, "normalization": "fs", "min": val})
                rep.min_ratio_fs_all = min(rep.min_ratio_fs_all, val)
                if val < worst[0]:
                    k = int(np.nanargmin(r))
                    worst = (val, {"t": t, "x1": [float(z[k].real), float(z[k].imag)], "normalization": "fs"})
    if profile.kind in (ProfileKind.SMOOTHED_H, ProfileKind.OPTIMAL_B):
        rep.max_deviation = dev
    if profile.kind in (ProfileKind.PIECEWISE_MAX, ProfileKind.SMOOTHED_H):
        rep.fd_max_error = fd_err
    rep.witness = worst[1]
    if worst[0] <= 0:
        raise BoundViolation("pulled-back form is not positive on the curve", worst[1])
    return rep


@dataclass
class ScalingReport:
    kind: str
    eps: list[float]
    deviations: list[float]
    halving_ratios: list[float]     # dev(eps) / dev(eps/2)
    normalized: list[float]         # dev / eps or dev / sqrt(eps)
    exponent: float                 # 1 for O(eps), 1/2 for O(sqrt eps)

    def to_json(self) -> dict:
        return {"schema": "scaling/1", **self.__dict__}


def deviation_scaling(kind: ProfileKind | str, eps_values=(0.2, 0.1, 0.05), t_steps: int = 11,
                      grid: int = 200) -> ScalingReport:
    """Max deviation from the piecewise-max ratio across an eps sweep."""
    kind = kind if isinstance(kind, ProfileKind) else ProfileKind.parse(kind)
    if kind not in (ProfileKind.SMOOTHED_H, ProfileKind.OPTIMAL_B):
        raise InputError("scaling sweeps are defined for the smoothed and collar models")
    x1 = base_region_grid(grid)
    x2 = -1.0 - x1
    devs = []
    for e in eps_values:
        prof = CutoffProfile(kind, e)
        d = 0.0
        for t in np.linspace(0.0, 1.0, t_steps):
            m = IsotopyMap(prof, float(t))
            r = _ratio_grid(m, x1, "dx")
            d = max(d, float(np.nanmax(np.abs(r - piecewise_ratio(t, x1, x2, "dx")))))
        devs.append(d)
    expo = 1.0 if kind is ProfileKind.SMOOTHED_H else 0.5
    ratios = [devs[i] / devs[i + 1] if devs[i + 1] > 0 else float("inf") for i in range(len(devs) - 1)]
    return ScalingReport(kind.value, [float(e) for e in eps_values], devs, ratios,
                         [d / e ** expo for d, e in zip(devs, eps_values)], expo)


# ---------------------------------------------------------------------------
# image of the line

Y_CENTER = np.array([1.0, 1.0]) / 3.0
Y_ENDS = np.array([[0.5, 0.0], [0.0, 0.5], [0.5, 0.5]])


def line_moment(x1, x2) -> np.ndarray:
    """Fubini-Study moment map of CP^2 in the chart, shape (..., 2)."""
    a = np.abs(np.asarray(x1)) ** 2
    b = np.abs(np.asarray(x2)) ** 2
    q = 1.0 + a + b
    return np.stack([a / q, b / q], axis=-1)


def distance_to_segments(P: np.ndarray, segs: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """Distance from each row of P (K,2) to the union of segments (E,2,2)."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    if len(segs) == 0:
        return np.full(len(P), np.inf)
    A = segs[:, 0]
    D = segs[:, 1] - A
    L2 = np.maximum((D * D).sum(axis=1), 1e-300)
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        Q = P[s:s + chunk, None, :] - A[None]
        tt = np.clip((Q * D[None]).sum(axis=2) / L2[None], 0.0, 1.0)
        R = Q - tt[..., None] * D[None]
        out[s:s + chunk] = np.sqrt((R * R).sum(axis=2)).min(axis=1)
    return out


def y_segments() -> np.ndarray:
    return np.stack([np.broadcast_to(Y_CENTER, (3, 2)), Y_ENDS], axis=1)


def line_samples(n: int = 400) -> np.ndarray:
    """``x1`` samples covering the line: log-polar grids around 0 and -1 plus a far ring."""
    rad = np.exp(np.linspace(np.log(1e-4), np.log(1e4), n))
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    R, A = np.meshgrid(rad, ang, indexing="ij")
    z0 = (R * np.exp(1j * A)).ravel()
    z1 = -1.0 + z0
    return np.concatenate([z0, z1])


def y_image_check(m: IsotopyMap, n: int = 400) -> float:
    """Max distance (moment coordinates) from ``F(m(C0))`` to the Y graph."""
    z = line_samples(n)
    z = z[(np.abs(z) > 0) & (np.abs(z + 1) > 0)]
    X1, X2 = m.apply(z, -1.0 - z)
    return float(distance_to_segments(line_moment(X1, X2), y_segments()).max())


def unperturbed_y_distance(n: int = 20001) -> float:
    """Max distance from the line's moment image to the Y graph.

    The image is the curved triangle bounded by the arcs ``r1 + r2 = 1``,
    ``r1 = r2 + 1`` and ``r2 = r1 + 1`` (real points of the line). The
    farthest points sit on those arcs. The Euclidean metric on moment
    coordinates is not permutation invariant, so all three arcs are swept.
    """
    s = np.linspace(0.0, 1.0, n)
    far = np.concatenate([s, np.exp(np.linspace(0.0, np.log(1e6), n))])
    arcs = [line_moment(s, 1.0 - s), line_moment(far + 1.0, far), line_moment(far, far + 1.0)]
    return float(max(distance_to_segments(F, y_segments()).max() for F in arcs))


# ---------------------------------------------------------------------------
# cutoff line

@dataclass(frozen=True)
class CutoffLine:
    """``p_t = g(r1^2/eta1^2) x1 + g(r2^2/eta2^2) x2 + g(1/eta0^2)``, ``g = t gamma + 1 - t``."""

    profile: CutoffProfile
    t: float = 1.0

    def __post_init__(self):
        if self.profile.kind is not ProfileKind.GAMMA_EPS:
            raise InputError("cutoff line needs a GammaEps profile")
        if not (0.0 <= self.t <= 1.0):
            raise InputError("t must lie in [0, 1]")

    def g(self, u):
        return self.t * self.profile.gamma(u) + (1.0 - self.t)

    def weights(self, r1, r2):
        eta1 = np.maximum(1.0, r2)
        eta2 = np.maximum(1.0, r1)
        eta0 = np.maximum(r1, r2)
        return (self.g(r1 ** 2 / eta1 ** 2), self.g(r2 ** 2 / eta2 ** 2), self.g(1.0 / eta0 ** 2))

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=complex)
        x2 = np.asarray(x2, dtype=complex)
        g1, g2, g0 = self.weights(np.abs(x1), np.abs(x2))
        return g1 * x1 + g2 * x2 + g0

    def saturated(self, x1, x2):
        """True where every coefficient weight equals 1 (the plain line)."""
        A2e = self.profile.A2 * self.profile.eps
        r1, r2 = np.abs(x1), np.abs(x2)
        return ((r1 / np.maximum(1.0, r2) >= A2e) & (r2 / np.maximum(1.0, r1) >= A2e)
                & (1.0 / np.maximum(r1, r2) >= A2e))

    def roots_x2(self, x1: complex, lo: float = 1e-8, hi: float = 1e8, n: int = 1200) -> list[complex]:
        """All ``x2`` with ``p_t(x1, x2) = 0`` for a fixed ``x1``.

        Writing ``x2 = rho e^{i phi}`` the equation reads ``A(rho) + B(rho) x2 = 0``
        with ``A, B`` depending on ``rho`` only, so ``rho`` solves the scalar
        equation ``|A(rho)| = B(rho) rho`` and ``phi = arg(-A)``.
        """
        return radial_roots(lambda rho: self._AB(x1, rho), lo, hi, n)

    def _AB(self, x1, rho):
        r1 = abs(x1)
        g1, g2, g0 = self.weights(r1, rho)
        return g1 * x1 + g0, g2


def radial_roots(AB: Callable, lo: float, hi: float, n: int) -> list[complex]:
    """Solve ``A(rho) + B(rho) rho e^{i phi} = 0`` for ``rho`` in [lo, hi]."""
    rho = np.exp(np.linspace(np.log(lo), np.log(hi), n))
    A, B = AB(rho)
    A = np.broadcast_to(np.asarray(A, dtype=complex), rho.shape)
    B = np.broadcast_to(np.asarray(B, dtype=float), rho.shape)
    gval = np.abs(A) - B * rho
    out = []

    def gfun(r):
        a, b = AB(np.array([r]))
        return float(np.abs(np.asarray(a).reshape(-1)[0]) - np.asarray(b, dtype=float).reshape(-1)[0] * r)

    for k in np.flatnonzero(np.sign(gval[:-1]) * np.sign(gval[1:]) < 0):
        r = brentq(gfun, rho[k], rho[k + 1], xtol=1e-300, rtol=1e-15, maxiter=200)
        a, b = AB(np.array([r]))
        a = complex(np.asarray(a).reshape(-1)[0])
        if float(np.asarray(b).reshape(-1)[0]) <= 0:
            continue
        out.append(r * np.exp(1j * np.angle(-a)))
    for k in np.flatnonzero(gval == 0):
        a = complex(A[k])
        if B[k] > 0:
            out.append(rho[k] * np.exp(1j * np.angle(-a)))
    return out


def cutoff_line(profile: CutoffProfile, t: float = 1.0) -> CutoffLine:
    return CutoffLine(profile, t)


def cutoff_graph_map(profile: CutoffProfile, t: float) -> Callable:
    """``x1 -> (x1, -1 - g(|x1|^2) x1)``: the cutoff curve in ``|x1| <= |x2| <= 1``."""
    line = CutoffLine(profile, t)
    return lambda z: (z, -1.0 - line.g(np.abs(z) ** 2) * z)


def cutoff_base_grid(profile: CutoffProfile, n: int) -> np.ndarray:
    """``x1`` grid over the cutoff annulus ``A1 eps <= |x1| <= A2 eps``."""
    e = profile.eps
    rad = np.linspace(profile.A1 * e, profile.A2 * e, n)
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    R, A = np.meshgrid(rad, ang, indexing="ij")
    return (R * np.exp(1j * A)).ravel()


def outside_u_eps(x1, x2, eps: float):
    """Complement of the central region where all three ratios are at least eps."""
    r1, r2 = np.abs(x1), np.abs(x2)
    return ((r1 < eps * np.maximum(1.0, r2)) | (r2 < eps * np.maximum(1.0, r1))
            | (1.0 < eps * np.maximum(r1, r2)))


def sample_cutoff_curve(line: CutoffLine, n: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Points of the cutoff curve from ``x1`` slices, symmetrized under the swap."""
    rad = np.exp(np.linspace(np.log(1e-4), np.log(1e4), n))
    ang = np.linspace(0, 2 * np.pi, max(8, n // 4), endpoint=False)
    xs1, xs2 = [], []
    for r in rad:
        for a in ang:
            z = r * np.exp(1j * a)
            for w in line.roots_x2(z):
                xs1.append(z)
                xs2.append(w)
    X1 = np.array(xs1, dtype=complex)
    X2 = np.array(xs2, dtype=complex)
    # p_t is symmetric under x1 <-> x2, which supplies the other slice direction
    return np.concatenate([X1, X2]), np.concatenate([X2, X1])


@dataclass
class CutoffImageReport:
    eps: float
    samples: int
    outside_max_deviation: float
    inside_max_deviation: float
    saturated_root_error: float
    saturated_roots: int

    def to_json(self) -> dict:
        return {"schema": "cutoff-image/1", **self.__dict__}


def cutoff_image_check(profile: CutoffProfile, t: float = 1.0, n: int = 200) -> CutoffImageReport:
    """Moment image of the cutoff curve against the Y graph.

    Reports the max distance for samples outside the central region, the
    max inside it, and the largest gap between cutoff roots and plain-line
    roots where all weights are saturated.
    """
    line = CutoffLine(profile, t)
    X1, X2 = sample_cutoff_curve(line, n)
    F = line_moment(X1, X2)
    dist = distance_to_segments(F, y_segments())
    out = outside_u_eps(X1, X2, profile.eps)
    sat = line.saturated(X1, X2)
    err = np.abs(X2[sat] - (-1.0 - X1[sat])) / np.maximum(1.0, np.abs(X2[sat]))
    return CutoffImageReport(profile.eps, int(X1.size),
                             float(dist[out].max(initial=0.0)), float(dist[~out].max(initial=0.0)),
                             float(err.max(initial=0.0)), int(sat.sum()))
