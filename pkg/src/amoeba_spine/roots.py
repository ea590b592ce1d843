"""Batched simultaneous root finding (Aberth-Ehrlich iteration).

Rows of a coefficient matrix are independent polynomials, lowest degree
first. Starting radii come from the Newton polygon of ``log|c_k|``, which
keeps the iteration well conditioned when root moduli span many orders of
magnitude. Evaluation switches to the reversed polynomial outside the unit
disk so nothing overflows after the per-row normalization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TINY = 1e-300


@dataclass
class RootResult:
    roots: np.ndarray        # (B, n) complex
    converged: np.ndarray    # (B,) bool
    residual: np.ndarray     # (B,) max relative residual per row
    iterations: int


def newton_polygon_radii(logc: np.ndarray) -> np.ndarray:
    """Tropical root moduli from ``log|c_k|`` (rows, lowest degree first).

    The slope of the concave majorant on ``[k-1, k]`` equals
    ``min_{i<k} max_{j>=k} (L_j - L_i)/(j - i)``; the k-th modulus is
    ``exp(-slope)``. Returns an array of shape (B, n), nondecreasing per row.
    """
    B, n1 = logc.shape
    n = n1 - 1
    idx = np.arange(n1)
    den = idx[None, :] - idx[:, None]  # j - i
    with np.errstate(divide="ignore", invalid="ignore"):
        S = (logc[:, None, :] - logc[:, :, None]) / np.where(den > 0, den, 1)
    S = np.where(den[None] > 0, S, -np.inf)
    # M[i, k] = max_{j >= k} S[i, j]
    M = np.fmax.accumulate(S[:, :, ::-1], axis=2)[:, :, ::-1]
    # slope_k = min_{i <= k-1} M[i, k]
    Mk = M[:, :, 1:]                       # k = 1..n
    cm = np.fmin.accumulate(Mk, axis=1)  # running min over i
    slopes = cm[:, np.arange(n), np.arange(n)]
    slopes = np.where(np.isfinite(slopes), slopes, 0.0)
    return np.exp(np.clip(-slopes, -700, 700))


def _newton_ratio(C: np.ndarray, z: np.ndarray):
    """Return ``p/p'`` and the relative residual ``|p| / sum|c_k||z|^k``.

    ``C`` is (B, n+1); ``z`` is (B, n). Uses the reversed polynomial where
    ``|z| > 1``.
    """
    B, n1 = C.shape
    n = n1 - 1
    inside = np.abs(z) <= 1.0
    zi = np.where(inside, z, 0.0)
    y = np.where(inside, 0.0, 1.0 / np.where(inside, 1.0, z))
    Ca = np.abs(C)
    # forward Horner for |z| <= 1
    p = np.broadcast_to(C[:, n:n + 1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    sa = np.broadcast_to(Ca[:, n:n + 1], z.shape).astype(float)
    az = np.abs(zi)
    for k in range(n - 1, -1, -1):
        dp = dp * zi + p
        p = p * zi + C[:, k:k + 1]
        sa = sa * az + Ca[:, k:k + 1]
    # reversed Horner for |z| > 1:  q(y) = sum c_{n-k} y^k
    q = np.broadcast_to(C[:, 0:1], z.shape).astype(complex)
    dq = np.zeros_like(q)
    sq = np.broadcast_to(Ca[:, 0:1], z.shape).astype(float)
    ay = np.abs(y)
    for k in range(1, n + 1):
        dq = dq * y + q
        q = q * y + C[:, k:k + 1]
        sq = sq * ay + Ca[:, k:k + 1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r_in = p / dp
        r_out = z * q / (n * q - y * dq)
        res_in = np.abs(p) / np.maximum(sa, _TINY)
        res_out = np.abs(q) / np.maximum(sq, _TINY)
    ratio = np.where(inside, r_in, r_out)
    res = np.where(inside, res_in, res_out)
    return ratio, res


def _aberth(C, z, maxiter, tol):
    B, n = z.shape
    active = np.ones(B, dtype=bool)
    eye = np.eye(n, dtype=bool)
    it = 0
    for it in range(1, maxiter + 1):
        ia = np.flatnonzero(active)
        if ia.size == 0:
            break
        za = z[ia]
        ratio, res = _newton_ratio(C[ia], za)
        if n > 1:
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = 1.0
            with np.errstate(divide="ignore", invalid="ignore"):
                inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                corr = ratio / (1.0 - ratio * s)
        else:
            corr = ratio
        corr = np.where(np.isfinite(corr), corr, 0.0)
        # Already at a root: no step.
        corr = np.where(res <= 1e-17, 0.0, corr)
        za = za - corr
        z[ia] = za
        small = np.abs(corr) <= tol * np.maximum(np.abs(za), _TINY)
        done = np.all(small | (res <= 1e-16), axis=1)
        active[ia[done]] = False
    return z, it


def polyroots(C: np.ndarray, *, rng: np.random.Generator | None = None, tol: float = 1e-14,
              residual_tol: float = 1e-12, maxiter: int = 200, restarts: int = 3,
              chunk: int = 65536) -> RootResult:
    """All roots of every row of ``C`` (lowest degree first).

    Each row must have nonzero constant and leading coefficients. Rows that
    miss ``residual_tol`` after ``maxiter`` iterations are restarted from
    randomly rotated starting points.
    """
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[1] < 2:
        raise ValueError("coefficient matrix must be (B, n+1) with n >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    B, n1 = C.shape
    n = n1 - 1
    if np.any(C[:, 0] == 0) or np.any(C[:, n] == 0):
        raise ValueError("constant and leading coefficients must be nonzero")
    out = np.empty((B, n), dtype=complex)
    conv = np.zeros(B, dtype=bool)
    resid = np.zeros(B)
    iters = 0
    for s0 in range(0, B, chunk):
        Cc = C[s0:s0 + chunk]
        Cc = Cc / np.abs(Cc).max(axis=1, keepdims=True)
        logc = np.log(np.maximum(np.abs(Cc), _TINY))
        logc = np.where(np.abs(Cc) > 0, logc, -np.inf)
        rad = newton_polygon_radii(logc)
        b = Cc.shape[0]
        base = 2 * np.pi * np.arange(n) / n
        todo = np.arange(b)
        z_all = np.empty((b, n), dtype=complex)
        res_all = np.full(b, np.inf)
        for attempt in range(restarts + 1):
            phase = rng.uniform(0, 2 * np.pi, size=(todo.size, 1))
            jitter = 1.0 if attempt == 0 else np.exp(rng.normal(0, 0.3, size=(todo.size, n)))
            z0 = rad[todo] * jitter * np.exp(1j * (base[None, :] + phase + 0.4))
            z, it = _aberth(Cc[todo], z0, maxiter, tol)
            iters = max(iters, it)
            _, res = _newton_ratio(Cc[todo], z)
            r = res.max(axis=1)
            better = r < res_all[todo]
            z_all[todo[better]] = z[better]
            res_all[todo[better]] = r[better]
            todo = todo[res_all[todo] > residual_tol]
            if todo.size == 0:
                break
        out[s0:s0 + b] = z_all
        resid[s0:s0 + b] = res_all
        conv[s0:s0 + b] = res_all <= residual_tol
    return RootResult(out, conv, resid, iters)
