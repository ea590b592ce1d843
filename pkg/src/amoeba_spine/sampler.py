"""Slice sampling of curves, amoeba rasters, hole/leg counts and distances.

A curve ``s = 0`` is sampled by fixing one torus coordinate on a grid of
``log r`` values and angles and solving for the other. A raster cell of the
moment polygon is occupied when

* a sampled point maps into it, or
* the preimage of its center lies inside the slice-wise image of the
  amoeba: for each slice the k-th smallest root modulus, as the angle runs
  around the circle, sweeps a closed interval of ``log r``; the union of
  these intervals is the slice of the amoeba.

The second rule fills the thin parts of the image that forward sampling
would need enormous densities to reach. Both slice axes are used.
"""
from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import InputError, ResolutionTooCoarse
from .lattice import LatticePolygon, normal_fan
from .local_models import distance_to_segments
from .moment import LaurentSection, MomentParams, log_metric_weights, newton_invert, tropical_log_coefficients
from .roots import polyroots
from .spine import SpineGraph, bounded_faces, legs_per_polygon_edge

log = logging.getLogger(__name__)

AXES = ("fix_x1", "fix_x2")
RESIDUAL_TOL = 1e-9
CHUNK_SLICES = 32


def default_threads() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# slice sampling

@dataclass(frozen=True)
class SliceSpec:
    axis: str = "fix_x1"
    log_range: tuple[float, float] = (-10.0, 10.0)
    slices: int = 800
    angles: int = 64

    def __post_init__(self):
        if self.axis not in AXES:
            raise InputError(f"axis must be one of {AXES}")
        if self.slices < 2 or self.angles < 1:
            raise InputError("need slices >= 2 and angles >= 1")
        lo, hi = self.log_range
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise InputError("log_range must be a finite increasing interval")

    @property
    def fixed(self) -> int:
        return AXES.index(self.axis)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        u = np.linspace(self.log_range[0], self.log_range[1], self.slices)
        # half-step offset keeps the angles off the real axis
        th = 2 * np.pi * (np.arange(self.angles) + 0.5) / self.angles
        return u, th


@dataclass
class SliceBlock:
    """Roots of one slice sweep. ``roots[i, j, k]`` is the k-th root on slice
    ``u[i]`` at angle ``theta[j]``; missing roots are NaN."""

    spec: SliceSpec
    u: np.ndarray
    theta: np.ndarray
    roots: np.ndarray
    ok: np.ndarray
    failures: int = 0          # slices with a root that missed the residual bound
    degenerate: int = 0        # identically zero slice polynomials (skipped)
    max_residual: float = 0.0

    @property
    def count(self) -> int:
        return int(self.ok.sum())

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """``(logr, theta)`` of every accepted root, each of shape (K, 2)."""
        i, j, k = np.nonzero(self.ok)
        z = self.roots[i, j, k]
        a = self.spec.fixed
        L = np.empty((z.size, 2))
        T = np.empty((z.size, 2))
        L[:, a] = self.u[i]
        T[:, a] = self.theta[j]
        L[:, 1 - a] = np.log(np.abs(z))
        T[:, 1 - a] = np.angle(z)
        return L, T

    def intervals(self) -> tuple[np.ndarray, np.ndarray]:
        """Per slice and rank, the min and max of the sorted ``log |root|``.

        Rows with a missing root are left out; a slice without any complete
        row gets NaN (never matches).
        """
        full = self.ok.all(axis=2)
        lm = np.where(self.ok, np.log(np.where(self.ok, np.abs(self.roots), 1.0)), np.nan)
        lm = np.sort(lm, axis=2)
        lm = np.where(full[..., None], lm, np.nan)
        with np.errstate(all="ignore"):
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return np.nanmin(lm, axis=1), np.nanmax(lm, axis=1)


def _slice_coefficients(s: LaurentSection, p: MomentParams, fixed: int, u: np.ndarray, th: np.ndarray):
    """Coefficient rows (lowest degree first) for all (u, theta) pairs.

    Magnitudes are combined in log scale with a per-row max subtraction so
    that tropical scalings like ``delta^{w_m}`` never overflow.
    """
    P = s.exponents
    other = 1 - fixed
    lo = int(P[:, other].min())
    deg = int(P[:, other].max()) - lo
    la = np.log(np.abs(s.values)) + tropical_log_coefficients(s, p)
    ph = np.angle(s.values)
    U = np.repeat(u, th.size)
    TH = np.tile(th, u.size)
    E = la[None, :] + U[:, None] * P[None, :, fixed]
    E = E - E.max(axis=1, keepdims=True)
    terms = np.exp(E) * np.exp(1j * (ph[None, :] + TH[:, None] * P[None, :, fixed]))
    C = np.zeros((U.size, deg + 1), dtype=complex)
    A = np.zeros((U.size, deg + 1))
    for j in range(P.shape[0]):
        C[:, P[j, other] - lo] += terms[:, j]
        A[:, P[j, other] - lo] += np.exp(E[:, j])
    # a coefficient that is tiny against its own terms has cancelled
    C[np.abs(C) <= 1e-13 * A] = 0.0
    return C, U, TH


def _solve_rows(C: np.ndarray, rng: np.random.Generator):
    """Roots of each row; rows with vanishing end coefficients are reduced
    (roots at 0 or infinity are not torus points). Returns (roots, degenerate)."""
    B, n1 = C.shape
    n = n1 - 1
    out = np.full((B, n), np.nan + 0j)
    degenerate = ~np.any(C != 0, axis=1)
    nz = C != 0
    first = np.where(nz.any(axis=1), nz.argmax(axis=1), 0)
    last = np.where(nz.any(axis=1), n - nz[:, ::-1].argmax(axis=1), 0)
    keys = first * (n + 1) + last
    for key in np.unique(keys[~degenerate]):
        rows = np.flatnonzero((keys == key) & ~degenerate)
        f, l = divmod(int(key), n + 1)
        if l - f < 1:
            continue
        res = polyroots(C[rows, f:l + 1], rng=rng)
        out[rows, :l - f] = res.roots
    return out, degenerate


def _back_substitute(s, p, fixed, U, TH, R):
    """Relative residual ``|s| / sum |terms|`` at every returned root."""
    P = s.exponents.astype(float)
    la = np.log(np.abs(s.values)) + tropical_log_coefficients(s, p)
    ph = np.angle(s.values)
    n = R.shape[1]
    Lf = np.repeat(U, n)
    Tf = np.repeat(TH, n)
    z = R.reshape(-1)
    good = np.isfinite(z) & (z != 0)
    zz = np.where(good, z, 1.0)
    Lo, To = np.log(np.abs(zz)), np.angle(zz)
    L = np.empty((z.size, 2))
    T = np.empty((z.size, 2))
    L[:, fixed], L[:, 1 - fixed] = Lf, Lo
    T[:, fixed], T[:, 1 - fixed] = Tf, To
    E = L @ P.T + la
    E = E - E.max(axis=1, keepdims=True)
    mag = np.exp(E)
    val = np.abs((mag * np.exp(1j * (T @ P.T + ph))).sum(axis=1))
    res = val / mag.sum(axis=1)
    return np.where(good, res, np.inf).reshape(R.shape)


def _sample_chunk(s, p, spec, u, th, seed_seq):
    rng = np.random.default_rng(seed_seq)
    fixed = spec.fixed
    C, U, TH = _slice_coefficients(s, p, fixed, u, th)
    R, degenerate = _solve_rows(C, rng)
    res = _back_substitute(s, p, fixed, U, TH, R)
    ok = res <= RESIDUAL_TOL
    R = R.reshape(u.size, th.size, -1)
    ok = ok.reshape(R.shape)
    finite = np.isfinite(R)
    bad_slices = np.any(finite & ~ok, axis=(1, 2))
    deg_slices = degenerate.reshape(u.size, th.size).any(axis=1)
    fin = res[np.isfinite(res)]
    return R, ok, int(bad_slices.sum()), int(deg_slices.sum()), float(fin.max(initial=0.0))


def sample_curve(s: LaurentSection, p: MomentParams, spec: SliceSpec, seed: int = 0,
                 threads: int | None = None) -> SliceBlock:
    """All roots of every slice polynomial of the rescaled section.

    Slices are split into fixed-size chunks, each with its own child seed, so
    the result does not depend on the number of threads.
    """
    other = 1 - spec.fixed
    if len({m[other] for m in s.support}) < 2:
        raise InputError("the section must have at least two exponents in the free variable")
    u, th = spec.grid()
    starts = list(range(0, u.size, CHUNK_SLICES))
    seeds = np.random.SeedSequence(seed).spawn(len(starts))
    jobs = [(u[a:a + CHUNK_SLICES], sd) for a, sd in zip(starts, seeds)]
    threads = threads or default_threads()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda j: _sample_chunk(s, p, spec, j[0], th, j[1]), jobs))
    else:
        parts = [_sample_chunk(s, p, spec, uc, th, sd) for uc, sd in jobs]
    R = np.concatenate([q[0] for q in parts])
    ok = np.concatenate([q[1] for q in parts])
    blk = SliceBlock(spec, u, th, R, ok, sum(q[2] for q in parts), sum(q[3] for q in parts),
                     max(q[4] for q in parts))
    if blk.failures:
        log.info("%s: %d slices with roots above the residual bound", spec.axis, blk.failures)
    if blk.degenerate:
        log.info("%s: %d identically zero slices skipped", spec.axis, blk.degenerate)
    return blk


# ---------------------------------------------------------------------------
# raster grid and pixel preimages

@dataclass(frozen=True)
class RasterGrid:
    """``N x N`` square cells over the (squared-up) bounding box of a polygon."""

    polygon: LatticePolygon
    resolution: int

    def __post_init__(self):
        if self.resolution < 8:
            raise InputError("resolution must be at least 8")

    @property
    def origin(self) -> tuple[float, float]:
        x0, y0, _, _ = self.polygon.bbox
        return float(x0), float(y0)

    @property
    def side(self) -> float:
        x0, y0, x1, y1 = self.polygon.bbox
        return float(max(x1 - x0, y1 - y0))

    @property
    def cell(self) -> float:
        return self.side / self.resolution

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        c = (np.arange(self.resolution) + 0.5) * self.cell
        X, Y = np.meshgrid(self.origin[0] + c, self.origin[1] + c, indexing="ij")
        return X, Y

    def edge_distances(self, X, Y) -> np.ndarray:
        """Euclidean distance to each edge line, positive inside; shape (E, ...)."""
        out = []
        for r in normal_fan(self.polygon).rays:
            e = np.array(r.e, dtype=float)
            out.append((X * e[0] + Y * e[1] + r.l) / np.hypot(*e))
        return np.array(out)

    def inside(self) -> np.ndarray:
        X, Y = self.centers()
        return np.all(self.edge_distances(X, Y) > 0, axis=0)

    def index(self, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ij = np.floor((np.asarray(F) - np.array(self.origin)) / self.cell).astype(np.int64)
        ij = np.clip(ij, 0, self.resolution - 1)
        return ij[:, 0], ij[:, 1]


@dataclass
class Preimage:
    """Torus radii ``log r`` of the cell centers inside the polygon."""

    logr: np.ndarray          # (N, N, 2), meaningful where ``valid``
    valid: np.ndarray         # (N, N) bool: inside and converged
    failures: int


def invert_cells(s: LaurentSection, p: MomentParams, grid: RasterGrid, levels: int = 5,
                 tol: float = 1e-10) -> Preimage:
    """Invert the moment map at every interior cell center by coarse-to-fine Newton.

    Each level starts from the bilinear interpolation of the previous,
    coarser solution; the first level starts at the origin.
    """
    lw = p.temper * log_metric_weights(s, p)
    P = s.exponents.astype(float)
    N = grid.resolution
    levels = max(0, min(levels, int(np.log2(N)) - 3))
    u = None
    for L in range(levels, -1, -1):
        n = N >> L if L else N
        sub = RasterGrid(grid.polygon, n)
        X, Y = sub.centers()
        ins = sub.inside()
        tg = np.stack([X[ins], Y[ins]], axis=1)
        if u is None:
            u0 = np.zeros_like(tg)
            it = 200
        else:
            m = u.shape[0]
            fi = (np.arange(n) + 0.5) / n * m - 0.5
            FI, FJ = np.meshgrid(fi, fi, indexing="ij")
            u0 = np.stack([ndimage.map_coordinates(u[..., k], [FI[ins], FJ[ins]], order=1, mode="nearest")
                           for k in range(2)], axis=1)
            it = 80
        us, ok = newton_invert(P, lw, tg, u0, maxiter=it, tol=tol)
        if u is None and not ok.all():
            # far targets from a cold start: one longer run, cheap at the coarsest level
            us[~ok], ok[~ok] = newton_invert(P, lw, tg[~ok], us[~ok], maxiter=10 * it, tol=tol)
        full = np.zeros((n, n, 2))
        full[ins] = us
        # fill the outside by nearest interior value so interpolation is tame
        idx = ndimage.distance_transform_edt(~ins, return_distances=False, return_indices=True)
        u = full[idx[0], idx[1]]
        good = np.zeros((n, n), dtype=bool)
        good[ins] = ok
    return Preimage(u / p.temper, good, int((ins & ~good).sum()))


# ---------------------------------------------------------------------------
# raster

def disk(radius: float) -> np.ndarray:
    r = int(np.floor(radius))
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    return (xx * xx + yy * yy) <= radius * radius + 1e-9


@dataclass
class AmoebaRaster:
    grid: RasterGrid
    occupancy: np.ndarray      # (N, N) bool, indexed [i along x, j along y]
    dilation_radius: float
    meta: dict = field(default_factory=dict)

    @property
    def resolution(self) -> int:
        return self.grid.resolution

    @property
    def occupied(self) -> int:
        return int(self.occupancy.sum())

    def to_json(self) -> dict:
        bits = np.packbits(self.occupancy.astype(np.uint8).reshape(-1))
        return {
            "schema": "raster/1",
            "polygon": self.grid.polygon.to_json(),
            "resolution": self.resolution,
            "dilation_radius": self.dilation_radius,
            "occupancy": base64.b64encode(bits.tobytes()).decode("ascii"),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data: dict) -> "AmoebaRaster":
        try:
            poly = LatticePolygon.from_json(data["polygon"])
            N = int(data["resolution"])
            bits = np.frombuffer(base64.b64decode(data["occupancy"]), dtype=np.uint8)
            occ = np.unpackbits(bits)[:N * N].reshape(N, N).astype(bool)
            return cls(RasterGrid(poly, N), occ, float(data["dilation_radius"]), dict(data.get("meta", {})))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad raster JSON: {exc}") from exc

    def __eq__(self, other):
        return (isinstance(other, AmoebaRaster) and self.grid == other.grid
                and self.dilation_radius == other.dilation_radius
                and np.array_equal(self.occupancy, other.occupancy) and self.meta == other.meta)


def weight_hash(p: MomentParams) -> str:
    if p.w is None:
        return "none"
    blob = json.dumps(p.w.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _interval_fill(blk: SliceBlock, pre: Preimage) -> np.ndarray:
    """Cells whose preimage falls in a slice interval of the nearest slice."""
    a = blk.spec.fixed
    mn, mx = blk.intervals()
    valid = pre.valid
    ua = pre.logr[..., a][valid]
    uo = pre.logr[..., 1 - a][valid]
    du = blk.u[1] - blk.u[0]
    k = np.rint((ua - blk.u[0]) / du).astype(np.int64)
    inrange = (k >= 0) & (k < blk.u.size)
    k = np.clip(k, 0, blk.u.size - 1)
    hit = np.zeros(uo.size, dtype=bool)
    for r in range(mn.shape[1]):
        lo, hi = mn[k, r], mx[k, r]
        hit |= (uo >= lo) & (uo <= hi)
    out = np.zeros(valid.shape, dtype=bool)
    out[valid] = hit & inrange
    return out


def rasterize(blocks: Sequence[SliceBlock], s: LaurentSection, p: MomentParams, grid: RasterGrid,
              dilation: float = 1.5, preimage: Preimage | None = None) -> AmoebaRaster:
    """Mark the cells hit by sampled points (and slice intervals, when the
    cell preimages are given), dilate by a disk and clip to the polygon."""
    from .moment import moment_array
    N = grid.resolution
    occ = np.zeros((N, N), dtype=bool)
    samples = 0
    lw = log_metric_weights(s, p)
    for blk in blocks:
        L, _ = blk.points()
        samples += L.shape[0]
        if L.shape[0]:
            i, j = grid.index(moment_array(s, p, L, lw))
            occ[i, j] = True
        if preimage is not None:
            occ |= _interval_fill(blk, preimage)
    if dilation > 0 and occ.any():
        occ = ndimage.binary_dilation(occ, disk(dilation))
    occ &= grid.inside()
    meta = {"delta": p.delta, "w_hash": weight_hash(p), "metric": p.metric, "temper": p.temper,
            "samples": samples, "slices": [b.spec.slices for b in blocks],
            "angles": [b.spec.angles for b in blocks],
            "root_failures": sum(b.failures for b in blocks),
            "degenerate_slices": sum(b.degenerate for b in blocks),
            "inversion_failures": preimage.failures if preimage is not None else 0}
    return AmoebaRaster(grid, occ, float(dilation), meta)


@dataclass(frozen=True)
class AmoebaConfig:
    resolution: int = 600
    slices: int = 800
    angles: int = 64
    dilation: float = 1.5
    margin: float = 1.0        # extra log r beyond the preimage range
    seed: int = 0
    threads: int | None = None

    def __post_init__(self):
        if self.resolution < 8:
            raise InputError("resolution must be at least 8")
        if self.slices < 2 or self.angles < 1:
            raise InputError("need slices >= 2 and angles >= 1")
        if self.dilation < 0:
            raise InputError("dilation must be nonnegative")


def amoeba_raster(s: LaurentSection, p: MomentParams, cfg: AmoebaConfig = AmoebaConfig(),
                  polygon: LatticePolygon | None = None) -> AmoebaRaster:
    """Full pipeline: cell preimages, both slice sweeps, raster."""
    polygon = polygon or s.newton_polygon()
    grid = RasterGrid(polygon, cfg.resolution)
    pre = invert_cells(s, p, grid)
    U = pre.logr[pre.valid]
    blocks = []
    for axis in AXES:
        a = AXES.index(axis)
        lo, hi = float(U[:, a].min()) - cfg.margin, float(U[:, a].max()) + cfg.margin
        spec = SliceSpec(axis, (lo, hi), cfg.slices, cfg.angles)
        blocks.append(sample_curve(s, p, spec, seed=cfg.seed + a, threads=cfg.threads))
    r = rasterize(blocks, s, p, grid, cfg.dilation, pre)
    r.meta["resolution"] = cfg.resolution
    return r


# ---------------------------------------------------------------------------
# holes and legs

@dataclass
class HoleReport:
    holes: int
    hole_areas: list[int]
    legs: dict[int, int]

    def to_json(self) -> dict:
        return {"schema": "holes/1", "holes": self.holes, "hole_areas": self.hole_areas,
                "legs": {str(k): v for k, v in sorted(self.legs.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "HoleReport":
        return cls(int(data["holes"]), [int(a) for a in data["hole_areas"]],
                   {int(k): int(v) for k, v in data["legs"].items()})

    def __eq__(self, other):
        return (isinstance(other, HoleReport) and self.holes == other.holes
                and self.hole_areas == other.hole_areas and self.legs == other.legs)


def complement_components(occ: np.ndarray) -> list[int]:
    """Areas of the complement components that do not reach the grid border."""
    pad = np.pad(~occ, 1, constant_values=True)
    lab, n = ndimage.label(pad)
    border = np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))
    areas = np.bincount(lab.ravel(), minlength=n + 1)
    keep = np.setdiff1d(np.arange(1, n + 1), border)
    return sorted(int(areas[k]) for k in keep)


def count_legs(occ: np.ndarray, grid: RasterGrid, band: float = 3.0) -> dict[int, int]:
    """Connected raster pieces inside the ``band``-cell strip along each edge."""
    X, Y = grid.centers()
    D = grid.edge_distances(X, Y)
    inside = np.all(D > 0, axis=0)
    out = {}
    for k in range(D.shape[0]):
        strip = inside & (D[k] < band * grid.cell)
        _, n = ndimage.label(occ & strip, np.ones((3, 3), dtype=bool))
        out[k] = int(n)
    return out


def _report(occ, grid, min_area, band) -> HoleReport:
    areas = [a for a in complement_components(occ) if a >= min_area]
    return HoleReport(len(areas), areas, count_legs(occ, grid, band))


def rasterize_spine(g: SpineGraph, grid: RasterGrid, dilation: float) -> np.ndarray:
    """Occupancy of the spine: quarter-cell samples, disk dilation, polygon clip."""
    segs = g.segments()
    N = grid.resolution
    occ = np.zeros((N, N), dtype=bool)
    for a, b in segs:
        n = int(np.ceil(np.linalg.norm(b - a) / (0.25 * grid.cell))) + 1
        t = np.linspace(0.0, 1.0, n)[:, None]
        i, j = grid.index(a + t * (b - a))
        occ[i, j] = True
    if dilation > 0:
        occ = ndimage.binary_dilation(occ, disk(dilation))
    return occ & grid.inside()


def count_holes(r: AmoebaRaster, polygon: LatticePolygon | None = None, spine: SpineGraph | None = None,
                min_area: int = 9, band: float = 3.0) -> HoleReport:
    """Bounded complement components of the raster and legs per polygon edge.

    Components smaller than ``min_area`` cells are dilation artefacts and not
    counted. With a spine, the spine is first rasterized at the same scale;
    if its holes or legs differ from the graph's own counts the scale cannot
    separate spine edges and ``ResolutionTooCoarse`` is raised.
    """
    if polygon is not None and polygon != r.grid.polygon:
        raise InputError("raster and polygon differ")
    if not r.occupancy.any():
        raise InputError("raster is empty")
    if spine is not None:
        probe = _report(rasterize_spine(spine, r.grid, r.dilation_radius), r.grid, min_area, band)
        want_legs = legs_per_polygon_edge(spine, r.grid.polygon)
        if probe.holes != bounded_faces(spine) or probe.legs != want_legs:
            raise ResolutionTooCoarse(
                "dilated spine does not resolve at this raster scale",
                {"resolution": r.resolution, "dilation": r.dilation_radius,
                 "spine_holes": bounded_faces(spine), "raster_holes": probe.holes,
                 "spine_legs": want_legs, "raster_legs": probe.legs})
    return _report(r.occupancy, r.grid, min_area, band)


def stable_hole_report(s: LaurentSection, p: MomentParams, cfg: AmoebaConfig,
                       polygon: LatticePolygon | None = None, spine: SpineGraph | None = None,
                       min_area: int = 9) -> tuple[HoleReport, AmoebaRaster]:
    """Hole report checked against a rerun at twice the resolution.

    The rerun keeps the dilation radius in cells, so in moment coordinates
    the dilation halves. A different hole count raises ``ResolutionTooCoarse``.
    """
    r = amoeba_raster(s, p, cfg, polygon)
    rep = count_holes(r, spine=spine, min_area=min_area)
    fine_cfg = AmoebaConfig(2 * cfg.resolution, 2 * cfg.slices, cfg.angles, cfg.dilation, cfg.margin,
                            cfg.seed, cfg.threads)
    r2 = amoeba_raster(s, p, fine_cfg, polygon)
    rep2 = count_holes(r2, min_area=4 * min_area)
    if rep2.holes != rep.holes:
        raise ResolutionTooCoarse("hole count changes when the resolution doubles",
                                  {"coarse": rep.to_json(), "fine": rep2.to_json()})
    return rep, r


# ---------------------------------------------------------------------------
# distances to the spine

@dataclass
class SpineDistance:
    spine_to_amoeba: float     # in polygon-diameter units
    amoeba_to_spine: float
    spine_to_amoeba_cells: float
    amoeba_to_spine_cells: float

    def to_json(self) -> dict:
        return {"schema": "distance/1", **self.__dict__}


def hausdorff_to_spine(r: AmoebaRaster, g: SpineGraph) -> SpineDistance:
    """Directed distances between occupied cell centers and the spine."""
    X, Y = r.grid.centers()
    C = np.stack([X[r.occupancy], Y[r.occupancy]], axis=1)
    segs = g.segments()
    if C.size == 0 or segs.size == 0:
        raise InputError("need a nonempty raster and spine")
    a2s = float(distance_to_segments(C, segs).max())
    pts = []
    for a, b in segs:
        n = int(np.ceil(np.linalg.norm(b - a) / (0.25 * r.grid.cell))) + 1
        t = np.linspace(0.0, 1.0, n)[:, None]
        pts.append(a + t * (b - a))
    S = np.concatenate(pts)
    s2a = float(cKDTree(C).query(S)[0].max())
    diam = r.grid.polygon.diameter
    return SpineDistance(s2a / diam, a2s / diam, s2a / r.grid.cell, a2s / r.grid.cell)
