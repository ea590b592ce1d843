"""Command line: ``amoeba-spine <command> [options]`` (or ``python3 -m amoeba_spine``).

Exit codes: 0 success, 1 invariant violation (witness JSON on stderr),
2 input or usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from .config import (ConvergeConfig, Cp2Config, LocalConfig, SamplingOptions, check_metric, parse_floats,
                     parse_point, parse_vertices, resolve_family)
from .errors import AmoebaError, InputError, InvariantViolation
from .families import fermat, run_cp2
from .lattice import LatticePolygon, enumerate_points, interior_points, normal_fan
from .local_models import (CutoffProfile, IsotopyMap, ProfileKind, certify_bounds, cutoff_image_check,
                           deviation_scaling, y_image_check)
from .moment import LaurentSection, MomentParams
from .render import render_svg
from .sampler import AmoebaRaster, HoleReport, amoeba_raster, count_holes, hausdorff_to_spine
from .spine import SpineGraph, bounded_faces, build_spine, legs_per_polygon_edge
from .subdivision import Subdivision, WeightFunction, classify, standard_weight, subdivide

log = logging.getLogger("amoeba_spine")

CSV_COLUMNS = ("delta", "holes", "legs_min", "legs_max", "d_a2s", "d_s2a", "runtime_ms")


# ---------------------------------------------------------------------------
# I/O helpers

def dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def load_polygon(args) -> LatticePolygon:
    if getattr(args, "polygon", None):
        return LatticePolygon.from_json(read_json(args.polygon))
    if getattr(args, "vertices", None):
        return enumerate_points(parse_vertices(args.vertices))
    if getattr(args, "family", None):
        return resolve_family(args.family).polygon
    raise InputError("give --polygon, --vertices or --family")


def load_weight(args, poly: LatticePolygon) -> WeightFunction:
    if getattr(args, "weights", None):
        w = WeightFunction.from_json(read_json(args.weights))
        w.check_domain(poly)
        return w
    return standard_weight(poly)


def sampling_from(args) -> SamplingOptions:
    return SamplingOptions(args.resolution, args.slices, args.angles, args.dilation, args.seed, args.threads)


def section_and_params(args):
    """Section, polygon, moment parameters and (when known) subdivision."""
    check_metric(args.metric)
    if args.section:
        s = LaurentSection.from_json(read_json(args.section))
        poly = s.newton_polygon()
        w = load_weight(args, poly) if (args.weights or args.delta < 1) else None
        p = MomentParams(delta=args.delta, w=w, metric=args.metric or "section",
                         temper=args.temper or 1.0)
        Z = subdivide(poly, w) if w is not None else None
        return s, poly, p, Z
    if not args.family:
        raise InputError("give --section or --family")
    fam = resolve_family(args.family, getattr(args, "c_ratio", 1e3))
    delta = args.delta
    if fam.weight is not None and delta == 1.0 and not args.family.startswith(("pd", "fermat")):
        delta = 1e-3
    p = fam.params(delta, args.metric, args.temper)
    Z = subdivide(fam.polygon, fam.weight) if fam.weight is not None else None
    return fam.section, fam.polygon, p, Z


# ---------------------------------------------------------------------------
# commands

def cmd_polygon(args) -> int:
    poly = load_polygon(args)
    out = poly.to_json()
    out["fan"] = normal_fan(poly).to_json()
    out["interior_count"] = len(interior_points(poly))
    write_text(args.out, dump_json(out))
    return 0


def cmd_triangulate(args) -> int:
    poly = load_polygon(args)
    w = load_weight(args, poly)
    Z = subdivide(poly, w, perturb=args.perturb)
    Z.validate()
    write_text(args.out, dump_json(Z.to_json()))
    if args.svg:
        Path(args.svg).write_text(render_svg(poly, subdivision=Z))
    return 0


def _subdivision_from(args) -> Subdivision:
    if args.subdivision:
        return Subdivision.from_json(read_json(args.subdivision))
    poly = load_polygon(args)
    return subdivide(poly, load_weight(args, poly))


def cmd_spine(args) -> int:
    Z = _subdivision_from(args)
    g = build_spine(Z)
    data = g.to_json()
    data["bounded_faces"] = bounded_faces(g)
    data["legs"] = {str(k): v for k, v in legs_per_polygon_edge(g, Z.polygon).items()}
    Path(args.out).write_text(dump_json(data)) if args.out != "-" else sys.stdout.write(dump_json(data))
    if args.svg:
        Path(args.svg).write_text(render_svg(Z.polygon, subdivision=Z, spine=g))
    return 0


def _raster(args):
    s, poly, p, Z = section_and_params(args)
    t0 = time.perf_counter()
    r = amoeba_raster(s, p, sampling_from(args).amoeba(), poly)
    r.meta["runtime_ms"] = round(1e3 * (time.perf_counter() - t0), 1)
    return s, poly, p, Z, r


def cmd_amoeba(args) -> int:
    s, poly, p, Z, r = _raster(args)
    write_text(args.out, dump_json(r.to_json()))
    if args.svg:
        g = build_spine(Z) if Z is not None and Z.all_unimodular else None
        Path(args.svg).write_text(render_svg(poly, spine=g, raster=r))
    return 0


def cmd_holes(args) -> int:
    spine = None
    if args.raster:
        r = AmoebaRaster.from_json(read_json(args.raster))
        if args.subdivision:
            spine = build_spine(Subdivision.from_json(read_json(args.subdivision)))
    else:
        _, _, _, Z, r = _raster(args)
        spine = build_spine(Z) if Z is not None and Z.all_unimodular else None
    rep = count_holes(r, spine=spine, min_area=args.min_area)
    out = rep.to_json()
    if spine is not None:
        out["spine_bounded_faces"] = bounded_faces(spine)
        out["spine_legs"] = {str(k): v for k, v in legs_per_polygon_edge(spine, r.grid.polygon).items()}
    write_text(args.out, dump_json(out))
    if args.expect_spine and spine is not None:
        want = legs_per_polygon_edge(spine, r.grid.polygon)
        if rep.holes != bounded_faces(spine) or rep.legs != want:
            raise InvariantViolation("hole/leg counts differ from the spine", out)
    return 0


def converge_rows(cfg: ConvergeConfig) -> list[dict]:
    fam = resolve_family(cfg.family)
    if fam.weight is None:
        raise InputError("the sweep needs a family with a weight (cp2:d or hexagon)")
    Z = subdivide(fam.polygon, fam.weight)
    g = build_spine(Z)
    rows = []
    for delta in cfg.deltas:
        t0 = time.perf_counter()
        r = amoeba_raster(fam.section, fam.params(delta), cfg.sampling.amoeba(), fam.polygon)
        rep = count_holes(r)
        dist = hausdorff_to_spine(r, g)
        rows.append({"delta": delta, "holes": rep.holes, "legs_min": min(rep.legs.values()),
                     "legs_max": max(rep.legs.values()), "d_a2s": dist.amoeba_to_spine,
                     "d_s2a": dist.spine_to_amoeba,
                     "runtime_ms": round(1e3 * (time.perf_counter() - t0), 1)})
        log.info("delta=%g holes=%d d_a2s=%.5f", delta, rep.holes, dist.amoeba_to_spine)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    wr.writeheader()
    for row in rows:
        wr.writerow({k: (f"{row[k]:.6g}" if isinstance(row[k], float) else row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def cmd_converge(args) -> int:
    cfg = ConvergeConfig(args.family, tuple(parse_floats(args.deltas)), sampling_from(args))
    rows = converge_rows(cfg)
    write_text(args.out, rows_to_csv(rows))
    if args.check_monotone:
        d = [r["d_a2s"] for r in sorted(rows, key=lambda r: -r["delta"])]
        bad = [i for i in range(1, len(d)) if d[i] > 1.05 * d[i - 1]]
        if bad:
            raise InvariantViolation("d_amoeba_to_spine increases by more than 5%", {"rows": rows})
    return 0


def cmd_fiber(args) -> int:
    check_metric(args.metric)
    r = parse_point(args.point)
    model = None
    if args.model:
        model = IsotopyMap(CutoffProfile(ProfileKind.parse(args.model), args.eps), args.t)
    if args.section:
        s = LaurentSection.from_json(read_json(args.section))
        poly, Z = s.newton_polygon(), None
        p = MomentParams(metric=args.metric or "section")
    else:
        fam = resolve_family(args.family or "cp2:1")
        s, poly = fam.section, fam.polygon
        p = fam.params(args.delta if args.delta < 1 else None, args.metric)
        Z = subdivide(poly, fam.weight) if (fam.weight is not None and model is not None) else None
    from .fibers import fiber_topology
    rep = fiber_topology(s, p, r, args.angle_grid, model=model, Z=Z, polygon=poly)
    write_text(args.out, dump_json(rep.to_json()))
    return 0


def cmd_verify_local(args) -> int:
    cfg = LocalConfig(args.model, args.eps, args.t_steps, args.grid)
    kind = ProfileKind.parse(cfg.model)
    prof = CutoffProfile(kind, cfg.eps)
    rep = certify_bounds(prof, cfg.t_steps, cfg.grid)
    out = rep.to_json()
    violations = []
    if kind is ProfileKind.PIECEWISE_MAX:
        out["y_image_t1"] = y_image_check(IsotopyMap(prof, 1.0))
        if rep.min_ratio_dx < 1 / 6 - 1e-9:
            violations.append("min ratio below 1/6")
        if rep.min_ratio_fs < 0.5 - 1e-9:
            violations.append("fs-normalized min ratio below 1/2")
        if out["y_image_t1"] > 1e-9:
            violations.append("t=1 image leaves the Y graph")
    elif kind in (ProfileKind.SMOOTHED_H, ProfileKind.OPTIMAL_B):
        sc = deviation_scaling(kind, (2 * cfg.eps, cfg.eps, cfg.eps / 2), cfg.t_steps, cfg.grid)
        out["scaling"] = sc.to_json()
        if any(not (0.3 <= q <= 3) for q in sc.halving_ratios):
            violations.append("deviation ratio per halving outside [0.3, 3]")
    else:
        img = cutoff_image_check(prof)
        out["image"] = img.to_json()
        if img.saturated_root_error > 1e-12:
            violations.append("cutoff roots differ from the line where saturated")
    write_text(args.out, dump_json(out))
    if args.csv:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=("t", "region", "normalization", "min"), lineterminator="\n")
        wr.writeheader()
        wr.writerows(rep.region_minima)
        Path(args.csv).write_text(buf.getvalue())
    if violations:
        raise InvariantViolation("; ".join(violations), out)
    return 0


def cmd_cp2(args) -> int:
    cfg = Cp2Config(args.degree, args.c_ratio, args.delta, not args.no_search, sampling_from(args))
    from .families import cp2_params
    p = cp2_params()
    if cfg.delta < 1:
        from .lattice import standard_triangle
        p = MomentParams(delta=cfg.delta, w=standard_weight(standard_triangle(cfg.degree)),
                         metric=p.metric, temper=p.temper)
    section = fermat(cfg.degree) if args.fermat else None
    res, r = run_cp2(cfg.degree, cfg.c_ratio, cfg.sampling.amoeba(), cfg.search, section, p)
    out = res.to_json()
    if args.fermat:
        out["expected_holes"] = 0
        out["ok"] = res.report.holes == 0 and all(v == 1 for v in res.report.legs.values())
    write_text(args.out, dump_json(out))
    if args.svg:
        Path(args.svg).write_text(render_svg(r.grid.polygon, raster=r))
    if not out["ok"]:
        raise InvariantViolation("hole/leg counts differ from the expected values", out)
    return 0


def cmd_render(args) -> int:
    Z = Subdivision.from_json(read_json(args.subdivision)) if args.subdivision else None
    g = SpineGraph.from_json(read_json(args.spine)) if args.spine else None
    r = AmoebaRaster.from_json(read_json(args.raster)) if args.raster else None
    if args.polygon:
        poly = LatticePolygon.from_json(read_json(args.polygon))
    elif Z is not None:
        poly = Z.polygon
    elif r is not None:
        poly = r.grid.polygon
    else:
        raise InputError("render needs --polygon, --subdivision or --raster")
    if g is None and args.with_spine and Z is not None:
        g = build_spine(Z)
    write_text(args.out, render_svg(poly, Z, g, r))
    return 0


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _global(p):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (root-finder restarts)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--verbose", "-v", action="store_true")


def _polygon_inputs(p):
    p.add_argument("--polygon", help="polygon JSON with a 'vertices' list")
    p.add_argument("--vertices", help="integer vertices 'x,y;x,y;...'")
    p.add_argument("--family", help="cp2:d, pd:d, fermat:d or hexagon")


def _sampling(p, resolution=600):
    p.add_argument("--resolution", type=int, default=resolution)
    p.add_argument("--slices", type=int, default=800)
    p.add_argument("--angles", type=int, default=64)
    p.add_argument("--dilation", type=float, default=1.5, help="dilation radius in cells")


def _section_inputs(p):
    p.add_argument("--section", help="section JSON")
    p.add_argument("--family", help="cp2:d, pd:d, fermat:d or hexagon")
    p.add_argument("--weights", help="weight JSON (default: quadratic weight)")
    p.add_argument("--delta", type=float, default=1.0,
                   help="tropical parameter; weighted families default to 1e-3")
    p.add_argument("--metric", choices=("section", "unit", "fubini_study"))
    p.add_argument("--temper", type=float, default=None)
    p.add_argument("--c-ratio", type=float, default=1e3)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global(common)
    ap = _Parser(prog="amoeba-spine", description="Amoebas, spines and local models of plane curves.",
                 parents=[common])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("polygon", parents=[common], help="lattice points and normal fan")
    _polygon_inputs(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_polygon)

    p = sub.add_parser("triangulate", parents=[common], help="regular subdivision of a weight")
    _polygon_inputs(p)
    p.add_argument("--weights")
    p.add_argument("--perturb", choices=("lex",))
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(fn=cmd_triangulate)

    p = sub.add_parser("spine", parents=[common], help="spine graph of a subdivision")
    p.add_argument("--subdivision")
    _polygon_inputs(p)
    p.add_argument("--weights")
    p.add_argument("--out", default="spine.json")
    p.add_argument("--svg")
    p.set_defaults(fn=cmd_spine)

    p = sub.add_parser("amoeba", parents=[common], help="rasterized amoeba")
    _section_inputs(p)
    _sampling(p)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(fn=cmd_amoeba)

    p = sub.add_parser("holes", parents=[common], help="holes and legs of a raster")
    p.add_argument("--raster")
    p.add_argument("--subdivision", help="enables the spine-scale resolution check")
    _section_inputs(p)
    _sampling(p)
    p.add_argument("--min-area", type=int, default=9)
    p.add_argument("--expect-spine", action="store_true", help="exit 1 unless counts match the spine")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_holes)

    p = sub.add_parser("converge", parents=[common], help="delta sweep of distances to the spine")
    p.add_argument("--family", required=True)
    p.add_argument("--deltas", default="0.3,0.1,0.03,0.01")
    _sampling(p)
    p.add_argument("--check-monotone", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("fiber", parents=[common], help="fiber topology over a point")
    p.add_argument("--section")
    p.add_argument("--family")
    p.add_argument("--point", required=True, help="'x,y' in moment coordinates")
    p.add_argument("--model", choices=("pw", "smooth", "optimal", "cutoff"))
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--metric", choices=("section", "unit", "fubini_study"))
    p.add_argument("--angle-grid", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_fiber)

    p = sub.add_parser("verify-local", parents=[common], help="certify a local model")
    p.add_argument("--model", required=True, choices=("pw", "smooth", "optimal", "cutoff"))
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--t-steps", type=int, default=11)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out")
    p.add_argument("--csv", help="per-region minima")
    p.set_defaults(fn=cmd_verify_local)

    p = sub.add_parser("cp2", parents=[common], help="holes and legs of the CP^2 family p_d")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--c-ratio", type=float, default=1e3)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--no-search", action="store_true", help="skip the c-ratio doubling search")
    p.add_argument("--fermat", action="store_true", help="use z1^d + z2^d + z3^d instead")
    _sampling(p)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(fn=cmd_cp2)

    p = sub.add_parser("render", parents=[common], help="SVG of stored artifacts")
    p.add_argument("--polygon")
    p.add_argument("--subdivision")
    p.add_argument("--spine")
    p.add_argument("--raster")
    p.add_argument("--with-spine", action="store_true", help="draw the spine of the subdivision")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_render)
    return ap


def dispatch(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except InvariantViolation as exc:
        sys.stderr.write(dump_json({"error": str(exc), "type": type(exc).__name__, "witness": exc.witness}))
        return 1
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except AmoebaError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(dispatch())
