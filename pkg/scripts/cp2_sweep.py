"""Holes and legs of p_d for a range of degrees, plus SVG pictures.

    python3 scripts/cp2_sweep.py --degrees 1-5 --out runs/cp2
"""
import argparse
import json
from pathlib import Path

from amoeba_spine.families import fermat, run_cp2
from amoeba_spine.render import render_svg
from amoeba_spine.sampler import AmoebaConfig


def degrees(text):
    a, _, b = text.partition("-")
    return range(int(a), int(b or a) + 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--degrees", type=degrees, default=degrees("1-5"))
    ap.add_argument("--c-ratio", type=float, default=1e3)
    ap.add_argument("--resolution", type=int, default=600)
    ap.add_argument("--slices", type=int, default=800)
    ap.add_argument("--fermat", action="store_true", help="run the single-cell control instead")
    ap.add_argument("--out", type=Path, default=Path("runs/cp2"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    cfg = AmoebaConfig(args.resolution, args.slices)
    print("degree,holes,expected,legs,ok,runtime_s")
    for d in args.degrees:
        sec = fermat(d) if args.fermat else None
        res, r = run_cp2(d, args.c_ratio, cfg, search=not args.fermat, section=sec)
        tag = f"{'fermat' if args.fermat else 'pd'}{d}"
        (args.out / f"{tag}.json").write_text(json.dumps(res.to_json(), indent=2, sort_keys=True))
        (args.out / f"{tag}.svg").write_text(render_svg(r.grid.polygon, raster=r, title=tag))
        exp = 0 if args.fermat else res.expected_holes
        legs = "/".join(str(v) for v in res.report.legs.values())
        print(f"{d},{res.report.holes},{exp},{legs},{res.report.holes == exp},{res.runtime_s:.2f}")


if __name__ == "__main__":
    main()
