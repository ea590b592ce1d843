"""Hexagon example: subdivision, spine, amoeba at small delta and an overlay picture.

    python3 scripts/hexagon.py --delta 1e-3 --out runs/hexagon
"""
import argparse
import json
from pathlib import Path

from amoeba_spine.families import hexagon_section
from amoeba_spine.moment import MomentParams
from amoeba_spine.render import render_svg
from amoeba_spine.sampler import AmoebaConfig, amoeba_raster, count_holes, hausdorff_to_spine
from amoeba_spine.spine import bounded_faces, build_spine, legs_per_polygon_edge
from amoeba_spine.subdivision import subdivide


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--delta", type=float, default=1e-3)
    ap.add_argument("--resolution", type=int, default=600)
    ap.add_argument("--out", type=Path, default=Path("runs/hexagon"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    P, w, s = hexagon_section()
    Z = subdivide(P, w)
    g = build_spine(Z)
    r = amoeba_raster(s, MomentParams(delta=args.delta, w=w), AmoebaConfig(resolution=args.resolution), P)
    rep = count_holes(r, spine=g)
    dist = hausdorff_to_spine(r, g)
    summary = {"holes": rep.holes, "legs": {str(k): v for k, v in rep.legs.items()},
               "spine_faces": bounded_faces(g),
               "spine_legs": {str(k): v for k, v in legs_per_polygon_edge(g, P).items()},
               "distance": dist.to_json()}
    print(json.dumps(summary, indent=2, sort_keys=True))
    (args.out / "subdivision.json").write_text(json.dumps(Z.to_json(), indent=2, sort_keys=True))
    (args.out / "spine.json").write_text(json.dumps(g.to_json(), indent=2, sort_keys=True))
    (args.out / "overlay.svg").write_text(render_svg(P, Z, g, r, title="hexagon"))


if __name__ == "__main__":
    main()
