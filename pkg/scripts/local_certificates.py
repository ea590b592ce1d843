"""Pullback-ratio certificates and deviation scaling for the local line models.

    python3 scripts/local_certificates.py --grid 200 --t-steps 11
"""
import argparse
import json
import time

from amoeba_spine.local_models import (CutoffProfile, IsotopyMap, ProfileKind, certify_bounds, cutoff_image_check,
                                       deviation_scaling, y_image_check)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--t-steps", type=int, default=11)
    ap.add_argument("--eps", type=float, default=0.1)
    args = ap.parse_args()
    t0 = time.perf_counter()
    out = {}
    for kind in ProfileKind:
        rep = certify_bounds(CutoffProfile(kind, args.eps), args.t_steps, args.grid)
        out[kind.value] = {"min_ratio_dx": rep.min_ratio_dx, "min_ratio_fs": rep.min_ratio_fs,
                           "min_ratio_fs_all": rep.min_ratio_fs_all, "max_deviation": rep.max_deviation,
                           "fd_max_error": rep.fd_max_error}
    pw = CutoffProfile(ProfileKind.PIECEWISE_MAX)
    out["y_image"] = {str(t): y_image_check(IsotopyMap(pw, t)) for t in (0.0, 0.5, 1.0)}
    for kind in (ProfileKind.SMOOTHED_H, ProfileKind.OPTIMAL_B):
        out[f"scaling_{kind.value}"] = deviation_scaling(kind, (0.2, 0.1, 0.05), args.t_steps, args.grid).to_json()
    out["cutoff_image"] = cutoff_image_check(CutoffProfile(ProfileKind.GAMMA_EPS, 0.05)).to_json()
    out["runtime_s"] = time.perf_counter() - t0
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
