import json

import pytest

from amoeba_spine.cli import CSV_COLUMNS, dispatch
from amoeba_spine.families import standard_family
from amoeba_spine.lattice import enumerate_points, standard_triangle
from amoeba_spine.moment import MomentParams
from amoeba_spine.render import render_svg
from amoeba_spine.sampler import AmoebaConfig, AmoebaRaster, amoeba_raster
from amoeba_spine.spine import SpineGraph, build_spine
from amoeba_spine.subdivision import Subdivision, standard_weight, subdivide

HEX = "1,0;4,0;4,1;2,3;0,3;0,1"
FAST = ["--resolution", "160", "--slices", "240", "--angles", "32"]


def test_svg_is_deterministic_and_layered():
    P, w, s = standard_family(2)
    Z = subdivide(P, w)
    g = build_spine(Z)
    p = MomentParams(delta=1e-2, w=w)
    r1 = amoeba_raster(s, p, AmoebaConfig(100, 120, 16, threads=1), P)
    r2 = amoeba_raster(s, p, AmoebaConfig(100, 120, 16, threads=4), P)
    a = render_svg(P, Z, g, r1)
    assert a == render_svg(P, Z, g, r2)
    order = [a.index(k) for k in ('id="amoeba"', 'id="subdivision"', 'id="polygon"', 'id="spine"')]
    assert order == sorted(order)


def test_svg_rejects_mismatched_layers():
    P = standard_triangle(2)
    Z = subdivide(standard_triangle(3), standard_weight(standard_triangle(3)))
    with pytest.raises(ValueError):
        render_svg(P, subdivision=Z)


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_polygon_command(capsys):
    code, out, _ = run(capsys, "polygon", "--vertices", HEX)
    assert code == 0
    data = json.loads(out)
    assert data["interior_count"] == 5 and len(data["fan"]["rays"]) == 6


def test_usage_and_input_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "polygon", "--vertices", "0,0;2,0;1,1;2,2;0,2")[0] == 2
    assert run(capsys, "holes", "--raster", "/no/such/file.json")[0] == 2
    assert run(capsys, "amoeba", "--family", "cp2:0")[0] == 2


def test_triangulate_spine_render_round_trip(tmp_path, capsys):
    z, sp, svg = tmp_path / "Z.json", tmp_path / "spine.json", tmp_path / "out.svg"
    assert run(capsys, "triangulate", "--family", "hexagon", "--out", str(z))[0] == 0
    Z = Subdivision.from_json(json.loads(z.read_text()))
    assert Z.all_unimodular
    assert run(capsys, "spine", "--subdivision", str(z), "--out", str(sp), "--svg", str(svg))[0] == 0
    data = json.loads(sp.read_text())
    assert data["bounded_faces"] == 5
    assert SpineGraph.from_json(data) == build_spine(Z)
    assert svg.read_text().startswith("<?xml")
    code, out, _ = run(capsys, "render", "--subdivision", str(z), "--with-spine")
    assert code == 0 and out == svg.read_text()


def test_amoeba_and_holes(tmp_path, capsys):
    r = tmp_path / "r.json"
    assert run(capsys, "amoeba", "--family", "cp2:1", *FAST, "--out", str(r))[0] == 0
    raster = AmoebaRaster.from_json(json.loads(r.read_text()))
    assert raster.resolution == 160
    code, out, _ = run(capsys, "holes", "--raster", str(r))
    assert code == 0
    assert json.loads(out)["holes"] == 0


def test_holes_mismatch_exits_one(tmp_path, capsys):
    # degree 3 at delta = 1 has no hole, but its spine has one
    code, _, err = run(capsys, "holes", "--family", "cp2:3", "--delta", "0.999", *FAST, "--expect-spine")
    assert code == 1
    assert json.loads(err)["type"] == "InvariantViolation"


def test_converge_csv(capsys):
    code, out, _ = run(capsys, "converge", "--family", "cp2:2", "--deltas", "0.1,0.01", *FAST)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 3


def test_fiber_and_verify_local(tmp_path, capsys):
    code, out, _ = run(capsys, "fiber", "--family", "cp2:1", "--point", "0.2,0.4", "--model", "pw")
    assert code == 0 and json.loads(out)["kind"] == "Circles"
    csv = tmp_path / "m.csv"
    code, out, _ = run(capsys, "verify-local", "--model", "pw", "--t-steps", "3", "--grid", "30", "--csv", str(csv))
    assert code == 0
    assert json.loads(out)["min_ratio_dx"] >= 1 / 6 - 1e-9
    assert csv.read_text().startswith("t,region,normalization,min")


def test_cp2_fermat(capsys):
    code, out, _ = run(capsys, "cp2", "--degree", "2", "--fermat", *FAST)
    assert code == 0
    assert json.loads(out)["report"]["holes"] == 0
