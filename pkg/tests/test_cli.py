import json
import os
from pathlib import Path

import pytest

from mirrorfan.cli import canonical, dumps, main

GOLDEN = Path(__file__).parent / "golden"

RUNS = {
    "fan_check_p2": ["fan-check", "p2"],
    "fan_check_stacky": ["fan-check", "stacky_skeleton"],
    "fan_from_polytope": ["fan-from-polytope", "triangle_polytope"],
    "spine_p2": ["spine", "p2"],
    "spine_a2": ["spine", "a2"],
    "skeleton_orbifold": ["skeleton", "a2_mod_z2z2"],
    "bondal_homs_a2": ["bondal-homs", "a2", "--source", "0,1", "--target", "0", "--box", "1"],
    "bondal_verify_p2": ["bondal-verify", "p2", "--box", "4"],
    "boundary_verify_p2": ["boundary-verify", "p2", "--box", "2"],
    "boundary_verify_orbifold": ["boundary-verify", "a2_mod_z2z2", "--box", "2"],
    "amoeba_p1": ["amoeba", "p1"],
    "amoeba_p2": ["amoeba", "p2", "--resolution", "64", "--t", "16"],
}


def run(args, tmp_path):
    out = tmp_path / "report.json"
    code = main(list(args) + ["--quiet", "--out", str(out)])
    return code, out.read_text(encoding="utf-8")


@pytest.mark.parametrize("name", sorted(RUNS))
def test_golden_reports(name, tmp_path):
    code, text = run(RUNS[name], tmp_path)
    golden = GOLDEN / f"{name}.json"
    if os.environ.get("MIRRORFAN_REGEN_GOLDEN"):
        golden.write_text(text, encoding="utf-8")
    assert text == golden.read_text(encoding="utf-8")
    report = json.loads(text)
    assert report["schema_version"] == "1"
    assert code == (0 if report["ok"] else 1)


@pytest.mark.parametrize("name", ["fan_check_p2", "skeleton_orbifold", "amoeba_p2"])
def test_idempotent(name, tmp_path):
    assert run(RUNS[name], tmp_path) == run(RUNS[name], tmp_path)


def test_exit_codes(tmp_path, capsys):
    assert main(["fan-check", "p2", "--quiet"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "rank": 2,
        "rays": [{"primitive": p, "stacky": p} for p in ([1, 0], [0, 1], [1, 2])],
        "maximal_cones": [[0, 1], [1, 2]],
    }))
    assert main(["fan-check", str(bad), "--json"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["report"]["violations"] == [{"cones": [[0, 1], [1, 2]], "kind": "face-intersection"}]
    assert main(["fan-check", str(tmp_path / "missing.json")]) == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert main(["skeleton", str(garbage)]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["bondal-homs", "p2", "--source", "0,2", "--target", "x"]) == 2
    assert main(["amoeba", "p2", "--resolution", "8"]) == 2
    assert main(["bondal-verify", "p2", "--box", "4", "--quiet"]) == 0


def test_bondal_verify_lists_all_pairs(capsys):
    assert main(["bondal-verify", "p2", "--box", "4", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)["report"]
    assert len(report["pairs"]) == 49


def test_svg_output(tmp_path, monkeypatch):
    monkeypatch.setenv("MIRRORFAN_OUTPUT_DIR", str(tmp_path))
    assert main(["spine", "p2", "--svg", "spine.svg", "--quiet"]) == 0
    assert (tmp_path / "spine.svg").read_text().startswith("<svg")
    assert main(["skeleton", "stacky_skeleton", "--svg", "skel.svg", "--quiet"]) == 0
    assert "corner" in (tmp_path / "skel.svg").read_text()


def test_polytope_with_origin_outside(tmp_path):
    p = tmp_path / "poly.json"
    p.write_text(json.dumps({"vertices": [[1, 1], [2, 1], [1, 2]]}))
    assert main(["fan-from-polytope", str(p), "--quiet"]) == 2


def test_canonical_serialization():
    from fractions import Fraction

    assert canonical({"b": Fraction(1, 2), "a": [1.0, 2]}) == {"b": "1/2", "a": [1.0, 2]}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_load_fixture_returns_fans_and_polytopes():
    from mirrorfan import StackyFan, LatticePolytope, load_fixture

    assert isinstance(load_fixture("p2"), StackyFan)
    assert isinstance(load_fixture("triangle_polytope"), LatticePolytope)
