"""Command line front end: ``mirrorfan <command> [options]``.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for unreadable input or bad options.  Reports are canonical JSON (sorted
keys, rationals as "p/q" strings) carrying a ``schema_version``.

Fan and polytope arguments accept a file path or the name of a bundled
fixture (``p2``, ``a2_mod_z2z2``, ...).  Relative output paths are resolved
against ``$MIRRORFAN_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

SCHEMA_VERSION = "1"
FIXTURES = ("a1", "a2", "p1", "p2", "stacky_skeleton", "a2_mod_z2z2", "triangle_polytope")


class InputError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


def canonical(obj) -> object:
    """Recursively convert to JSON-ready values with rationals as "p/q"."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):  # numpy scalars
        return canonical(obj.item())
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(canonical(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("mirrorfan") / "data" / f"{name}.json"))


def load_fixture(name: str):
    """A bundled fan (or, for ``triangle_polytope``, a LatticePolytope) by name."""
    from .fan import StackyFan
    from .polyhedra import LatticePolytope

    data = json.loads(fixture_path(name).read_text())
    if "vertices" in data:
        return LatticePolytope.from_points(data["vertices"])
    return StackyFan.from_dict(data)


def _read_json(arg: str) -> dict:
    path = Path(arg)
    if not path.exists() and arg in FIXTURES:
        path = fixture_path(arg)
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file or fixture: {arg}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: invalid JSON ({exc})")


def _load_fan(arg: str):
    from .fan import MalformedFan, StackyFan

    try:
        return StackyFan.from_dict(_read_json(arg))
    except MalformedFan as exc:
        raise InputError(str(exc))


def _certificate(fan, arg: Optional[str]):
    from .fan import MalformedFan, PLFunction, is_quasiprojective

    if arg:
        try:
            return PLFunction.from_dict(_read_json(arg))
        except MalformedFan as exc:
            raise InputError(str(exc))
    result = is_quasiprojective(fan)
    if not result.regular:
        raise CheckFailed({"quasiprojective": False, "witness": result.witness}, "fan is not quasiprojective")
    return result.certificate


def _cone_arg(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(sorted(int(x) for x in text.split(",")))
    except ValueError:
        raise InputError(f"bad cone {text!r}: use comma-separated ray indices")


def _out_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get("MIRRORFAN_OUTPUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


# -- commands -------------------------------------------------------------------


def cmd_fan_check(args) -> tuple[dict, bool, Optional[str]]:
    from .fan import NotATriangulation, check_triangulation, is_quasiprojective, validate

    fan = _load_fan(args.fan)
    report = {"fan": fan.to_dict(), **validate(fan).to_dict()}
    ok = report["valid"]
    if ok:
        try:
            check_triangulation(fan)
        except NotATriangulation as exc:
            report["star_triangulation"] = str(exc)
        else:
            report["star_triangulation"] = "ok"
            qp = is_quasiprojective(fan)
            report["quasiprojective"] = qp.regular
            report["certificate"] = qp.certificate.to_dict() if qp.certificate else None
            report["witness"] = qp.witness
    return report, ok, None


def cmd_fan_from_polytope(args):
    from .fan import OriginOutside, knutson_construct

    data = _read_json(args.polytope)
    try:
        verts = [tuple(int(x) for x in p) for p in data["vertices"]]
        extra = [tuple(int(x) for x in p) for p in data.get("facet_points", [])]
        fan, v = knutson_construct(verts, extra)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, OriginOutside):
            raise InputError(str(exc))
        raise InputError(f"bad polytope: {exc}")
    return {"fan": fan.to_dict(), "certificate": v.to_dict()}, True, None


def cmd_spine(args):
    from .spine import bounded_component, dual_complex, poset_antiequivalence, spine_svg

    fan = _load_fan(args.fan)
    v = _certificate(fan, args.certificate)
    dc = dual_complex(fan, v)
    region = bounded_component(dc)
    anti = poset_antiequivalence(fan, region)
    report = {"certificate": v.to_dict(), "complex": dc.to_dict(), "region": region.to_dict(),
              "antiequivalence": anti.to_dict()}
    ok = anti.ok or not region.bounded
    svg = spine_svg(dc, region=region) if args.svg and fan.rank == 2 else None
    return report, ok, svg


def cmd_skeleton(args):
    from .skeleton import build_skeleton, render_skeleton_2d, sector_cover

    fan = _load_fan(args.fan)
    graph = build_skeleton(fan)
    cover = sector_cover(fan)
    report = {"skeleton": graph.to_dict(),
              "counts": [{"cone": list(c), "components": k} for c, k in sorted(graph.counts().items())],
              "sector_cover": cover.to_dict()}
    svg = render_skeleton_2d(graph) if args.svg and fan.rank == 2 else None
    return report, cover.ok, svg


def cmd_bondal_homs(args):
    from .bondal import hom_graded

    fan = _load_fan(args.fan)
    s, t = _cone_arg(args.source), _cone_arg(args.target)
    if not fan.has_cone(s) or not fan.has_cone(t):
        raise InputError("source and target must be cones of the fan")
    hom = hom_graded(fan, args.side, s, t, args.box)
    return hom.to_dict(), True, None


def cmd_bondal_verify(args):
    from .bondal import localization_support_ok, square_commutes, verify_pairs

    fan = _load_fan(args.fan)
    pairs = verify_pairs(fan, args.box)
    squares = []
    for s in fan.cones:
        for t in fan.cones:
            if set(s) <= set(t):
                squares.append({"sigma": list(s), "tau": list(t),
                                "commutes": square_commutes(fan, s, t, args.box),
                                "support_ok": localization_support_ok(fan, s, t, args.box)})
    ok = pairs.ok and all(x["commutes"] and x["support_ok"] for x in squares)
    return {"box": args.box, "pairs": pairs.objects, "squares": squares, "ok": ok}, ok, None


def cmd_boundary_verify(args):
    from .bondal import boundary_diagram
    from .fan import boundary_cover

    fan = _load_fan(args.fan)
    cover = boundary_cover(fan)
    diagram = boundary_diagram(fan, args.box)
    ok = cover.intersection_law and diagram.ok
    return {"box": args.box, "cover": cover.to_dict(), "diagram": diagram.to_dict(), "ok": ok}, ok, None


def cmd_amoeba(args):
    from .amoeba import (NoBoundedComponent, complement_components, patchwork, sample_amoeba,
                         skeleton_over_boundary, spine_distance)
    from .spine import bounded_component, dual_complex

    fan = _load_fan(args.fan)
    if fan.rank not in (1, 2):
        raise InputError("amoeba sampling supports rank 1 and 2")
    if args.t <= 1:
        raise InputError("--t must exceed 1")
    v = _certificate(fan, args.certificate)
    dc = dual_complex(fan, v)
    window = (-args.window, args.window)
    W = patchwork(fan, v, args.t)
    s = sample_amoeba(W, window, args.resolution, args.seed)
    report = {"polynomial": W.to_dict(), "sample": s.to_dict()}
    ok = True
    if fan.rank == 2:
        report["spine_distance"] = spine_distance(s, dc)
        comps = complement_components(s, resolution=args.resolution)
        report["complement"] = comps.to_dict()
        expected = 1 if bounded_component(dc).bounded else 0
        ok = comps.bounded == expected
    try:
        over = skeleton_over_boundary(s, fan, dc, resolution=args.resolution, tolerance=args.tolerance)
    except NoBoundedComponent as exc:
        report["skeleton_over_boundary"] = {"error": str(exc)}
    else:
        report["skeleton_over_boundary"] = over
        ok = ok and over["matched"] == len(over["faces"])
    svg = _amoeba_svg(s, dc, window) if args.svg and fan.rank == 2 else None
    return report, ok, svg


def _amoeba_svg(s, dc, window, size: int = 500) -> str:
    from .spine import spine_segments

    lo, hi = window
    scale = size / (hi - lo)

    def xy(p):
        return (float(p[0]) - lo) * scale, (hi - float(p[1])) * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             '<g class="samples" fill="#4477aa">']
    step = max(1, len(s.points) // 20000)
    for p in s.points[::step]:
        x, y = xy(p)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="0.6"/>')
    parts.append('</g><g class="spine" stroke="black" stroke-width="1">')
    for a, b in spine_segments(dc, window):
        (x1, y1), (x2, y2) = xy(a), xy(b)
        parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>')
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


COMMANDS = {
    "fan-check": cmd_fan_check,
    "fan-from-polytope": cmd_fan_from_polytope,
    "spine": cmd_spine,
    "skeleton": cmd_skeleton,
    "bondal-homs": cmd_bondal_homs,
    "bondal-verify": cmd_bondal_verify,
    "boundary-verify": cmd_boundary_verify,
    "amoeba": cmd_amoeba,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report on stdout")
    common.add_argument("--svg", metavar="PATH", help="write an SVG drawing (rank 2 only)")
    common.add_argument("--quiet", action="store_true", help="suppress the summary line")
    common.add_argument("--out", metavar="PATH", help="write the JSON report to a file")

    parser = _Parser(prog="mirrorfan", description="Stacky fans, spines, skeleta and amoebas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fan_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("fan", help="fan JSON file or bundled fixture name")
        return p

    fan_cmd("fan-check", "validate a fan and decide quasiprojectivity")
    p = sub.add_parser("fan-from-polytope", parents=[common], help="build a fan from a lattice polytope")
    p.add_argument("polytope")
    p = fan_cmd("spine", "dual complex, bounded region and face correspondence")
    p.add_argument("--certificate", help="PL function JSON (default: computed)")
    fan_cmd("skeleton", "skeleton strata and the sector cover check")
    p = fan_cmd("bondal-homs", "graded hom support between two cones")
    p.add_argument("--side", choices=("A", "B"), default="A")
    p.add_argument("--source", required=True, help="cone as comma-separated ray indices ('' for the zero cone)")
    p.add_argument("--target", required=True)
    p.add_argument("--box", type=int, default=2)
    p = fan_cmd("bondal-verify", "compare both hom computations on every cone pair")
    p.add_argument("--box", type=int, default=4)
    p = fan_cmd("boundary-verify", "boundary cover and diagram matching")
    p.add_argument("--box", type=int, default=4)
    p = fan_cmd("amoeba", "sample the patchworked amoeba and compare with the spine")
    p.add_argument("--certificate")
    p.add_argument("--t", type=float, default=64.0)
    p.add_argument("--window", type=float, default=6.0, help="half-width of the square window")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=0.15)
    return parser


def _validate(args) -> None:
    for name in ("box", "resolution"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            raise InputError(f"--{name} must be nonnegative")
    if getattr(args, "resolution", 16) < 16:
        raise InputError("--resolution must be at least 16")
    if getattr(args, "window", 1.0) <= 0:
        raise InputError("--window must be positive")


def main(argv: Optional[Sequence[str]] = None) -> int:
    from .fan import NotATriangulation, OriginOutside

    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        try:
            report, ok, svg = COMMANDS[args.command](args)
        except (NotATriangulation, OriginOutside) as exc:
            raise InputError(str(exc))
    except InputError as exc:
        print(f"mirrorfan: error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        report, ok, svg = exc.report, False, None
        print(f"mirrorfan: {exc}", file=sys.stderr)
    report = {"command": args.command, "ok": bool(ok), "schema_version": SCHEMA_VERSION, "report": report}
    text = dumps(report)
    if args.out:
        _out_path(args.out).write_text(text, encoding="utf-8")
    if args.svg and svg is not None:
        _out_path(args.svg).write_text(svg, encoding="utf-8")
    if args.json:
        sys.stdout.write(text)
    elif not args.quiet:
        print(f"{args.command}: {'ok' if ok else 'FAILED'}")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
