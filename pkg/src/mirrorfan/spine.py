"""Legendre transforms of PL lifts and the dual complex (tropical spine)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .fan import PLFunction, StackyFan, certifies, check_triangulation, triangulation_vertices
from .polyhedra import Polyhedron, dot


class WrongCertificate(ValueError):
    """The PL function does not induce the fan's triangulation."""


def legendre(v: PLFunction, m: Sequence) -> tuple[Fraction, tuple]:
    """max over lift vertices n of <m, n> - v(n), with the sorted argmax set."""
    vals = {p: dot(m, p) - val for p, val in v.values.items()}
    best = max(vals.values())
    return Fraction(best), tuple(sorted(p for p, x in vals.items() if x == best))


def simplices(fan: StackyFan) -> list[tuple]:
    """Every simplex of the star triangulation, as sorted tuples of lattice points."""
    zero = tuple([0] * fan.rank)
    out = set()
    for c in fan.cones:
        pts = fan.stacky_primitives(c)
        out.add(tuple(sorted([zero] + pts)))
        if c:
            out.add(tuple(sorted(pts)))
    return sorted(out, key=lambda s: (len(s), s))


def _cone_label(fan: StackyFan, simplex: tuple) -> tuple:
    zero = tuple([0] * fan.rank)
    lookup = {r.stacky: i for i, r in enumerate(fan.rays)}
    cone = tuple(sorted(lookup[p] for p in simplex if p != zero))
    return ("star" if zero in simplex else "outer", cone)


def argmax_region(v: PLFunction, simplex: Sequence, n: int) -> Polyhedron:
    """Closure of {m : the Legendre argmax is exactly ``simplex``}."""
    first = simplex[0]
    eqs = []
    for p in simplex[1:]:
        # <m, p> - v(p) == <m, first> - v(first)
        a = tuple(x - y for x, y in zip(p, first))
        eqs.append((a, v(p) - v(first)))
    ineqs = []
    for q in v.values:
        if q in simplex:
            continue
        a = tuple(x - y for x, y in zip(q, first))
        ineqs.append((a, v(q) - v(first)))
    return Polyhedron.build(ineqs, eqs, n)


@dataclass(frozen=True)
class Cell:
    simplex: tuple
    label: tuple
    polyhedron: Polyhedron

    @property
    def dim(self) -> int:
        return self.polyhedron.dim

    def to_dict(self) -> dict:
        return {
            "label": [self.label[0], list(self.label[1])],
            "simplex": [list(p) for p in self.simplex],
            "dim": self.dim,
            "vertices": [[_q(x) for x in p] for p in self.polyhedron.vertices],
            "rays": [list(r) for r in self.polyhedron.recession_rays],
        }


def _q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class DualComplex:
    fan: StackyFan
    v: PLFunction
    cells: list

    @property
    def rank(self) -> int:
        return self.fan.rank

    def incidence(self) -> list[tuple[int, int]]:
        """Pairs (i, j) with cell i in the closure of cell j, i != j."""
        out = []
        for i, a in enumerate(self.cells):
            for j, b in enumerate(self.cells):
                if i != j and set(a.simplex) > set(b.simplex):
                    out.append((i, j))
        return out

    def to_dict(self) -> dict:
        return {"rank": self.rank, "cells": [c.to_dict() for c in self.cells]}


def dual_complex(fan: StackyFan, v: PLFunction) -> DualComplex:
    check_triangulation(fan)
    if set(v.values) != set(triangulation_vertices(fan)):
        raise WrongCertificate("PL function is not defined exactly on the triangulation vertices")
    if not certifies(fan, v):
        raise WrongCertificate("PL function is not strictly convex across every wall")
    n = fan.rank
    cells = []
    for s in simplices(fan):
        if len(s) < 2:
            continue
        poly = argmax_region(v, s, n)
        if poly.dim != n - (len(s) - 1):
            raise WrongCertificate(f"cell dual to {s} has dimension {poly.dim}")
        cells.append(Cell(s, _cone_label(fan, s), poly))
    return DualComplex(fan, v, cells)


@dataclass
class BoundedRegion:
    """The component of the spine complement around the origin's vertex.

    ``faces`` maps each proper face (as a Polyhedron) to the nonzero cone it
    is dual to, or None when the argmax pattern at its relative interior is
    not of the form {0} ∪ stacky primitives of a cone.
    """

    polytope: Polyhedron
    bounded: bool
    faces: list

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "vertices": [[_q(x) for x in p] for p in self.polytope.vertices],
            "rays": [list(r) for r in self.polytope.recession_rays],
            "faces": [{"dim": f.dim, "cone": None if c is None else list(c)} for f, c in self.faces],
        }


def bounded_component(dc: DualComplex) -> BoundedRegion:
    """{m : argmax of the Legendre transform contains the origin}.

    When the origin is a boundary point of the lift polytope the region is
    unbounded; it is still returned, with ``bounded`` set to False.
    """
    n = dc.rank
    zero = tuple([0] * n)
    v = dc.v
    if zero not in v.values:
        raise ValueError("the origin must be a triangulation vertex")
    ineqs = [(q, v(q) - v(zero)) for q in v.values if q != zero]
    poly = Polyhedron.build(ineqs, [], n)
    lookup = {r.stacky: i for i, r in enumerate(dc.fan.rays)}
    faces = []
    for f in poly.faces():
        if f.dim == n:
            continue
        _, arg = legendre(v, f.relative_interior_point())
        cone = None
        if zero in arg and all(p in lookup for p in arg if p != zero):
            cand = tuple(sorted(lookup[p] for p in arg if p != zero))
            cone = cand if cand and dc.fan.has_cone(cand) else None
        faces.append((f, cone))
    return BoundedRegion(poly, poly.is_bounded, faces)


@dataclass
class AntiEquivalenceReport:
    ok: bool
    matches: list
    unmatched_faces: list
    unmatched_cones: list
    order_violations: list

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "matches": [{"face_dim": d, "cone": list(c)} for d, c in self.matches],
            "unmatched_faces": self.unmatched_faces,
            "unmatched_cones": [list(c) for c in self.unmatched_cones],
            "order_violations": self.order_violations,
        }


def poset_antiequivalence(fan: StackyFan, region: BoundedRegion) -> AntiEquivalenceReport:
    """Check that proper faces of the region correspond, order-reversingly, to nonzero cones."""
    faces = [(f, c) for f, c in region.faces if f.dim >= 0]
    matches = [(f.dim, c) for f, c in faces if c is not None]
    unmatched_faces = [{"dim": f.dim, "point": [_q(x) for x in f.relative_interior_point()]} for f, c in faces if c is None]
    seen = [c for _, c in matches]
    unmatched_cones = [c for c in fan.nonzero_cones if c not in seen]
    dup = len(set(seen)) != len(seen)
    violations = []
    n = fan.rank
    for f, c in faces:
        if c is None:
            continue
        if f.dim + len(c) != n:
            violations.append({"cone": list(c), "face_dim": f.dim, "reason": "dimension"})
    for f, c in faces:
        for g, d in faces:
            if c is None or d is None or f is g:
                continue
            face_le = all(g.contains(p) for p in f.vertices) and f.dim < g.dim
            if face_le != (set(c) > set(d)):
                violations.append({"cones": [list(c), list(d)], "reason": "order"})
    ok = region.bounded and not unmatched_faces and not unmatched_cones and not dup and not violations
    return AntiEquivalenceReport(ok, sorted(matches), unmatched_faces, unmatched_cones, violations)


def spine_svg(dc: DualComplex, window: tuple = (-4, 4), region: Optional[BoundedRegion] = None, size: int = 400) -> str:
    """SVG drawing of a rank-2 spine clipped to a square window."""
    if dc.rank != 2:
        raise ValueError("SVG output is only available for rank 2")
    lo, hi = window
    scale = size / (hi - lo)

    def xy(p):
        return (float(p[0]) - lo) * scale, (hi - float(p[1])) * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    if region is not None and region.bounded:
        pts = _ordered_polygon(region.polytope.vertices)
        path = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, pts))
        parts.append(f'<polygon points="{path}" fill="#dddddd" stroke="none"/>')
    for a, b in spine_segments(dc, window):
        (x1, y1), (x2, y2) = xy(a), xy(b)
        parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" stroke="black" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def spine_segments(dc: DualComplex, window: tuple) -> list[tuple]:
    """Edges of a rank-2 spine as float segments; unbounded rays are cut at the window."""
    lo, hi = window
    reach = 2 * (hi - lo) + max(abs(lo), abs(hi))
    out = []
    for cell in dc.cells:
        if cell.dim != 1:
            continue
        verts = cell.polyhedron.vertices
        rays = cell.polyhedron.recession_rays
        if len(verts) == 2:
            out.append((tuple(map(float, verts[0])), tuple(map(float, verts[1]))))
        elif len(verts) == 1 and rays:
            p = tuple(map(float, verts[0]))
            r = rays[0]
            norm = max(abs(x) for x in r)
            q = tuple(x + reach * y / norm for x, y in zip(p, r))
            out.append((p, q))
        elif not verts and cell.polyhedron.homogenized.lineality:
            # a full line (only for degenerate lifts)
            p = tuple(map(float, cell.polyhedron.relative_interior_point()))
            r = cell.polyhedron.homogenized.lineality[0][:-1]
            norm = max(abs(x) for x in r)
            out.append((tuple(x - reach * y / norm for x, y in zip(p, r)), tuple(x + reach * y / norm for x, y in zip(p, r))))
    return out


def _ordered_polygon(vertices):
    import math

    cx = sum(float(p[0]) for p in vertices) / len(vertices)
    cy = sum(float(p[1]) for p in vertices) / len(vertices)
    return sorted(vertices, key=lambda p: math.atan2(float(p[1]) - cy, float(p[0]) - cx))
