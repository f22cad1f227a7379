"""The FLTZ conic Lagrangian of a stacky fan, stored combinatorially.

For a cone with stacky primitives B, the subgroup
``G = {g in R^n/Z^n : <b, g> in Z for b in B}`` is a possibly disconnected
subtorus.  Writing the Smith form ``U B V = D``, the substitution
``g = U^T d`` turns the conditions into ``D_i d_i in Z``, so components are
labelled by residues ``a_i mod D_i`` and have the representative
``U^T (a_1/D_1, ..., a_r/D_r, 0, ..., 0) mod 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Optional, Sequence

from .fan import StackyFan, quotient_fan, wedge
from .lattice import columns_to_matrix, quotient_group, smith_normal_form, unimodular_inverse
from .polyhedra import dot


def _frac_mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class ComponentGroup:
    """Component data of G for a list of stacky primitives in rank n."""

    n: int
    divisors: tuple  # nonzero SNF divisors, in order
    U: tuple

    @classmethod
    def of(cls, gens: Sequence[Sequence[int]], n: int) -> "ComponentGroup":
        if not gens:
            return cls(n, (), tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
        snf = smith_normal_form(columns_to_matrix(gens, n))
        return cls(n, tuple(d for d in snf.divisors if d), snf.U)

    @property
    def order(self) -> int:
        return prod(self.divisors) if self.divisors else 1

    @property
    def torus_dim(self) -> int:
        return self.n - len(self.divisors)

    def labels(self) -> list[tuple]:
        return list(itertools.product(*(range(d) for d in self.divisors)))

    def representative(self, label: Sequence[int]) -> tuple:
        delta = [Fraction(a, d) for a, d in zip(label, self.divisors)] + [Fraction(0)] * (self.n - len(self.divisors))
        return tuple(_frac_mod1(sum(self.U[j][i] * delta[j] for j in range(self.n))) for i in range(self.n))

    @cached_property
    def _uinv_t(self):
        uinv = unimodular_inverse([list(r) for r in self.U])
        return [[uinv[j][i] for j in range(self.n)] for i in range(self.n)]

    def label_of(self, point: Sequence) -> Optional[tuple]:
        """Component label of a torus point, or None if the point is not in G."""
        delta = [sum(Fraction(self._uinv_t[i][j]) * Fraction(point[j]) for j in range(self.n)) for i in range(self.n)]
        out = []
        for d, x in zip(self.divisors, delta):
            y = d * x
            if y.denominator != 1:
                return None
            out.append(int(y) % d)
        return tuple(out)


@dataclass(frozen=True)
class SkeletonStratum:
    cone: tuple
    label: tuple
    component: tuple
    torus_dim: int
    conormal_dim: int

    @property
    def is_boundary(self) -> bool:
        return bool(self.cone)

    def to_dict(self) -> dict:
        return {
            "cone": list(self.cone),
            "label": list(self.label),
            "component": [f"{x.numerator}/{x.denominator}" for x in self.component],
            "dims": [self.torus_dim, self.conormal_dim],
        }


@dataclass
class SkeletonGraph:
    fan: StackyFan
    strata: list
    closure_order: list  # pairs (i, j): stratum i <= stratum j

    def groups(self) -> dict:
        return {c: component_group(self.fan, c) for c in self.fan.cones}

    def counts(self) -> dict:
        out: dict = {}
        for s in self.strata:
            out[s.cone] = out.get(s.cone, 0) + 1
        return out

    def boundary(self) -> list:
        return [s for s in self.strata if s.is_boundary]

    def to_dict(self) -> dict:
        return {
            "rank": self.fan.rank,
            "strata": [s.to_dict() for s in self.strata],
            "closure_order": [list(p) for p in self.closure_order],
        }


def component_group(fan: StackyFan, cone: tuple) -> ComponentGroup:
    return ComponentGroup.of(fan.stacky_primitives(cone), fan.rank)


def build_skeleton(fan: StackyFan) -> SkeletonGraph:
    strata = []
    groups = {}
    for c in fan.cones:
        g = component_group(fan, c)
        groups[c] = g
        for lab in g.labels():
            strata.append(SkeletonStratum(c, lab, g.representative(lab), g.torus_dim, len(c)))
    order = []
    for i, s in enumerate(strata):
        for j, t in enumerate(strata):
            if set(s.cone) <= set(t.cone) and groups[s.cone].label_of(t.component) == s.label:
                order.append((i, j))
    return SkeletonGraph(fan, strata, order)


@dataclass(frozen=True)
class SubtorusIntersection:
    cones: tuple
    free_rank: int
    torsion: tuple

    @property
    def group_order(self) -> Optional[int]:
        """Number of points when the intersection is finite, else None."""
        return prod(self.torsion) if self.free_rank == 0 else None

    @property
    def component_count(self) -> int:
        return prod(self.torsion) if self.torsion else 1

    def to_dict(self) -> dict:
        return {
            "cones": [list(c) for c in self.cones],
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "order": self.group_order,
        }


def subtorus_intersections(fan: StackyFan, *cones: tuple) -> SubtorusIntersection:
    """Intersection of the subgroups G attached to the given cones."""
    gens = []
    for c in cones:
        gens.extend(fan.stacky_primitives(c))
    free, torsion = quotient_group(gens, fan.rank)
    return SubtorusIntersection(tuple(cones), free, tuple(torsion))


@dataclass
class SectorCoverReport:
    ok: bool
    pieces: list
    pair_failures: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "pieces": self.pieces, "pair_failures": self.pair_failures}


def restricted_strata(graph: SkeletonGraph, sigma: tuple) -> list[int]:
    """Indices of strata lying in the neighbourhood of the sigma sector."""
    return [i for i, s in enumerate(graph.strata) if set(sigma) <= set(s.cone)]


def sector_cover(fan: StackyFan) -> SectorCoverReport:
    """Check the sector cover combinatorics for every nonzero cone.

    For each sigma the strata over cones containing sigma are compared with
    the skeleton of the quotient fan: cones must correspond bijectively, each
    component count must factor as |Gamma_sigma| times the quotient count,
    and the pulled-back quotient components must embed order-preservingly.
    """
    graph = build_skeleton(fan)
    pieces = []
    ok = True
    for sigma in fan.nonzero_cones:
        q = quotient_fan(fan, sigma)
        sub = build_skeleton(q.fan) if q.quotient_rank else None
        g_sigma = component_group(fan, sigma)
        idx = restricted_strata(graph, sigma)
        problems = []
        if sorted(q.cone_map.values()) != sorted(q.fan.cones):
            problems.append("cone bijection")
        counts = graph.counts()
        for tau, image in q.cone_map.items():
            qcount = component_group(q.fan, image).order if q.quotient_rank else 1
            if counts[tau] != g_sigma.order * qcount:
                problems.append(f"count at {list(tau)}")
        # pull quotient components back along the projection and label them in G_tau
        embedded = {}
        if sub is not None:
            inv = {v: k for k, v in q.cone_map.items()}
            for k, st in enumerate(sub.strata):
                tau = inv[st.cone]
                point = tuple(
                    _frac_mod1(sum(Fraction(q.projection[r][i]) * st.component[r] for r in range(q.quotient_rank)))
                    for i in range(fan.rank)
                )
                lab = component_group(fan, tau).label_of(point)
                if lab is None:
                    problems.append(f"component of {list(st.cone)} leaves G")
                    continue
                embedded[k] = next(i for i in idx if graph.strata[i].cone == tau and graph.strata[i].label == lab)
            if len(set(embedded.values())) != len(embedded):
                problems.append("embedding not injective")
            big = set(graph.closure_order)
            for a, b in sub.closure_order:
                if a in embedded and b in embedded and (embedded[a], embedded[b]) not in big:
                    problems.append("order not preserved")
                    break
        ok = ok and not problems
        pieces.append({
            "cone": list(sigma),
            "restricted_strata": len(idx),
            "quotient_strata": len(sub.strata) if sub is not None else 1,
            "fiber": g_sigma.order,
            "problems": problems,
        })
    pair_failures = []
    for s, t in itertools.combinations_with_replacement(fan.nonzero_cones, 2):
        meet = set(restricted_strata(graph, s)) & set(restricted_strata(graph, t))
        w = wedge(fan, s, t)
        expected = set() if w is None else set(restricted_strata(graph, w))
        if meet != expected:
            pair_failures.append([list(s), list(t)])
    return SectorCoverReport(ok and not pair_failures, pieces, pair_failures)


def render_skeleton_2d(graph: SkeletonGraph, size: int = 300) -> str:
    """Draw the skeleton on the fundamental square of the rank-2 torus.

    Subtori of rays are drawn as lines with short hairs in the conormal
    direction -beta; points of the finite groups of 2-cones get disks.
    """
    fan = graph.fan
    if fan.rank != 2:
        raise RankUnsupported("skeleton rendering needs rank 2")
    pad = 20
    s = size - 2 * pad

    def xy(p):
        return pad + float(p[0]) * s, pad + (1 - float(p[1])) * s

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect x="{pad}" y="{pad}" width="{s}" height="{s}" fill="none" stroke="#888888"/>']
    for i, ray in enumerate(fan.rays):
        if not fan.has_cone((i,)):
            continue
        b = ray.stacky
        for a, c in _square_segments(b):
            (x1, y1), (x2, y2) = xy(a), xy(c)
            parts.append(f'<line class="subtorus" data-ray="{i}" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="black"/>')
            norm = (b[0] ** 2 + b[1] ** 2) ** 0.5
            hx, hy = -b[0] / norm * 6, b[1] / norm * 6  # screen y is flipped
            for t in (0.2, 0.4, 0.6, 0.8):
                px, py = x1 + t * (x2 - x1), y1 + t * (y2 - y1)
                parts.append(f'<line class="hair" x1="{px:.2f}" y1="{py:.2f}" x2="{px + hx:.2f}" y2="{py + hy:.2f}" stroke="black"/>')
    marks = set()
    for c in fan.cones:
        if len(c) != 2:
            continue
        g = component_group(fan, c)
        for lab in g.labels():
            rep = g.representative(lab)
            for shift in itertools.product((0, 1), repeat=2):
                p = (rep[0] + shift[0], rep[1] + shift[1])
                if all(0 <= x <= 1 for x in p):
                    marks.add(p)
    for p in sorted(marks):
        x, y = xy(p)
        parts.append(f'<circle class="corner" cx="{x:.2f}" cy="{y:.2f}" r="4" fill="#888888"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


class RankUnsupported(ValueError):
    pass


def _square_segments(beta: Sequence[int]) -> list[tuple]:
    """Pieces of the lines <beta, x> = k inside the unit square."""
    corners = [(0, 0), (1, 0), (0, 1), (1, 1)]
    vals = [dot(beta, c) for c in corners]
    out = []
    for k in range(min(vals), max(vals) + 1):
        pts = set()
        for a, b in ((0, 1), (0, 2), (1, 3), (2, 3)):
            p, q = corners[a], corners[b]
            fp, fq = dot(beta, p) - k, dot(beta, q) - k
            if fp == 0:
                pts.add(p)
            if fq == 0:
                pts.add(q)
            if fp * fq < 0:
                t = Fraction(fp, fp - fq)
                pts.add(tuple(x + t * (y - x) for x, y in zip(p, q)))
        pts = sorted(pts)
        # the top and right edges are the bottom and left ones on the torus
        if any(all(p[i] == 1 for p in pts) for i in range(2)):
            continue
        if len(pts) >= 2:
            out.append((pts[0], pts[-1]))
    return out
