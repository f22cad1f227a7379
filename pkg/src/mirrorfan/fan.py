"""Smooth stacky fans, their quotient fans and the toric boundary cover.

Cones are identified by sorted tuples of ray indices; the zero cone is ``()``.
Only simplicial fans are supported, so every subset of a maximal cone is a
face and the face poset is read off directly from index sets.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .lattice import columns_to_matrix, det, primitive, rank, smith_normal_form
from .polyhedra import Cone, LatticePolytope, dot, pulling_triangulation, regular_subdivision

ConeId = tuple


class MalformedFan(ValueError):
    """Input does not even parse as a fan."""


class NotATriangulation(ValueError):
    """The star simplices of the fan do not triangulate conv(0, stacky primitives)."""


class OriginOutside(ValueError):
    pass


@dataclass(frozen=True)
class Ray:
    primitive: tuple
    stacky: tuple

    @property
    def multiplicity(self) -> Optional[int]:
        """k with stacky == k * primitive, or None when stacky is off the ray."""
        k = None
        for p, s in zip(self.primitive, self.stacky):
            if p == 0:
                if s != 0:
                    return None
                continue
            if s % p:
                return None
            q = s // p
            if k is None:
                k = q
            elif q != k:
                return None
        return k if k is not None and k > 0 else None


@dataclass(frozen=True)
class StackyFan:
    rank: int
    rays: tuple
    maximal_cones: tuple

    @classmethod
    def from_rays(
        cls,
        rays: Sequence[Sequence[int]],
        maximal_cones: Iterable[Iterable[int]],
        stacky: Optional[Sequence[Sequence[int]]] = None,
        rank: Optional[int] = None,
    ) -> "StackyFan":
        rays = [tuple(int(x) for x in r) for r in rays]
        stacky = rays if stacky is None else [tuple(int(x) for x in s) for s in stacky]
        n = rank if rank is not None else len(rays[0])
        return cls(
            rank=n,
            rays=tuple(Ray(p, s) for p, s in zip(rays, stacky)),
            maximal_cones=tuple(sorted(tuple(sorted(set(c))) for c in maximal_cones)),
        )

    @classmethod
    def from_stacky(cls, stacky: Sequence[Sequence[int]], maximal_cones, rank: Optional[int] = None) -> "StackyFan":
        """Fan whose rays are spanned by the given stacky primitives."""
        stacky = [tuple(int(x) for x in s) for s in stacky]
        return cls.from_rays([primitive(s) for s in stacky], maximal_cones, stacky, rank)

    # -- serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping) -> "StackyFan":
        try:
            n = int(data["rank"])
            rays = [(tuple(map(int, r["primitive"])), tuple(map(int, r.get("stacky", r["primitive"])))) for r in data["rays"]]
            cones = [tuple(int(i) for i in c) for c in data["maximal_cones"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFan(f"cannot parse fan: {exc}") from exc
        for p, s in rays:
            if len(p) != n or len(s) != n:
                raise MalformedFan(f"ray {p} does not have length {n}")
        for c in cones:
            if any(i < 0 or i >= len(rays) for i in c):
                raise MalformedFan(f"cone {c} references a missing ray")
        return cls.from_rays([p for p, _ in rays], cones, [s for _, s in rays], n)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "rays": [{"primitive": list(r.primitive), "stacky": list(r.stacky)} for r in self.rays],
            "maximal_cones": [list(c) for c in self.maximal_cones],
        }

    @classmethod
    def load(cls, path) -> "StackyFan":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MalformedFan(str(exc)) from exc
        return cls.from_dict(data)

    # -- cones -------------------------------------------------------------

    @cached_property
    def cones(self) -> tuple:
        """All cones (faces of maximal cones), sorted by dimension then indices."""
        found = set()
        for c in self.maximal_cones:
            for k in range(len(c) + 1):
                found.update(itertools.combinations(c, k))
        found.add(())
        return tuple(sorted(found, key=lambda c: (len(c), c)))

    @property
    def nonzero_cones(self) -> tuple:
        return tuple(c for c in self.cones if c)

    def has_cone(self, cid: ConeId) -> bool:
        return tuple(sorted(cid)) in self._cone_set

    @cached_property
    def _cone_set(self) -> frozenset:
        return frozenset(self.cones)

    def cone(self, cid: ConeId) -> Cone:
        return Cone.from_rays([self.rays[i].primitive for i in cid], self.rank)

    def stacky_primitives(self, cid: ConeId) -> list[tuple]:
        return [self.rays[i].stacky for i in cid]

    def cones_containing(self, cid: ConeId) -> tuple:
        s = set(cid)
        return tuple(c for c in self.cones if s <= set(c))

    def wedge(self, a: ConeId, b: ConeId) -> Optional[ConeId]:
        return wedge(self, a, b)

    @property
    def is_non_stacky(self) -> bool:
        return all(r.stacky == r.primitive for r in self.rays)


def wedge(fan: StackyFan, a: ConeId, b: ConeId) -> Optional[ConeId]:
    """Smallest cone of the fan containing both ``a`` and ``b``, or None.

    For a simplicial fan any cone containing both contains the union of their
    rays, so the candidate is unique.
    """
    cand = tuple(sorted(set(a) | set(b)))
    return cand if fan.has_cone(cand) else None


# -- validation ------------------------------------------------------------


@dataclass
class FanReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


def validate(fan: StackyFan) -> FanReport:
    report = FanReport()
    for i, r in enumerate(fan.rays):
        if all(x == 0 for x in r.primitive) or primitive(r.primitive) != r.primitive:
            report.violations.append({"kind": "non-primitive-ray", "ray": i})
        if r.multiplicity is None:
            report.violations.append({"kind": "stacky-off-ray", "ray": i})
    for c in fan.maximal_cones:
        if rank([fan.rays[i].primitive for i in c]) != len(c):
            report.violations.append({"kind": "non-simplicial-cone", "cone": list(c)})
    if report.violations:
        return report
    for a, b in itertools.combinations(fan.maximal_cones, 2):
        ca, cb = fan.cone(a), fan.cone(b)
        meet = Cone.from_inequalities(
            list(ca.inequalities) + list(cb.inequalities),
            fan.rank,
            list(ca.equations) + list(cb.equations),
        )
        common = tuple(sorted(set(a) & set(b)))
        if meet != fan.cone(common):
            report.violations.append({"kind": "face-intersection", "cones": [list(a), list(b)]})
    return report


# -- regularity ------------------------------------------------------------


@dataclass(frozen=True)
class PLFunction:
    """Values on the origin and the stacky primitives."""

    values: Mapping

    def __call__(self, point: Sequence[int]) -> Fraction:
        return self.values[tuple(point)]

    def to_dict(self) -> dict:
        return {"values": [{"point": list(p), "v": _fmt(v)} for p, v in sorted(self.values.items())]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PLFunction":
        try:
            return cls({tuple(int(x) for x in e["point"]): Fraction(e["v"]) for e in data["values"]})
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise MalformedFan(f"cannot parse PL function: {exc}") from exc


def _fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def triangulation_vertices(fan: StackyFan) -> list[tuple]:
    zero = tuple([0] * fan.rank)
    return [zero] + sorted({r.stacky for r in fan.rays})


def check_triangulation(fan: StackyFan) -> None:
    """Raise NotATriangulation unless the star simplices cover conv(0, stacky primitives)."""
    n = fan.rank
    if any(len(c) != n for c in fan.maximal_cones):
        raise NotATriangulation("maximal cones must be full-dimensional")
    delta = LatticePolytope.from_points(triangulation_vertices(fan))
    if delta.dim != n:
        raise NotATriangulation("conv(0, stacky primitives) is not full-dimensional")
    hull_pts = list(delta.vertices)
    vol = sum(abs(int(det([[a - b for a, b in zip(hull_pts[i], hull_pts[s[0]])] for i in s[1:]])))
              for s in pulling_triangulation(hull_pts))
    star = sum(abs(int(det([list(b) for b in fan.stacky_primitives(c)]))) for c in fan.maximal_cones)
    if star != vol:
        raise NotATriangulation(f"star simplices have normalized volume {star}, hull has {vol}")


@dataclass(frozen=True)
class Wall:
    shared: tuple  # ray indices of the common facet
    left: int  # ray of the first cone off the wall
    right: int  # ray of the second cone off the wall
    coeffs: tuple  # right stacky = sum coeffs[i] * shared stacky + coeffs[-1] * left stacky


def interior_walls(fan: StackyFan) -> list[Wall]:
    walls = []
    for a, b in itertools.combinations(fan.maximal_cones, 2):
        shared = tuple(sorted(set(a) & set(b)))
        if len(shared) != fan.rank - 1:
            continue
        (left,) = set(a) - set(shared)
        (right,) = set(b) - set(shared)
        basis = [fan.rays[i].stacky for i in shared] + [fan.rays[left].stacky]
        coeffs = _rational_solve(basis, fan.rays[right].stacky)
        walls.append(Wall(shared, left, right, tuple(coeffs)))
    return walls


def _rational_solve(cols, b):
    from .lattice import row_echelon

    n = len(b)
    aug = [[Fraction(c[i]) for c in cols] + [Fraction(b[i])] for i in range(n)]
    rref, piv = row_echelon(aug)
    return [row[-1] for row in rref]


def _wall_row(fan: StackyFan, wall: Wall, index: Mapping) -> dict:
    """Linear form in the vertex values whose positivity is strict convexity across ``wall``.

    Equals v(right) minus the affine extension of v from the left cone, evaluated at right.
    """
    zero = tuple([0] * fan.rank)
    row: dict = {}

    def add(point, c):
        k = index[point]
        row[k] = row.get(k, 0) + c

    add(fan.rays[wall.right].stacky, Fraction(1))
    add(zero, Fraction(-1))
    for c, i in zip(wall.coeffs, list(wall.shared) + [wall.left]):
        add(fan.rays[i].stacky, -c)
        add(zero, c)
    return {k: v for k, v in row.items() if v != 0}


def certifies(fan: StackyFan, v: PLFunction) -> bool:
    """True when v is strictly convex across every interior wall of the fan."""
    for w in interior_walls(fan):
        pts = [fan.rays[i].stacky for i in w.shared] + [fan.rays[w.left].stacky]
        zero = tuple([0] * fan.rank)
        ext = v(zero) + sum(c * (v(p) - v(zero)) for c, p in zip(w.coeffs, pts))
        if not v(fan.rays[w.right].stacky) > ext:
            return False
    return True


@dataclass
class QuasiprojectivityResult:
    regular: bool
    certificate: Optional[PLFunction] = None
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.regular


def is_quasiprojective(fan: StackyFan) -> QuasiprojectivityResult:
    """Decide regularity of the star triangulation by exact Fourier-Motzkin elimination.

    The strict system ``row(v) > 0`` is normalized to ``row(v) >= 1``.  On
    failure the witness is a nonnegative combination of wall rows summing to
    the zero form, which makes ``0 >= sum(multipliers)`` contradictory.
    """
    check_triangulation(fan)
    verts = triangulation_vertices(fan)
    zero = verts[0]
    # the origin sits at -1 and everything else at 0: the conewise gauge of
    # the polytope, valid whenever every maximal cone spans a facet
    simple = PLFunction({p: Fraction(-1 if p == zero else 0) for p in verts})
    if certifies(fan, simple):
        return QuasiprojectivityResult(True, simple)
    index = {p: i for i, p in enumerate(verts)}
    rows = [_wall_row(fan, w, index) for w in interior_walls(fan)]
    # gauge: affine functions are invisible to the walls; pin origin and one maximal cone
    pinned = {index[zero]} | {index[fan.rays[i].stacky] for i in fan.maximal_cones[0]}
    free = [k for k in range(len(verts)) if k not in pinned]
    system = [({k: c for k, c in r.items() if k in free}, Fraction(1), {i: Fraction(1)}) for i, r in enumerate(rows)]
    solution, witness = _fourier_motzkin(system, free)
    if solution is None:
        return QuasiprojectivityResult(False, witness={"combination": {str(k): _fmt(v) for k, v in witness.items()}})
    vals = {p: Fraction(0) for p in verts}
    for k, x in solution.items():
        vals[verts[k]] = x
    cert = PLFunction(vals)
    if not certifies(fan, cert):  # pragma: no cover - elimination is exact
        raise RuntimeError("Fourier-Motzkin produced an invalid certificate")
    return QuasiprojectivityResult(True, cert)


def _fourier_motzkin(system, variables):
    """Solve {sum a_k x_k >= b} exactly.

    ``system`` entries are (coeffs, rhs, provenance) where provenance maps
    original row index to its multiplier.  Returns (solution, None) or
    (None, provenance of a contradictory row).
    """
    stages = []
    current = list(system)
    for var in variables:
        stages.append((var, current))
        pos, neg, rest = [], [], []
        for row in current:
            c = row[0].get(var, 0)
            (pos if c > 0 else neg if c < 0 else rest).append(row)
        nxt = rest
        for p in pos:
            for q in neg:
                cp, cq = p[0][var], -q[0][var]
                coeffs = {}
                for k in set(p[0]) | set(q[0]):
                    if k == var:
                        continue
                    val = cq * p[0].get(k, 0) + cp * q[0].get(k, 0)
                    if val:
                        coeffs[k] = val
                prov = dict()
                for src, mult in ((p[2], cq), (q[2], cp)):
                    for i, m in src.items():
                        prov[i] = prov.get(i, 0) + m * mult
                nxt.append((coeffs, cq * p[1] + cp * q[1], prov))
        current = _prune(nxt)
    for coeffs, rhs, prov in current:
        if not coeffs and rhs > 0:
            return None, prov
    sol: dict = {}
    for var, rows in reversed(stages):
        lo, hi = None, None
        for coeffs, rhs, _ in rows:
            c = coeffs.get(var, 0)
            if c == 0:
                continue
            rest = sum(a * sol[k] for k, a in coeffs.items() if k != var)
            bound = (rhs - rest) / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is None and hi is None:
            x = Fraction(0)
        elif hi is None:
            x = lo
        elif lo is None:
            x = hi
        else:
            x = (lo + hi) / 2
        sol[var] = Fraction(x)
    return sol, None


def _prune(rows):
    """Drop duplicate rows after scaling to a canonical form."""
    seen = {}
    for coeffs, rhs, prov in rows:
        if not coeffs:
            key = ("const",)
            if rhs > 0:
                return [(coeffs, rhs, prov)]
            continue
        scale = max(abs(c) for c in coeffs.values())
        key = tuple(sorted((k, c / scale) for k, c in coeffs.items()))
        b = rhs / scale
        if key not in seen or seen[key][1] / max(abs(c) for c in seen[key][0].values()) < b:
            seen[key] = (coeffs, rhs, prov)
    return list(seen.values())


# -- construction from a polytope -------------------------------------------------


def knutson_construct(
    delta: LatticePolytope | Sequence[Sequence[int]],
    facet_points: Sequence[Sequence[int]] = (),
    max_rounds: int = 12,
) -> tuple[StackyFan, PLFunction]:
    """Smooth quasiprojective stacky fan whose stacky primitives have hull ``delta``.

    Each facet of ``delta`` not containing the origin is triangulated (its
    vertices plus any ``facet_points`` on it) as the regular subdivision of a
    strictly convex lift, and the fan is the cone over those simplices.  The
    certificate is ``-1`` at the origin plus ``eps * h`` on the boundary,
    with ``h`` the lift on refined facets and 0 elsewhere; eps runs through
    ``2**-k`` for k = 1, 2, 4, 8, ... until every wall certifies.
    """
    if not isinstance(delta, LatticePolytope):
        delta = LatticePolytope.from_points(delta)
    n = delta.ambient_rank
    zero = tuple([0] * n)
    if not delta.contains(zero):
        raise OriginOutside("the origin is not in the polytope")
    if delta.dim != n:
        raise ValueError("polytope must be full-dimensional")
    extra = [tuple(int(x) for x in p) for p in facet_points]
    for p in extra:
        if not delta.contains(p):
            raise ValueError(f"facet point {p} is outside the polytope")
    # strictly convex lift (all points stay vertices) with a pulling tie-break:
    # lexicographically lower points are pulled down harder
    allpts = sorted(set(delta.vertices) | set(extra))
    tiebreak = {p: -Fraction(1, 2 ** (i + 1)) for i, p in enumerate(allpts)}
    lift = {p: sum(x * x for x in p) + Fraction(1, 64) * tiebreak[p] for p in allpts}
    hom = delta.homogenized
    cells = []
    for f in hom.faces():
        if f.dim != hom.dim - 1 or f.contains(zero + (1,)):
            continue
        fpts = [q for q in allpts if f.contains(q + (1,))]
        sub = regular_subdivision(fpts, [lift[q] for q in fpts])
        if any(len(c) != n for c in sub):
            raise RuntimeError(f"facet subdivision {sub} is not a triangulation")
        cells.extend((tuple(fpts[i] for i in c), len(sub) > 1) for c in sub)
    stacky = sorted({q for c, _ in cells for q in c})
    refined = {q for c, multi in cells if multi for q in c}
    heights = {q: (lift[q] if q in refined else Fraction(0)) for q in stacky}
    idx = {q: i for i, q in enumerate(stacky)}
    fan = StackyFan.from_stacky(stacky, [[idx[q] for q in c] for c, _ in cells], rank=n)
    k = 1
    for _ in range(max_rounds):
        eps = Fraction(1, 2**k)
        vals = {zero: Fraction(-1)}
        vals.update({q: eps * heights[q] for q in stacky})
        v = PLFunction(vals)
        if certifies(fan, v):
            return fan, v
        k *= 2
    raise RuntimeError("no certificate found for the facet triangulation")  # pragma: no cover


# -- orbit closures ----------------------------------------------------------


@dataclass(frozen=True)
class OrbitClosureFan:
    """Fan of the orbit closure attached to ``base_cone``.

    ``projection`` maps Z^n onto the free quotient Z^n / (Z-span of the base
    cone ∩ Z^n); ``torsion`` records the torsion of Z^n modulo the stacky
    primitives of the base cone.  ``cone_map`` sends each cone containing the
    base cone to its image cone id in ``fan``.
    """

    base_cone: ConeId
    quotient_rank: int
    torsion: tuple
    projection: tuple
    fan: StackyFan
    cone_map: Mapping

    def project(self, x: Sequence[int]) -> tuple:
        return tuple(dot(row, x) for row in self.projection)


def quotient_fan(fan: StackyFan, sigma: ConeId) -> OrbitClosureFan:
    sigma = tuple(sorted(sigma))
    if not fan.has_cone(sigma):
        raise KeyError(f"{sigma} is not a cone of the fan")
    n = fan.rank
    from .lattice import quotient_group

    if sigma:
        snf = smith_normal_form(columns_to_matrix([fan.rays[i].primitive for i in sigma], n))
        r = sum(1 for d in snf.divisors if d)
        projection = tuple(tuple(row) for row in snf.U[r:])
        _, torsion = quotient_group(fan.stacky_primitives(sigma), n)
    else:
        projection = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        torsion = []
    q = len(projection)

    def proj(x):
        return tuple(dot(row, x) for row in projection)

    containing = fan.cones_containing(sigma)
    new_rays = sorted({i for c in containing for i in c} - set(sigma))
    ray_idx = {i: k for k, i in enumerate(new_rays)}
    prims = [primitive(proj(fan.rays[i].primitive)) for i in new_rays]
    stacky = [proj(fan.rays[i].stacky) for i in new_rays]
    maximal = [tuple(sorted(ray_idx[i] for i in c if i not in sigma)) for c in containing
               if not any(set(c) < set(d) for d in containing)]
    qfan = StackyFan.from_rays(prims, maximal, stacky, rank=q) if q else StackyFan(0, (), ((),))
    cone_map = {c: tuple(sorted(ray_idx[i] for i in c if i not in sigma)) for c in containing}
    return OrbitClosureFan(sigma, q, tuple(torsion), projection, qfan, cone_map)


@dataclass
class BoundaryCover:
    """Closed cover of the toric boundary by orbit closures, one per nonzero cone.

    ``arrows`` holds pairs (tau, sigma) with sigma a proper face of tau,
    standing for the closed inclusion of the tau orbit closure into the
    sigma orbit closure.
    """

    objects: dict
    arrows: list
    intersection_law: bool
    failures: list

    def to_dict(self) -> dict:
        return {
            "objects": [
                {"cone": list(c), "quotient_rank": o.quotient_rank, "torsion": list(o.torsion),
                 "cones": len(o.fan.cones) if o.quotient_rank else 1}
                for c, o in sorted(self.objects.items())
            ],
            "arrows": [[list(a), list(b)] for a, b in self.arrows],
            "intersection_law": self.intersection_law,
            "failures": self.failures,
        }


def orbit_closure_index(fan: StackyFan, sigma: ConeId) -> frozenset:
    """Orbits (as cones) making up the closure of the orbit of sigma."""
    return frozenset(fan.cones_containing(sigma))


def boundary_cover(fan: StackyFan) -> BoundaryCover:
    objects = {c: quotient_fan(fan, c) for c in fan.nonzero_cones}
    arrows = [(t, s) for s in fan.nonzero_cones for t in fan.nonzero_cones if set(s) < set(t)]
    failures = []
    for s, t in itertools.combinations_with_replacement(fan.nonzero_cones, 2):
        meet = orbit_closure_index(fan, s) & orbit_closure_index(fan, t)
        w = wedge(fan, s, t)
        expected = frozenset() if w is None else orbit_closure_index(fan, w)
        via_quotient = frozenset() if w is None else frozenset(quotient_fan(fan, w).cone_map)
        if not (meet == expected == via_quotient):
            failures.append([list(s), list(t)])
    return BoundaryCover(objects, arrows, not failures, failures)
