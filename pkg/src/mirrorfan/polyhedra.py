"""Rational polyhedral cones and lattice polytopes with exact arithmetic.

A :class:`Cone` keeps both representations: generators (lineality basis plus
primitive extreme rays) and an H-description (facet normals plus equations).
Conversion in either direction is the double description method run over
``Fraction``, followed by primitivization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Optional, Sequence

from .lattice import (
    columns_to_matrix,
    primitive,
    rank,
    saturation_basis,
    smith_normal_form,
    solve_integer,
    unimodular_inverse,
)


class NonPointed(ValueError):
    """Raised by operations that need a cone without lineality."""


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def integralize(v: Sequence) -> tuple:
    """Scale a rational vector to a primitive integer vector with the same direction."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


def _double_description(constraints: Sequence[Sequence], n: int) -> tuple[list, list]:
    """Generators of {x in R^n : <a, x> >= 0 for all a in constraints}.

    Returns (lineality basis, extreme rays) as lists of Fraction vectors.
    """
    lin = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rays: list[list[Fraction]] = []
    seen: list[list[Fraction]] = []
    for a in constraints:
        a = [Fraction(x) for x in a]
        if all(x == 0 for x in a):
            continue
        k = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if k is not None:
            pivot = lin[k]
            s = dot(a, pivot)
            if s < 0:
                pivot = [-x for x in pivot]
                s = -s
            lin = [[x - dot(a, l) / s * p for x, p in zip(l, pivot)] for i, l in enumerate(lin) if i != k]
            rays = [[x - dot(a, r) / s * p for x, p in zip(r, pivot)] for r in rays]
            rays.append(pivot)
            seen.append(a)
            continue
        seen.append(a)
        vals = [dot(a, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        new = pos + zero
        if neg and pos:
            zsets = {id(r): frozenset(i for i, c in enumerate(seen[:-1]) if dot(c, r) == 0) for r in rays}
            target = n - len(lin) - 2
            for p in pos:
                for q in neg:
                    common = zsets[id(p)] & zsets[id(q)]
                    if (rank([seen[i] for i in common]) if common else 0) != target:
                        continue
                    ap, aq = dot(a, p), dot(a, q)
                    new.append([ap * y - aq * x for x, y in zip(p, q)])
        rays = _dedupe(new)
    return lin, rays


def _dedupe(vectors):
    out = {}
    for r in vectors:
        key = integralize(r)
        out.setdefault(key, [Fraction(x) for x in key])
    return list(out.values())


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone in R^n.

    ``rays`` are the primitive extreme rays; ``lineality`` an integer basis of
    the lineality space.  ``inequalities`` are primitive facet normals ``h``
    with ``<h, x> >= 0`` and ``equations`` an integer basis of the orthogonal
    complement of the linear span.
    """

    rays: tuple
    lineality: tuple
    inequalities: tuple
    equations: tuple
    ambient_rank: int

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence[int]], ambient_rank: Optional[int] = None) -> "Cone":
        rays = [tuple(int(x) for x in r) for r in rays]
        n = ambient_rank if ambient_rank is not None else (len(rays[0]) if rays else 0)
        if any(len(r) != n for r in rays):
            raise ValueError("ray length does not match ambient rank")
        eq_lin, facets = _double_description(rays, n)
        # generators of the cone again from its H-description
        equations = [integralize(e) for e in eq_lin]
        ineqs = sorted({integralize(f) for f in facets})
        cons = [list(h) for h in ineqs] + [list(e) for e in equations] + [[-x for x in e] for e in equations]
        lin, ext = _double_description(cons, n)
        return cls(
            rays=tuple(sorted({integralize(r) for r in ext})),
            lineality=tuple(_lattice_basis_of_span([integralize(l) for l in lin], n)),
            inequalities=tuple(ineqs),
            equations=tuple(_lattice_basis_of_span(equations, n)),
            ambient_rank=n,
        )

    @classmethod
    def from_inequalities(
        cls,
        inequalities: Iterable[Sequence[int]],
        ambient_rank: int,
        equations: Iterable[Sequence[int]] = (),
    ) -> "Cone":
        cons = [list(h) for h in inequalities]
        for e in equations:
            cons.append(list(e))
            cons.append([-x for x in e])
        lin, ext = _double_description(cons, ambient_rank)
        gens = [integralize(r) for r in ext]
        for l in lin:
            l = integralize(l)
            gens += [l, tuple(-x for x in l)]
        return cls.from_rays(gens, ambient_rank)

    @classmethod
    def zero(cls, ambient_rank: int) -> "Cone":
        return cls.from_rays([], ambient_rank)

    @cached_property
    def generators(self) -> tuple:
        """Rays plus both signs of each lineality basis vector."""
        out = list(self.rays)
        for l in self.lineality:
            out += [l, tuple(-x for x in l)]
        return tuple(out)

    @property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equations)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    def contains(self, x: Sequence) -> bool:
        return all(dot(h, x) >= 0 for h in self.inequalities) and all(dot(e, x) == 0 for e in self.equations)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def in_relative_interior(self, x: Sequence) -> bool:
        return all(dot(h, x) > 0 for h in self.inequalities) and all(dot(e, x) == 0 for e in self.equations)

    def dual(self) -> "Cone":
        return dual_cone(self)

    def faces(self) -> list["Cone"]:
        return cone_faces(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self) -> int:
        # representatives of non-pointed cones are not canonical
        return hash((self.ambient_rank, self.dim, len(self.rays)))


def _lattice_basis_of_span(vectors: list, n: int) -> list[tuple]:
    if not vectors:
        return []
    return sorted(saturation_basis(vectors, n))


def dual_cone(sigma: Cone) -> Cone:
    """{m : <m, x> >= 0 for all x in sigma}."""
    gens = list(sigma.inequalities)
    for e in sigma.equations:
        gens += [e, tuple(-x for x in e)]
    return Cone.from_rays(gens, sigma.ambient_rank)


def cone_faces(sigma: Cone) -> list[Cone]:
    """All faces of sigma, from the minimal face (lineality) to sigma itself."""
    n = sigma.ambient_rank
    found: dict[frozenset, Cone] = {}
    facets = list(sigma.inequalities)
    for k in range(len(facets) + 1):
        for subset in itertools.combinations(range(len(facets)), k):
            rays = frozenset(
                i for i, r in enumerate(sigma.rays) if all(dot(facets[j], r) == 0 for j in subset)
            )
            if rays in found:
                continue
            found[rays] = Cone.from_rays([sigma.rays[i] for i in sorted(rays)] + list(_signed(sigma.lineality)), n)
    return sorted(found.values(), key=lambda c: (c.dim, c.rays))


def dual_face(sigma: Cone, face: Cone) -> Cone:
    """The face of the dual cone orthogonal to ``face``."""
    dual = sigma.dual()
    return Cone.from_inequalities(dual.inequalities, sigma.ambient_rank, list(dual.equations) + list(face.generators))


def _signed(basis):
    for l in basis:
        yield l
        yield tuple(-x for x in l)


def lattice_points_in_box(sigma: Cone, bound: int) -> list[tuple]:
    """Lattice points of sigma with sup-norm at most ``bound``, in lexicographic order."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    rng = range(-bound, bound + 1)
    return [p for p in itertools.product(rng, repeat=sigma.ambient_rank) if sigma.contains(p)]


def positive_grading(sigma: Cone) -> tuple:
    """An integer linear form strictly positive on sigma minus the origin."""
    if not sigma.is_pointed:
        raise NonPointed("cone has a lineality space")
    d = dual_cone(sigma)
    g = [0] * sigma.ambient_rank
    for v in d.generators:
        g = [a + b for a, b in zip(g, v)]
    return tuple(g)


def triangulate_cone(sigma: Cone) -> list[tuple]:
    """Pulling triangulation of a pointed cone into simplicial cones.

    Returns tuples of indices into ``sigma.rays``; the lowest-index ray is pulled first.
    """
    if not sigma.is_pointed:
        raise NonPointed("cone has a lineality space")
    return _pull(list(range(len(sigma.rays))), sigma.rays, sigma.ambient_rank)


def _pull(idx: list, rays: Sequence, n: int) -> list[tuple]:
    vecs = [rays[i] for i in idx]
    d = rank(vecs) if vecs else 0
    if len(idx) == d:
        return [tuple(idx)]
    cone = Cone.from_rays(vecs, n)
    apex = idx[0]
    out = []
    for f in cone.faces():
        if f.dim != d - 1:
            continue
        sub = [i for i in idx if f.contains(rays[i])]
        if apex in sub:
            continue
        for simplex in _pull(sub, rays, n):
            out.append(tuple(sorted((apex,) + simplex)))
    return sorted(out)


def parallelepiped_points(gens: Sequence[Sequence[int]], n: int) -> list[tuple]:
    """Lattice points of the half-open parallelepiped spanned by linearly independent ``gens``.

    The lattice is the saturation of their span in Z^n.
    """
    basis = saturation_basis(gens, n)
    d = len(basis)
    coords = [solve_integer(columns_to_matrix(basis, n), g) for g in gens]
    R = columns_to_matrix(coords, d)  # gens in basis coordinates, d x d
    snf = smith_normal_form(R)
    uinv = unimodular_inverse([list(r) for r in snf.U])
    rinv = _rational_inverse(R)
    pts = []
    for z in itertools.product(*(range(dv) for dv in snf.divisors)):
        y = [sum(uinv[i][j] * z[j] for j in range(d)) for i in range(d)]
        lam = [sum(rinv[i][j] * y[j] for j in range(d)) for i in range(d)]
        lam = [x - (x.numerator // x.denominator) for x in lam]
        bc = [sum(R[i][j] * lam[j] for j in range(d)) for i in range(d)]
        p = tuple(int(sum(basis[k][i] * bc[k] for k in range(d))) for i in range(n))
        pts.append(p)
    return sorted(set(pts))


def _rational_inverse(a):
    n = len(a)
    from .lattice import row_echelon

    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    rref, _ = row_echelon(aug)
    return [row[n:] for row in rref]


@dataclass(frozen=True)
class HilbertBasis:
    generators: tuple
    cone: Cone


def hilbert_basis(sigma: Cone) -> HilbertBasis:
    """Minimal generating set of the monoid sigma ∩ Z^n for a pointed cone.

    Candidates are the rays plus the lattice points of the fundamental
    parallelepipeds of a triangulation; reducible candidates are then pruned.
    """
    if not sigma.is_pointed:
        raise NonPointed("hilbert_basis needs a pointed cone")
    n = sigma.ambient_rank
    cands = set(sigma.rays)
    for simplex in triangulate_cone(sigma):
        cands.update(parallelepiped_points([sigma.rays[i] for i in simplex], n))
    cands.discard(tuple([0] * n))
    grading = positive_grading(sigma)
    ordered = sorted(cands, key=lambda p: (dot(grading, p), p))
    basis = []
    for x in ordered:
        reducible = False
        for y in ordered:
            if y == x or dot(grading, y) >= dot(grading, x):
                continue
            diff = tuple(a - b for a, b in zip(x, y))
            if sigma.contains(diff):
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return HilbertBasis(generators=tuple(sorted(basis)), cone=sigma)


def monoid_closure_in_box(generators: Sequence[Sequence[int]], bound: int, n: int) -> set:
    """N-combinations of ``generators`` reachable without leaving the box.

    Every partial sum must stay within sup-norm ``bound``.  When all
    generators lie in one closed orthant, partial sums only grow in absolute
    value, so the result is then exactly the set of N-combinations in the box.
    """
    zero = tuple([0] * n)
    reached = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = tuple(a + b for a, b in zip(p, g))
                if max((abs(x) for x in q), default=0) <= bound and q not in reached:
                    reached.add(q)
                    nxt.append(q)
        frontier = nxt
    return reached


def monoid_points_in_box(sigma: Cone, bound: int) -> set:
    """Lattice points of sigma in the box, generated from Hilbert bases.

    sigma is cut into its intersections with the closed orthants; each piece
    is pointed, and its Hilbert basis lies in a single orthant, so the
    box-restricted closure of each piece is exact.  Works for non-pointed
    sigma (half-spaces, the whole space) as well.
    """
    n = sigma.ambient_rank
    out = {tuple([0] * n)}
    for signs in itertools.product((1, -1), repeat=n):
        bounds = [tuple(s if j == i else 0 for j in range(n)) for i, s in enumerate(signs)]
        piece = Cone.from_inequalities(list(sigma.inequalities) + bounds, n, sigma.equations)
        if piece.dim == 0:
            continue
        out |= monoid_closure_in_box(hilbert_basis(piece).generators, bound, n)
    return out


@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of lattice points; ``vertices`` are exactly the extreme points."""

    vertices: tuple
    ambient_rank: int

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "LatticePolytope":
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("empty point set")
        n = len(pts[0])
        hom = Cone.from_rays([p + (1,) for p in pts], n + 1)
        # a lattice point is a vertex iff its primitive lift is an extreme ray
        verts = sorted({p for p in pts if integralize(p + (1,)) in set(hom.rays)})
        return cls(vertices=tuple(verts), ambient_rank=n)

    @cached_property
    def homogenized(self) -> Cone:
        return Cone.from_rays([v + (1,) for v in self.vertices], self.ambient_rank + 1)

    @property
    def dim(self) -> int:
        return self.homogenized.dim - 1

    def contains(self, p: Sequence) -> bool:
        return self.homogenized.contains(tuple(p) + (1,))

    def in_interior(self, p: Sequence) -> bool:
        return self.dim == self.ambient_rank and self.homogenized.in_relative_interior(tuple(p) + (1,))

    def facets(self) -> list[tuple]:
        """Facets as tuples of vertex indices."""
        h = self.homogenized
        out = []
        for f in h.faces():
            if f.dim == h.dim - 1:
                out.append(tuple(i for i, v in enumerate(self.vertices) if f.contains(v + (1,))))
        return sorted(out)


def simplex_volume_index(points: Sequence[Sequence[int]]) -> int:
    """|det| of the edge vectors from the first point (n! times the volume)."""
    from .lattice import det

    base = points[0]
    rows = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return abs(int(det(rows)))


def pulling_triangulation(points: Sequence[Sequence[int]]) -> list[tuple]:
    """Triangulate a point configuration by pulling every point in lexicographic order.

    Each cell keeps every input point lying in its hull, so every point ends
    up as a vertex.  Cells are sorted tuples of indices into ``points``.
    """
    pts = [tuple(int(x) for x in p) for p in points]
    n = len(pts[0])
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    cells = [frozenset(range(len(pts)))]
    for p in order * 2:
        refined = []
        for cell in cells:
            if p not in cell or _affinely_independent([pts[i] for i in cell]):
                refined.append(cell)
                continue
            hom = Cone.from_rays([pts[i] + (1,) for i in cell], n + 1)
            for f in hom.faces():
                if f.dim != hom.dim - 1 or f.contains(pts[p] + (1,)):
                    continue
                sub = Cone.from_rays([pts[p] + (1,)] + [pts[i] + (1,) for i in cell if f.contains(pts[i] + (1,))], n + 1)
                refined.append(frozenset(i for i in cell if sub.contains(pts[i] + (1,))))
        cells = refined
    out = sorted(tuple(sorted(c)) for c in set(cells))
    for c in out:
        if not _affinely_independent([pts[i] for i in c]):
            raise RuntimeError(f"pulling left a non-simplicial cell {c}")
    return out


def _affinely_independent(pts: Sequence[Sequence[int]]) -> bool:
    return rank([tuple(p) + (1,) for p in pts]) == len(pts)


def regular_subdivision(points: Sequence[Sequence[int]], heights: Sequence) -> list[tuple]:
    """Cells of the lower hull of the lifted points, as sorted index tuples.

    Works for configurations spanning any affine subspace.
    """
    pts = [tuple(int(x) for x in p) for p in points]
    n = len(pts[0])
    den = 1
    for h in heights:
        den = lcm(den, Fraction(h).denominator)
    lifted = [p + (int(Fraction(h) * den), 1) for p, h in zip(pts, heights)]
    hom = Cone.from_rays(lifted, n + 2)
    if hom.dim == rank([q + (1,) for q in pts]):
        # heights are affine on the configuration: one cell
        return [tuple(range(len(pts)))]
    cells = set()
    for f in hom.faces():
        if f.dim != hom.dim - 1:
            continue
        # the facet normal is the unique inequality of hom not vanishing on f
        normal = next(h for h in hom.inequalities if all(dot(h, r) == 0 for r in f.rays))
        if normal[n] > 0:
            cells.add(tuple(i for i, q in enumerate(lifted) if f.contains(q)))
    return sorted(cells)


@dataclass(frozen=True)
class Polyhedron:
    """{m : <a, m> <= b for (a, b) in inequalities, <a, m> == b for (a, b) in equations}.

    Coefficients are exact rationals.  Vertex and ray enumeration go through
    the homogenization {(m, t) : t >= 0, b t - <a, m> >= 0}.
    """

    inequalities: tuple
    equations: tuple
    ambient_rank: int

    @classmethod
    def build(cls, inequalities=(), equations=(), ambient_rank: int = 0) -> "Polyhedron":
        def norm(rows):
            out = []
            for a, b in rows:
                row = integralize_affine(tuple(a) + (b,))
                out.append((row[:-1], row[-1]))
            return tuple(sorted(set(out)))

        return cls(norm(inequalities), norm(equations), ambient_rank)

    @cached_property
    def homogenized(self) -> Cone:
        n = self.ambient_rank
        ineqs = [tuple(-x for x in a) + (b,) for a, b in self.inequalities]
        ineqs.append(tuple([0] * n) + (1,))
        eqs = [tuple(-x for x in a) + (b,) for a, b in self.equations]
        return Cone.from_inequalities(ineqs, n + 1, eqs)

    @property
    def is_empty(self) -> bool:
        h = self.homogenized
        return not any(g[-1] > 0 for g in h.generators)

    @cached_property
    def vertices(self) -> tuple:
        h = self.homogenized
        if h.lineality:
            # vertices only exist for pointed polyhedra; none are reported
            return ()
        return tuple(sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in h.rays if r[-1] > 0))

    @cached_property
    def recession_rays(self) -> tuple:
        h = self.homogenized
        return tuple(sorted(r[:-1] for r in h.generators if r[-1] == 0))

    @property
    def is_bounded(self) -> bool:
        return not self.is_empty and not self.recession_rays

    @property
    def dim(self) -> int:
        return -1 if self.is_empty else self.homogenized.dim - 1

    def contains(self, m: Sequence) -> bool:
        return all(dot(a, m) <= b for a, b in self.inequalities) and all(dot(a, m) == b for a, b in self.equations)

    def faces(self) -> list["Polyhedron"]:
        """Nonempty faces, each as a Polyhedron with the active inequalities turned into equations."""
        out = []
        h = self.homogenized
        for f in h.faces():
            if not any(g[-1] > 0 for g in f.generators):
                continue
            probe = [g for g in f.generators if g[-1] > 0]
            pt = [sum(Fraction(g[i], g[-1]) for g in probe) / len(probe) for i in range(self.ambient_rank)]
            rec = [g[:-1] for g in f.generators if g[-1] == 0]
            pt = [x + sum(r[i] for r in rec) for i, x in enumerate(pt)]
            active = [(a, b) for a, b in self.inequalities if dot(a, pt) == b]
            rest = [(a, b) for a, b in self.inequalities if dot(a, pt) != b]
            out.append(Polyhedron.build(rest, list(self.equations) + active, self.ambient_rank))
        return out

    def relative_interior_point(self) -> tuple:
        h = self.homogenized
        probe = [g for g in h.generators if g[-1] > 0]
        pt = [sum(Fraction(g[i], g[-1]) for g in probe) / len(probe) for i in range(self.ambient_rank)]
        for r in h.generators:
            if r[-1] == 0:
                pt = [x + r[i] for i, x in enumerate(pt)]
        return tuple(pt)


def integralize_affine(row: Sequence) -> tuple:
    """Scale a rational row to coprime integers, keeping orientation."""
    return integralize(row)
