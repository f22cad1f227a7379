"""Patchworked Laurent polynomials and numerical amoebas (rank 1 and 2).

Amoeba points are stored in logarithmic coordinates to the base of the
patchworking parameter t, so that as t grows they approach the spine of the
Legendre transform of the lifting function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .fan import PLFunction, StackyFan, triangulation_vertices
from .skeleton import build_skeleton
from .spine import DualComplex, bounded_component, spine_segments


class DegenerateFiber(ArithmeticError):
    pass


class EmptySample(ValueError):
    pass


class ResolutionTooCoarse(ValueError):
    pass


class NoBoundedComponent(ValueError):
    pass


@dataclass(frozen=True)
class LaurentPoly:
    terms: tuple  # ((exponent, coefficient), ...), exponents distinct
    rank: int
    base: float = math.e

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if len(set(exps)) != len(exps):
            raise ValueError("exponents must be distinct")
        if any(len(e) != self.rank for e in exps):
            raise ValueError("exponent length does not match rank")

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for e, _ in self.terms], dtype=float).reshape(len(self.terms), self.rank)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=float)

    def term_values(self, z: np.ndarray) -> np.ndarray:
        """Complex term values, shape (points, terms), for z of shape (points, rank)."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        logs = np.log(z) @ self.exponents.T
        return self.coefficients[None, :] * np.exp(logs)

    def __call__(self, z) -> np.ndarray:
        return self.term_values(z).sum(axis=1)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "base": self.base,
                "terms": [{"exponent": list(e), "coefficient": c} for e, c in self.terms]}


def patchwork(fan: StackyFan, v: PLFunction, t: float) -> LaurentPoly:
    """One term per triangulation vertex a, with coefficient t^(-v(a))."""
    if t <= 0:
        raise ValueError("t must be positive")
    terms = tuple((a, float(t) ** float(-v(a))) for a in triangulation_vertices(fan))
    return LaurentPoly(terms, fan.rank, float(t) if t > 1 else math.e)


@dataclass
class AmoebaSample:
    points: np.ndarray
    t: float
    window: tuple
    resolution: int
    seed: int
    degenerate_fibers: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {"count": len(self.points), "t": self.t, "window": list(self.window),
                "resolution": self.resolution, "seed": self.seed, "degenerate_fibers": self.degenerate_fibers}


def _fiber_roots(W: LaurentPoly, free: int, fixed_vals: np.ndarray, rel_tol: float = 1e-6):
    """Roots in coordinate ``free`` for each fixed value of the other coordinate (rank 2)."""
    other = 1 - free
    exps = np.array([e for e, _ in W.terms], dtype=int)
    coeffs = W.coefficients
    kmin, kmax = exps[:, free].min(), exps[:, free].max()
    d = int(kmax - kmin)
    nfib = len(fixed_vals)
    # polynomial coefficients, highest degree first
    C = np.zeros((nfib, d + 1), dtype=complex)
    scale = np.zeros((nfib, d + 1))
    logz = np.log(fixed_vals)
    for (e, c) in zip(exps, coeffs):
        val = c * np.exp(e[other] * logz)
        C[:, kmax - e[free]] += val
        scale[:, kmax - e[free]] += np.abs(val)
    degenerate = np.all(np.abs(C) <= 1e-12 * scale.max(axis=1, keepdims=True), axis=1)
    out_fixed, out_roots = [], []
    if d == 0:
        return np.empty(0, complex), np.empty(0, complex), int(degenerate.sum())
    norm = np.abs(C).max(axis=1, keepdims=True)
    norm[norm == 0] = 1
    Cn = C / norm
    full = (~degenerate) & (np.abs(Cn[:, 0]) > 1e-12) & (np.abs(Cn[:, -1]) > 1e-12)
    idx = np.nonzero(full)[0]
    if len(idx):
        P = Cn[idx]
        comp = np.zeros((len(idx), d, d), dtype=complex)
        comp[:, 0, :] = -P[:, 1:] / P[:, :1]
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1
        roots = np.linalg.eigvals(comp)
        out_fixed.append(np.repeat(fixed_vals[idx], d))
        out_roots.append(roots.reshape(-1))
    for i in np.nonzero((~degenerate) & (~full))[0]:
        r = np.roots(np.trim_zeros(np.where(np.abs(Cn[i]) > 1e-14, Cn[i], 0), "f"))
        r = r[np.abs(r) > 0]
        out_fixed.append(np.full(len(r), fixed_vals[i]))
        out_roots.append(r)
    if not out_fixed:
        return np.empty(0, complex), np.empty(0, complex), int(degenerate.sum())
    return np.concatenate(out_fixed), np.concatenate(out_roots), int(degenerate.sum())


def _root_test(W: LaurentPoly, z: np.ndarray, rel_tol: float = 1e-6) -> np.ndarray:
    terms = W.term_values(z)
    return np.abs(terms.sum(axis=1)) <= rel_tol * np.abs(terms).max(axis=1)


def _polish(W: LaurentPoly, z: np.ndarray, free: int) -> np.ndarray:
    """One Newton step in the free coordinate."""
    exps = W.exponents
    terms = W.term_values(z)
    f = terms.sum(axis=1)
    df = (terms * exps[None, :, free]).sum(axis=1) / z[:, free]
    ok = np.abs(df) > 0
    z = z.copy()
    z[ok, free] -= f[ok] / df[ok]
    return z


def sample_amoeba(W: LaurentPoly, window: Sequence[float], resolution: int, seed: int = 0) -> AmoebaSample:
    """Sample Log_base(W = 0) inside a square window.

    For rank 2 both coordinates take turns as the fixed one: its modulus runs
    over a uniform grid in the window and its argument over ``resolution``
    angles with a seeded offset; the other coordinate is found as a root of a
    one-variable polynomial.  Points failing the relative residual test are
    dropped.
    """
    lo, hi = float(window[0]), float(window[1])
    lb = math.log(W.base)
    rng = np.random.default_rng(seed)
    if W.rank == 1:
        exps = [e[0] for e, _ in W.terms]
        kmin, kmax = min(exps), max(exps)
        poly = np.zeros(kmax - kmin + 1, dtype=complex)
        for (e, c) in W.terms:
            poly[kmax - e[0]] += c
        roots = np.roots(poly)
        roots = roots[np.abs(roots) > 0]
        pts = np.log(np.abs(roots))[:, None] / lb
    elif W.rank == 2:
        if resolution < 16:
            raise ValueError("resolution must be at least 16")
        mods = np.linspace(lo, hi, resolution)
        degenerate = 0
        chunks = []
        for free in (1, 0):
            offset = rng.uniform(0, 2 * math.pi / resolution)
            angles = offset + 2 * math.pi * np.arange(resolution) / resolution
            fixed = (np.exp(lb * mods)[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
            fz, roots, deg = _fiber_roots(W, free, fixed)
            degenerate += deg
            if not len(roots):
                continue
            ok = np.abs(roots) > 0
            fz, roots = fz[ok], roots[ok]
            z = np.empty((len(roots), 2), dtype=complex)
            z[:, free], z[:, 1 - free] = roots, fz
            z = _polish(W, z, free)
            z = z[_root_test(W, z)]
            chunks.append(np.log(np.abs(z)) / lb)
        pts = np.concatenate(chunks) if chunks else np.empty((0, 2))
    else:
        raise ValueError("sampling is implemented for rank 1 and 2 only")
    inside = np.all((pts >= lo) & (pts <= hi), axis=1)
    pts = np.unique(np.round(pts[inside], 12), axis=0)
    out = AmoebaSample(pts, W.base, (lo, hi), resolution, seed)
    if W.rank == 2:
        out.degenerate_fibers = degenerate
    return out


def _segment_distance(points: np.ndarray, segments: Sequence) -> np.ndarray:
    """Euclidean distance from each point to the union of segments."""
    best = np.full(len(points), np.inf)
    for a, b in segments:
        a, b = np.asarray(a, float), np.asarray(b, float)
        ab = b - a
        denom = float(ab @ ab)
        if denom == 0:
            d = np.linalg.norm(points - a, axis=1)
        else:
            s = np.clip((points - a) @ ab / denom, 0, 1)
            d = np.linalg.norm(points - (a + s[:, None] * ab), axis=1)
        best = np.minimum(best, d)
    return best


def _spine_geometry(dc: DualComplex, window: tuple):
    """Segments (rank 2) or points (rank 1) of the spine."""
    if dc.rank == 2:
        return spine_segments(dc, window)
    pts = []
    for cell in dc.cells:
        if cell.dim == 0:
            p = tuple(float(x) for x in cell.polyhedron.vertices[0])
            pts.append((p, p))
    return pts


def spine_raster(dc: DualComplex, window: tuple, step: float, margin: float = 0.0) -> np.ndarray:
    lo, hi = window
    out = []
    for a, b in _spine_geometry(dc, window):
        a, b = np.asarray(a, float), np.asarray(b, float)
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / step)))
        out.append(a + np.linspace(0, 1, k + 1)[:, None] * (b - a))
    pts = np.concatenate(out) if out else np.empty((0, dc.rank))
    keep = np.all((pts >= lo + margin) & (pts <= hi - margin), axis=1)
    return pts[keep]


def spine_distance(s: AmoebaSample, dc: DualComplex, margin: float = 1.0) -> dict:
    """one_sided: farthest sample from the spine; spine_coverage: farthest spine point from the samples."""
    if not len(s.points):
        raise EmptySample("no amoeba points in the window")
    segs = _spine_geometry(dc, s.window)
    one_sided = float(_segment_distance(s.points, segs).max())
    step = (s.window[1] - s.window[0]) / max(s.resolution, 16) / 2
    raster = spine_raster(dc, s.window, step, margin)
    if len(raster):
        cover = float(cKDTree(s.points).query(raster)[0].max())
    else:
        cover = 0.0
    return {"one_sided": one_sided, "spine_coverage": cover}


@dataclass
class ComplementComponents:
    bounded: int
    total_in_window: int
    labels: np.ndarray = field(repr=False)
    bounded_labels: list = field(repr=False)
    grid: tuple = field(repr=False)  # (xs, ys) pixel centers

    def to_dict(self) -> dict:
        return {"bounded": self.bounded, "total_in_window": self.total_in_window}


def thickening_radius(s: AmoebaSample, resolution: int) -> float:
    lo, hi = s.window
    pixel = (hi - lo) / resolution
    sample_step = (hi - lo) / max(s.resolution - 1, 1)
    return max(2 * pixel, 1.5 * sample_step)


def complement_components(s: AmoebaSample, window: Optional[tuple] = None, resolution: int = 200,
                          dc: Optional[DualComplex] = None, min_area: int = 4) -> ComplementComponents:
    """Count components of the complement of the thickened sample (rank 2).

    Pixels farther than the thickening radius from every sample are free;
    free components touching the window border are unbounded.  Components
    smaller than ``min_area`` pixels are sampling gaps and are ignored.
    """
    if s.points.shape[1] != 2:
        raise ValueError("complement components need rank 2")
    lo, hi = window if window is not None else s.window
    radius = thickening_radius(s, resolution)
    if dc is not None:
        edges = [np.linalg.norm(np.subtract(b, a)) for a, b in _bounded_edges(dc)]
        if edges and radius > min(edges) / 2:
            raise ResolutionTooCoarse(f"thickening radius {radius:.3g} exceeds half the shortest spine edge")
    xs = lo + (np.arange(resolution) + 0.5) * (hi - lo) / resolution
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    centers = np.column_stack([X.ravel(), Y.ravel()])
    if len(s.points):
        dist = cKDTree(s.points).query(centers, distance_upper_bound=radius)[0]
        free = np.isinf(dist).reshape(resolution, resolution)
    else:
        free = np.ones((resolution, resolution), bool)
    labels, count = ndimage.label(free)
    sizes = ndimage.sum(free, labels, index=np.arange(1, count + 1))
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))) - {0}
    real = [k for k in range(1, count + 1) if sizes[k - 1] >= min_area or k in border]
    bounded = [k for k in real if k not in border]
    return ComplementComponents(len(bounded), len(real), labels, bounded, (xs, xs))


def _bounded_edges(dc: DualComplex) -> list:
    out = []
    for cell in dc.cells:
        if cell.dim == 1 and cell.polyhedron.is_bounded:
            v = cell.polyhedron.vertices
            out.append((tuple(map(float, v[0])), tuple(map(float, v[1]))))
    return out


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if not len(a) or not len(b):
        return math.inf
    return float(max(cKDTree(b).query(a)[0].max(), cKDTree(a).query(b)[0].max()))


def skeleton_over_boundary(s: AmoebaSample, fan: StackyFan, dc: DualComplex, resolution: int = 400,
                           tolerance: float = 0.15) -> dict:
    """Match faces of the bounded spine region with the boundary of the amoeba's bounded hole.

    The flood fill only certifies that the hole exists.  Since complement
    components of amoebas are convex, the hole boundary is then read off by
    an angular sweep around the region's centroid, so it carries no raster
    thickening bias.  It is split among the faces of the region:
    each boundary point goes to its nearest facet (nearest point, for rank 1).  A facet's
    error is the Hausdorff distance between the facet and its boundary
    points; a lower-dimensional face's error is the largest error among the
    facets containing it.  Each face also carries the number of skeleton
    strata over its dual cone.
    """
    region = bounded_component(dc)
    if not region.bounded:
        raise NoBoundedComponent("the spine has no bounded region")
    counts = build_skeleton(fan).counts()
    faces = [(f, c) for f, c in region.faces if f.dim >= 0 and c is not None]
    n = fan.rank
    if n == 1:
        xs = np.sort(s.points[:, 0])
        vert = [float(f.vertices[0][0]) for f, _ in faces]
        inner = min(vert) < 0 < max(vert)
        if not inner or not len(xs):
            raise NoBoundedComponent("no amoeba points on both sides of the origin")
        left, right = xs[xs < 0], xs[xs > 0]
        if not len(left) or not len(right):
            raise NoBoundedComponent("the hole is not bounded on both sides")
        boundary = {-1: left.max(), 1: right.min()}
        rows = []
        for f, c in faces:
            p = float(f.vertices[0][0])
            err = abs(boundary[1 if p > 0 else -1] - p)
            rows.append(_face_row(f, c, err, tolerance, counts))
        return _report(rows)
    comps = complement_components(s, resolution=resolution)
    centroid = np.mean(np.array([[float(x) for x in p] for p in region.polytope.vertices]), axis=0)
    xs = comps.grid[0]
    step = xs[1] - xs[0]
    i, j = (np.clip(np.round((centroid - xs[0]) / step).astype(int), 0, len(xs) - 1))
    label = comps.labels[i, j]
    if label == 0 or label not in comps.bounded_labels:
        raise NoBoundedComponent("no bounded complement component around the spine region")
    bpts = hole_boundary(s.points, centroid)
    facets = [(f, c) for f, c in faces if f.dim == n - 1]
    segs = [tuple(tuple(map(float, v)) for v in f.vertices) for f, _ in facets]
    dists = np.column_stack([_segment_distance(bpts, [seg]) for seg in segs])
    owner = np.argmin(dists, axis=1)
    errors = {}
    for k, (f, c) in enumerate(facets):
        a, b = map(np.asarray, segs[k])
        length = np.linalg.norm(b - a)
        m = max(2, int(length / step) * 2)
        raster = a + np.linspace(0, 1, m)[:, None] * (b - a)
        errors[c] = _hausdorff(raster, bpts[owner == k])
    rows = []
    for f, c in faces:
        if f.dim == n - 1:
            err = errors[c]
        else:
            err = max(errors[d] for d in errors if set(d) < set(c))
        rows.append(_face_row(f, c, err, tolerance, counts))
    return _report(rows)


def hole_boundary(points: np.ndarray, center: np.ndarray, bins: int = 1440) -> np.ndarray:
    """Nearest sample to ``center`` in each angular bin."""
    d = points - center
    r = np.hypot(d[:, 0], d[:, 1])
    k = ((np.arctan2(d[:, 1], d[:, 0]) + math.pi) / (2 * math.pi) * bins).astype(int) % bins
    order = np.lexsort((r, k))
    k_sorted = k[order]
    first = order[np.r_[True, k_sorted[1:] != k_sorted[:-1]]]
    return points[first]


def _face_row(f, c, err, tolerance, counts) -> dict:
    return {"cone": list(c), "face_dim": f.dim, "error": float(err), "matched": bool(err < tolerance),
            "skeleton_components": counts[c]}


def _report(rows) -> dict:
    rows = sorted(rows, key=lambda r: (len(r["cone"]), r["cone"]))
    return {"faces": rows, "matched": sum(r["matched"] for r in rows),
            "max_error": max((r["error"] for r in rows), default=0.0)}
