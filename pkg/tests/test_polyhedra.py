import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mirrorfan.polyhedra import (
    Cone,
    LatticePolytope,
    NonPointed,
    Polyhedron,
    cone_faces,
    dual_cone,
    dual_face,
    hilbert_basis,
    lattice_points_in_box,
    monoid_points_in_box,
    pulling_triangulation,
    regular_subdivision,
    simplex_volume_index,
)


def vectors(n):
    return st.lists(st.integers(-3, 3), min_size=n, max_size=n).filter(any)


cones = st.integers(1, 3).flatmap(
    lambda n: st.lists(vectors(n), min_size=1, max_size=5).map(lambda rs: Cone.from_rays(rs, n))
)
pointed_full = cones.filter(lambda c: c.is_pointed and c.dim == c.ambient_rank)


def brute_dual_points(sigma, bound):
    gens = sigma.generators
    return {m for m in itertools.product(range(-bound, bound + 1), repeat=sigma.ambient_rank)
            if all(sum(a * b for a, b in zip(m, g)) >= 0 for g in gens)}


def test_dual_examples():
    c = Cone.from_rays([(1, 0), (1, 2)])
    assert set(dual_cone(c).rays) == {(0, 1), (2, -1)}
    z = Cone.zero(2)
    assert z.dual().dim == 2 and not z.dual().rays
    half = Cone.from_rays([(1, 0)]).dual()
    assert half.dim == 2 and not half.is_pointed


def test_hilbert_examples():
    assert set(hilbert_basis(Cone.from_rays([(1, 0), (1, 2)]).dual()).generators) == {(0, 1), (1, 0), (2, -1)}
    assert set(hilbert_basis(Cone.from_rays([(1, 0), (1, 2)])).generators) == {(1, 0), (1, 1), (1, 2)}
    with pytest.raises(NonPointed):
        hilbert_basis(Cone.from_rays([(1, 0), (-1, 0)]))


def test_box_listing_examples():
    assert len(lattice_points_in_box(Cone.from_rays([(1, 0), (0, 1)]), 2)) == 9
    assert len(lattice_points_in_box(Cone.from_rays([(1, 0)]).dual(), 1)) == 6


@given(cones)
def test_dual_involution(sigma):
    assert sigma.dual().dual() == sigma


@given(cones, st.integers(0, 3))
def test_dual_membership_matches_brute_force(sigma, bound):
    assert set(lattice_points_in_box(sigma.dual(), bound)) == brute_dual_points(sigma, bound)


@given(pointed_full)
def test_hilbert_basis_generates_box(sigma):
    hb = hilbert_basis(sigma).generators
    assert all(sigma.contains(g) for g in hb)
    assert monoid_points_in_box(sigma, 5) == set(lattice_points_in_box(sigma, 5))


@given(pointed_full)
def test_hilbert_basis_is_minimal(sigma):
    hb = hilbert_basis(sigma).generators
    pts = [p for p in lattice_points_in_box(sigma, 6) if any(p)]
    for g in hb:
        if max(abs(x) for x in g) > 3:
            continue
        for p in pts:
            diff = tuple(a - b for a, b in zip(g, p))
            assert p == g or not any(diff) or not sigma.contains(diff)


@given(cones)
def test_face_anti_isomorphism(sigma):
    n = sigma.ambient_rank
    faces = cone_faces(sigma)
    dual = sigma.dual()
    stars = [dual_face(sigma, f) for f in faces]
    assert len(set(map(lambda c: (c.dim, frozenset(c.rays), frozenset(c.lineality)), stars))) == len(faces)
    assert len(cone_faces(dual)) == len(faces)
    for f, fs in zip(faces, stars):
        assert f.dim + fs.dim == n
        assert fs in cone_faces(dual)
    for (f, fs), (g, gs) in itertools.combinations(zip(faces, stars), 2):
        assert f.contains_cone(g) == gs.contains_cone(fs)


def test_polytope_and_triangulation():
    p = LatticePolytope.from_points([(0, 0), (2, 0), (0, 2), (1, 1), (1, 0)])
    assert set(p.vertices) == {(0, 0), (2, 0), (0, 2)}
    assert p.contains((1, 1)) and not p.in_interior((1, 1)) and not p.in_interior((1, 0))
    pts = [(0, 0), (2, 0), (0, 2), (1, 1), (1, 0)]
    cells = pulling_triangulation(pts)
    assert sum(simplex_volume_index([pts[i] for i in c]) for c in cells) == 4


def test_regular_subdivision_single_cell():
    assert regular_subdivision([(0, 0), (1, 0), (0, 1)], [0, 0, 0]) == [(0, 1, 2)]
    cells = regular_subdivision([(0, 0), (1, 0), (0, 1), (1, 1)], [0, 0, 0, 1])
    assert len(cells) == 2


def test_polyhedron_vertices_and_rays():
    tri = Polyhedron.build([((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)], [], 2)
    assert set(tri.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert tri.is_bounded and tri.dim == 2
    quad = Polyhedron.build([((-1, 0), 0), ((0, -1), 0)], [], 2)
    assert not quad.is_bounded and set(quad.recession_rays) == {(1, 0), (0, 1)}
    empty = Polyhedron.build([((1, 0), -1), ((-1, 0), -1)], [], 2)
    assert empty.is_empty
    assert tri.contains((Fraction(1, 3), Fraction(1, 3)))
