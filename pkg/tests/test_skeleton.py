import itertools
from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, strategies as st

from conftest import FAN_FIXTURES, load
from mirrorfan.fan import quotient_fan
from mirrorfan.skeleton import (
    RankUnsupported,
    build_skeleton,
    component_group,
    render_skeleton_2d,
    sector_cover,
    subtorus_intersections,
)


def brute_group_points(gens, n=2):
    """Points g of (1/D Z / Z)^n with <b, g> integral, D the product of |minors|."""
    d = 1
    for a, b in itertools.combinations(gens, 2):
        d *= max(1, abs(a[0] * b[1] - a[1] * b[0]))
    pts = []
    for x in itertools.product(range(d), repeat=n):
        g = [Fraction(c, d) for c in x]
        if all(sum(bi * gi for bi, gi in zip(b, g)).denominator == 1 for b in gens):
            pts.append(tuple(g))
    return pts


def test_stacky_example_counts(stacky_skel):
    triple = subtorus_intersections(stacky_skel, (0,), (1,), (2,))
    assert triple.group_order == 4
    pair = subtorus_intersections(stacky_skel, (0,), (1,))
    assert pair.group_order == 8
    counts = build_skeleton(stacky_skel).counts()
    assert (counts[(0, 1)], counts[(0, 2)], counts[(1, 2)]) == (8, 4, 4)
    assert counts[(0,)] == counts[(1,)] == counts[(2,)] == 1


def test_intersection_orders_match_brute_force(stacky_skel):
    for cones in [((0,), (1,)), ((0,), (2,)), ((1,), (2,)), ((0,), (1,), (2,))]:
        gens = [g for c in cones for g in stacky_skel.stacky_primitives(c)]
        assert subtorus_intersections(stacky_skel, *cones).group_order == len(brute_group_points(gens))


def test_p2_has_seven_strata(p2):
    graph = build_skeleton(p2)
    assert len(graph.strata) == 7
    assert len(graph.boundary()) == 6
    assert {s.torus_dim for s in graph.strata} == {0, 1, 2}


def test_orbifold_counts(a2_z2z2):
    counts = build_skeleton(a2_z2z2).counts()
    assert counts == {(): 1, (0,): 2, (1,): 2, (0, 1): 4}


def test_component_labels_round_trip(stacky_skel):
    for c in stacky_skel.cones:
        g = component_group(stacky_skel, c)
        for lab in g.labels():
            assert g.label_of(g.representative(lab)) == lab


def test_closure_order(p2):
    graph = build_skeleton(p2)
    order = set(graph.closure_order)
    idx = {s.cone: i for i, s in enumerate(graph.strata)}
    assert (idx[(0,)], idx[(0, 1)]) in order
    assert (idx[()], idx[(0, 1)]) in order
    assert (idx[(0, 1)], idx[(0,)]) not in order


def test_orbifold_closure_order(a2_z2z2):
    graph = build_skeleton(a2_z2z2)
    ray = [i for i, s in enumerate(graph.strata) if s.cone == (0,)]
    top = [i for i, s in enumerate(graph.strata) if s.cone == (0, 1)]
    order = set(graph.closure_order)
    # every corner point lies in exactly one component of each ray subgroup
    for j in top:
        assert sum((i, j) in order for i in ray) == 1


@pytest.mark.parametrize("name", FAN_FIXTURES)
def test_sector_cover_on_fixtures(name):
    report = sector_cover(load(name))
    assert report.ok, report.to_dict()


def test_sector_cover_fibers(a2_z2z2):
    report = sector_cover(a2_z2z2)
    piece = next(p for p in report.pieces if p["cone"] == [0])
    assert piece["restricted_strata"] == 6 and piece["quotient_strata"] == 3 and piece["fiber"] == 2


@given(st.sampled_from(FAN_FIXTURES), st.data())
def test_base_change_coherence(name, data):
    """Quotienting by sigma and then by tau/sigma agrees with quotienting by tau."""
    fan = load(name)
    sigma = data.draw(st.sampled_from(fan.cones))
    tau = data.draw(st.sampled_from(fan.cones_containing(sigma)))
    direct = quotient_fan(fan, tau)
    step = quotient_fan(fan, sigma)
    if step.quotient_rank == 0:
        assert direct.quotient_rank == 0
        return
    two = quotient_fan(step.fan, step.cone_map[tau])
    assert two.quotient_rank == direct.quotient_rank
    assert len(two.fan.cones) == len(direct.fan.cones)
    if direct.quotient_rank:
        a = sorted(build_skeleton(two.fan).counts().values())
        b = sorted(build_skeleton(direct.fan).counts().values())
        assert a == b
    assert prod(two.torsion) * prod(step.torsion) == prod(direct.torsion)


def test_render(p2, a2):
    svg = render_skeleton_2d(build_skeleton(p2))
    assert svg.count('class="subtorus"') == 3
    assert svg.count('class="corner"') == 4
    svg = render_skeleton_2d(build_skeleton(a2))
    assert svg.count('class="subtorus"') == 2 and 'class="hair"' in svg
    with pytest.raises(RankUnsupported):
        render_skeleton_2d(build_skeleton(load("p1")))


def test_stratum_json(a2_z2z2):
    d = build_skeleton(a2_z2z2).strata[-1].to_dict()
    assert set(d) == {"cone", "label", "component", "dims"}
    assert d["dims"] == [0, 2] and all("/" in x for x in d["component"])
