import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import load
from mirrorfan.bondal import (
    NotComposable,
    boundary_diagram,
    compose,
    hom_graded,
    localization_support_ok,
    microlocalize_A,
    restrict_B,
    square_commutes,
    verify_pairs,
)
from mirrorfan.fan import StackyFan

P1xP1 = StackyFan.from_rays([(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])


def brute_dual(fan, tau, box):
    gens = [fan.rays[i].primitive for i in tau]
    return {m for m in itertools.product(range(-box, box + 1), repeat=fan.rank)
            if all(sum(a * b for a, b in zip(m, g)) >= 0 for g in gens)}


def test_hom_examples(a2):
    h = hom_graded(a2, "A", (0, 1), (0,), 1)
    assert len(h.support) == 6 and all(m[0] >= 0 for m in h.support)
    assert len(hom_graded(a2, "B", (0, 1), (0, 1), 1).support) == 4
    assert hom_graded(a2, "A", (0,), (0, 1), 3).is_zero
    assert hom_graded(a2, "B", (0,), (0, 1), 3).is_zero
    assert hom_graded(a2, "A", (0, 1), (), 0).support == {(0, 0)}


@pytest.mark.parametrize("fan", [load("a2"), load("p2"), load("stacky_skeleton"), load("p1"), P1xP1],
                         ids=["a2", "p2", "stacky", "p1", "p1xp1"])
def test_paths_agree_with_brute_force(fan):
    for s, t in itertools.product(fan.cones, repeat=2):
        a = hom_graded(fan, "A", s, t, 3)
        b = hom_graded(fan, "B", s, t, 3)
        assert a.support == b.support
        expected = brute_dual(fan, t, 3) if set(t) <= set(s) else set()
        assert a.support == expected


def test_compose_examples(a2):
    assert compose(a2, [(0, 1), (0,), ()], (1, 0), (0, 3)) == (1, 3)
    assert compose(a2, [(0, 1), (0, 1), (0,)], (0, 0), (2, -1)) == (2, -1)
    with pytest.raises(NotComposable):
        compose(a2, [(0,), (0, 1), ()], (0, 0), (0, 0))


@given(st.data())
def test_composition_is_associative(data):
    fan = load("p2")
    chain = data.draw(st.sampled_from([c for c in itertools.product(fan.cones, repeat=4)
                                       if set(c[3]) <= set(c[2]) <= set(c[1]) <= set(c[0])]))
    degs = [data.draw(st.sampled_from(sorted(hom_graded(fan, "A", chain[i], chain[i + 1], 4).support)))
            for i in range(3)]
    left = compose(fan, [chain[0], chain[2], chain[3]], compose(fan, chain[:3], degs[0], degs[1]), degs[2])
    right = compose(fan, [chain[0], chain[1], chain[3]], degs[0], compose(fan, chain[1:], degs[1], degs[2]))
    assert left == right
    assert compose(fan, [chain[0], chain[0], chain[1]], (0, 0), degs[0]) == degs[0]


def test_restrict_example(a2):
    loc = restrict_B(a2, (0,), (0, 1), 4)
    assert loc.obj.cone == (0,) and loc.quotient.quotient_rank == 1
    assert loc.graded_map.image((2, 3)) is None
    assert loc.graded_map.image((0, 3)) == (3,)
    assert restrict_B(a2, (0, 1), (0,), 4) is None
    assert microlocalize_A(a2, (0, 1), (0,), 4) is None


def test_trivial_restriction_is_identity(p2):
    for tau in p2.cones:
        loc = restrict_B(p2, (), tau, 3)
        assert all(img == m for m, img in loc.graded_map.rule)


def test_full_restriction_keeps_only_zero(p2):
    loc = microlocalize_A(p2, (0, 1), (0, 1), 3)
    assert loc.graded_map.kernel_free_support == {(0, 0)}
    assert loc.graded_map.target.support == {()}


@pytest.mark.parametrize("name", ["a2", "p2", "stacky_skeleton", "a2_mod_z2z2"])
def test_square_and_support(name):
    fan = load(name)
    for s in fan.cones:
        for t in fan.cones:
            assert square_commutes(fan, s, t, 3)
            if set(s) <= set(t):
                assert localization_support_ok(fan, s, t, 3)


def test_localization_is_functorial(p2):
    """Composing then localizing equals localizing then composing."""
    for rho, tau, pi in itertools.product(p2.cones, repeat=3):
        if not set(pi) <= set(tau) <= set(rho):
            continue
        for sigma in p2.cones:
            if not set(sigma) <= set(pi):
                continue
            f = restrict_B(p2, sigma, tau, 2, source=rho)
            g = restrict_B(p2, sigma, pi, 2, source=tau)
            fg = restrict_B(p2, sigma, pi, 4, source=rho)
            for m, im in f.graded_map.rule:
                for m2, im2 in g.graded_map.rule:
                    comp = fg.graded_map.image(compose(p2, [rho, tau, pi], m, m2))
                    if im is None or im2 is None:
                        assert comp is None
                    else:
                        assert comp == tuple(a + b for a, b in zip(im, im2))


def test_boundary_diagram_examples(p1, p2, a2_z2z2):
    d = boundary_diagram(p1, 2)
    assert d.ok and len(d.objects) == 2 and not d.arrows
    assert all(o["quotient_rank"] == 0 and o["homs_checked"] == 1 for o in d.objects)
    d = boundary_diagram(p2, 4)
    assert d.ok and len(d.objects) == 6
    d = boundary_diagram(a2_z2z2, 3)
    assert d.ok
    assert [(o["components_A"], o["components_B"]) for o in d.objects] == [(2, 2), (2, 2), (4, 4)]


def test_verify_pairs(p2):
    report = verify_pairs(p2, 2)
    assert report.ok and len(report.objects) == len(p2.cones) ** 2


def test_hom_json(a2):
    d = hom_graded(a2, "A", (0, 1), (0, 1), 1).to_dict()
    assert d["source"] == [0, 1] and d["box"] == 1
    assert {tuple(x["deg"]) for x in d["dims"]} == {(0, 0), (0, 1), (1, 0), (1, 1)}
