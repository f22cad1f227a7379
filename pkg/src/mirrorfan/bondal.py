"""Graded dimensions of homs on both sides of Bondal's correspondence.

Objects A(s) (constructible side) and B(s) (coherent side) are indexed by
cones.  Hom(X(s), X(t)) is the semigroup algebra of the dual cone of t when
s contains t, and zero otherwise; here only its degree support is computed.
The A side tests membership against the facet inequalities of the dual cone;
the B side builds the same support from Hilbert bases, so the two paths are
independent and can be compared.

Degrees on a quotient fan Fan(s) are coordinates in the dual of the quotient
lattice N / (span of s), i.e. in the sublattice of M orthogonal to s.
"""

from __future__ import annotations

import itertools

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .fan import OrbitClosureFan, StackyFan, quotient_fan
from .lattice import columns_to_matrix, smith_normal_form, solve_integer, unimodular_inverse
from .polyhedra import Cone, lattice_points_in_box, monoid_points_in_box
from .skeleton import build_skeleton

SIDES = ("A", "B")


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class CccObject:
    side: str
    cone: tuple
    component: tuple = ()

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be A or B, got {self.side!r}")


@dataclass(frozen=True)
class GradedHom:
    source: CccObject
    target: CccObject
    box: int
    support: frozenset = field(default_factory=frozenset)

    def dim(self, degree: Sequence[int]) -> int:
        return int(tuple(degree) in self.support)

    @property
    def is_zero(self) -> bool:
        return not self.support

    def to_dict(self) -> dict:
        return {
            "side": self.source.side,
            "source": list(self.source.cone),
            "target": list(self.target.cone),
            "box": self.box,
            "dims": [{"deg": list(d), "dim": 1} for d in sorted(self.support)],
        }


def _check_cone(fan: StackyFan, c: tuple) -> tuple:
    c = tuple(sorted(c))
    if not fan.has_cone(c):
        raise KeyError(f"{list(c)} is not a cone of the fan")
    return c


def dual_of(fan: StackyFan, tau: tuple) -> Cone:
    return fan.cone(tau).dual()


def hom_graded(fan: StackyFan, side: str, sigma: tuple, tau: tuple, box: int) -> GradedHom:
    """Degree support of Hom(X(sigma), X(tau)) inside the sup-norm box."""
    sigma, tau = _check_cone(fan, sigma), _check_cone(fan, tau)
    if box < 0:
        raise ValueError("box must be nonnegative")
    src, dst = CccObject(side, sigma), CccObject(side, tau)
    if not set(tau) <= set(sigma):
        return GradedHom(src, dst, box)
    if fan.rank == 0:
        return GradedHom(src, dst, box, frozenset({()}))
    dual = dual_of(fan, tau)
    if side == "A":
        support = lattice_points_in_box(dual, box)
    else:
        support = monoid_points_in_box(dual, box)
    return GradedHom(src, dst, box, frozenset(support))


def compose(fan: StackyFan, chain: Sequence[tuple], m: Sequence[int], m2: Sequence[int]) -> tuple:
    """Degree of the composite of degree m in Hom(s, t) with m2 in Hom(t, r)."""
    sigma, tau, rho = (_check_cone(fan, c) for c in chain)
    if not (set(rho) <= set(tau) <= set(sigma)):
        raise NotComposable(f"{list(sigma)} ⊇ {list(tau)} ⊇ {list(rho)} fails")
    if not fan.cone(tau).dual().contains(m) or not fan.cone(rho).dual().contains(m2):
        raise NotComposable("degree outside its hom support")
    return tuple(a + b for a, b in zip(m, m2))


@dataclass(frozen=True)
class GradedMap:
    """A degree-wise map of semigroup algebras given by a partial degree map."""

    source: GradedHom
    target: GradedHom
    rule: tuple  # sorted pairs (degree, image degree or None)

    def image(self, degree) -> Optional[tuple]:
        return dict(self.rule).get(tuple(degree))

    @property
    def kernel_free_support(self) -> frozenset:
        return frozenset(d for d, img in self.rule if img is not None)

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "rule": [{"deg": list(d), "image": None if i is None else list(i)} for d, i in self.rule],
        }


@dataclass(frozen=True)
class Localized:
    """The object X(t/s) on the quotient fan together with the induced map."""

    quotient: OrbitClosureFan
    obj: CccObject
    graded_map: GradedMap


def _localize(fan: StackyFan, side: str, sigma: tuple, tau: tuple, box: int, source: Optional[tuple]) -> Optional[Localized]:
    sigma, tau = _check_cone(fan, sigma), _check_cone(fan, tau)
    source = tau if source is None else _check_cone(fan, source)
    if not set(sigma) <= set(tau):
        return None
    q = quotient_fan(fan, sigma)
    hom = hom_graded(fan, side, source, tau, box)
    if side == "A":
        to_quotient = _projector_by_solving(q, fan.rank)
    else:
        to_quotient = _projector_by_inverse(q, fan)
    rule = tuple(sorted((m, to_quotient(m)) for m in hom.support))
    images = {i for _, i in rule if i is not None}
    qbox = max((max((abs(x) for x in i), default=0) for i in images), default=0)
    target = hom_graded(q.fan, side, q.cone_map[source], q.cone_map[tau], qbox)
    obj = CccObject(side, q.cone_map[tau])
    return Localized(q, obj, GradedMap(hom, target, rule))


def _projector_by_solving(q: OrbitClosureFan, n: int):
    pt = [[q.projection[r][i] for r in range(q.quotient_rank)] for i in range(n)]

    def go(m):
        if q.quotient_rank == 0:
            return () if not any(m) else None
        return solve_integer(pt, list(m))

    return go


def _projector_by_inverse(q: OrbitClosureFan, fan: StackyFan):
    n = fan.rank
    if q.base_cone:
        snf = smith_normal_form(columns_to_matrix([fan.rays[i].primitive for i in q.base_cone], n))
        uinv = unimodular_inverse([list(r) for r in snf.U])
    else:
        uinv = [[int(i == j) for j in range(n)] for i in range(n)]
    r = n - q.quotient_rank

    def go(m):
        w = [sum(uinv[j][i] * m[j] for j in range(n)) for i in range(n)]
        return tuple(w[r:]) if not any(w[:r]) else None

    return go


def restrict_B(fan: StackyFan, sigma: tuple, tau: tuple, box: int = 4, source: Optional[tuple] = None) -> Optional[Localized]:
    """Restriction to the orbit closure of sigma, applied to B(tau).

    Returns None (the zero object) unless tau contains sigma.  The induced map
    on Hom(B(source), B(tau)) keeps a degree iff it is orthogonal to sigma.
    """
    return _localize(fan, "B", sigma, tau, box, source)


def microlocalize_A(fan: StackyFan, sigma: tuple, tau: tuple, box: int = 4, source: Optional[tuple] = None) -> Optional[Localized]:
    """Microlocalization along the sigma sector, applied to A(tau)."""
    return _localize(fan, "A", sigma, tau, box, source)


def square_commutes(fan: StackyFan, sigma: tuple, tau: tuple, box: int, source: Optional[tuple] = None) -> bool:
    """Matching A with B and then localizing agrees with localizing then matching."""
    a = microlocalize_A(fan, sigma, tau, box, source)
    b = restrict_B(fan, sigma, tau, box, source)
    if a is None or b is None:
        return a is None and b is None
    return (
        a.graded_map.rule == b.graded_map.rule
        and a.graded_map.source.support == b.graded_map.source.support
        and a.graded_map.target.support == b.graded_map.target.support
        and a.obj.cone == b.obj.cone
    )


def localization_support_ok(fan: StackyFan, sigma: tuple, tau: tuple, box: int) -> bool:
    """The kept degrees are exactly dual(tau) ∩ sigma^perp, and they land onto the target support."""
    loc = restrict_B(fan, sigma, tau, box)
    if loc is None:
        return not set(sigma) <= set(tau)
    orth = [m for m in lattice_points_in_box(fan.cone(tau).dual(), box)
            if all(sum(a * b for a, b in zip(m, fan.rays[i].primitive)) == 0 for i in sigma)]
    kept = loc.graded_map.kernel_free_support
    if kept != frozenset(orth):
        return False
    images = {loc.graded_map.image(m) for m in kept}
    return images <= loc.graded_map.target.support


@dataclass
class DiagramReport:
    ok: bool
    objects: list
    arrows: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "objects": self.objects, "arrows": self.arrows}


def boundary_diagram(fan: StackyFan, box: int = 4) -> DiagramReport:
    """Compare the A-side and B-side diagrams over the poset of nonzero cones.

    Objects: for each nonzero sigma, the quotient fan; every hom between its
    cones is computed on both sides and compared, and the number of
    components (skeleton strata over sigma) is compared with the torsion of
    the quotient lattice.  Arrows: for sigma properly inside tau, the
    restriction and microlocalization maps on End(X(tau)) must coincide.
    """
    counts = build_skeleton(fan).counts()
    objects, arrows = [], []
    ok = True
    for sigma in fan.nonzero_cones:
        q = quotient_fan(fan, sigma)
        gamma_b = 1
        for d in q.torsion:
            gamma_b *= d
        checked = mismatched = 0
        for s, t in itertools.product(q.fan.cones, repeat=2):
            checked += 1
            if hom_graded(q.fan, "A", s, t, box).support != hom_graded(q.fan, "B", s, t, box).support:
                mismatched += 1
        good = mismatched == 0 and counts[sigma] == gamma_b
        ok = ok and good
        objects.append({
            "cone": list(sigma),
            "quotient_rank": q.quotient_rank,
            "components_A": counts[sigma],
            "components_B": gamma_b,
            "homs_checked": checked,
            "ok": good,
        })
    for sigma in fan.nonzero_cones:
        for tau in fan.cones_containing(sigma):
            if tau == sigma:
                continue
            good = square_commutes(fan, sigma, tau, box)
            ok = ok and good
            arrows.append({"source": list(sigma), "target": list(tau), "ok": good})
    return DiagramReport(ok, objects, arrows)


def verify_pairs(fan: StackyFan, box: int) -> DiagramReport:
    """A-path versus B-path on every ordered cone pair, plus the vanishing rule."""
    rows = []
    ok = True
    for s, t in itertools.product(fan.cones, repeat=2):
        a = hom_graded(fan, "A", s, t, box)
        b = hom_graded(fan, "B", s, t, box)
        agree = a.support == b.support
        vanish = a.is_zero == (not set(t) <= set(s))
        ok = ok and agree and vanish
        rows.append({"source": list(s), "target": list(t), "degrees": len(a.support), "agree": agree, "vanishing_ok": vanish})
    return DiagramReport(ok, rows, [])
