import pytest
from hypothesis import HealthCheck, settings

from mirrorfan.cli import FIXTURES, fixture_path
from mirrorfan.fan import StackyFan

settings.register_profile("ci", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

FAN_FIXTURES = [f for f in FIXTURES if f != "triangle_polytope"]


def load(name: str) -> StackyFan:
    return StackyFan.load(fixture_path(name))


@pytest.fixture
def p2():
    return load("p2")


@pytest.fixture
def a2():
    return load("a2")


@pytest.fixture
def p1():
    return load("p1")


@pytest.fixture
def stacky_skel():
    return load("stacky_skeleton")


@pytest.fixture
def a2_z2z2():
    return load("a2_mod_z2z2")


def twisted_fan() -> StackyFan:
    """Star fan over a non-regular triangulation of a triangle with a concentric inner copy."""
    A, B, C = (0, 0, 1), (4, 0, 1), (0, 4, 1)
    a, b, c = (1, 1, 1), (2, 1, 1), (1, 2, 1)
    q = (-4, -4, -3)
    pts = [A, B, C, a, b, c, q]
    i = {p: k for k, p in enumerate(pts)}
    top = [(a, b, c), (A, B, b), (A, b, a), (B, C, c), (B, c, b), (C, A, a), (C, a, c)]
    sides = [(q, A, B), (q, B, C), (q, C, A)]
    return StackyFan.from_rays(pts, [[i[p] for p in t] for t in top + sides])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
