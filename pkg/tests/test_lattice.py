import itertools
from fractions import Fraction
from math import gcd, prod

import pytest
from hypothesis import given, strategies as st

from mirrorfan.lattice import (
    det,
    matmul,
    orthogonal_lattice_basis,
    primitive,
    quotient_group,
    saturation_basis,
    smith_normal_form,
    solve_integer,
)

entries = st.integers(-9, 9)


def matrices(max_side=5):
    return st.integers(1, max_side).flatmap(
        lambda r: st.integers(1, max_side).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def minors_gcd(a, k):
    rows, cols = len(a), len(a[0])
    g = 0
    for rs in itertools.combinations(range(rows), k):
        for cs in itertools.combinations(range(cols), k):
            g = gcd(g, int(det([[a[i][j] for j in cs] for i in rs])))
    return g


@pytest.mark.parametrize(
    "a, expected",
    [
        ([[2, 0], [0, 2]], (2, 2)),
        ([[-1, 3, -1], [3, -1, -1]], (1, 4)),
        ([[-1, 3], [3, -1]], (1, 8)),
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], (2, 6, 12)),
    ],
)
def test_smith_examples(a, expected):
    assert smith_normal_form(a).divisors == expected


def test_smith_rank_deficient():
    a = [[9, -36, 30], [-36, 192, -180], [30, -180, 180], [0, 0, 0]]
    assert smith_normal_form(a).divisors == (3, 12, 60)


@given(matrices())
def test_smith_decomposition_properties(a):
    snf = smith_normal_form(a)
    U = [list(r) for r in snf.U]
    V = [list(r) for r in snf.V]
    assert matmul(matmul(U, a), V) == snf.diagonal()
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    nonzero = [d for d in snf.divisors if d]
    assert all(d >= 0 for d in snf.divisors)
    assert snf.divisors[: len(nonzero)] == tuple(nonzero)
    assert all(nonzero[i + 1] % nonzero[i] == 0 for i in range(len(nonzero) - 1))


@given(matrices(max_side=4))
def test_smith_matches_determinantal_divisors(a):
    divisors = smith_normal_form(a).divisors
    for k in range(1, min(len(a), len(a[0])) + 1):
        assert prod(divisors[:k]) == minors_gcd(a, k)


def coset_count_brute(gens):
    """|Z^n / span(gens)| for full-rank square gens by brute-force coset enumeration."""
    n = len(gens)
    d = abs(int(det(gens)))
    inv_cols = [[Fraction(x) for x in col] for col in gens]

    def in_lattice(v):
        # solve sum c_i gens_i = v over Q and test integrality
        m = [[inv_cols[j][i] for j in range(n)] + [Fraction(v[i])] for i in range(n)]
        for c in range(n):
            p = next(r for r in range(c, n) if m[r][c] != 0)
            m[c], m[p] = m[p], m[c]
            m[c] = [x / m[c][c] for x in m[c]]
            for r in range(n):
                if r != c and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        return all(row[-1].denominator == 1 for row in m)

    reps = []
    for x in itertools.product(range(d), repeat=n):
        if not any(in_lattice([a - b for a, b in zip(x, r)]) for r in reps):
            reps.append(x)
    return len(reps)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=2), min_size=2, max_size=2))
def test_quotient_group_order_matches_coset_enumeration(gens):
    if det(gens) == 0:
        return
    free, torsion = quotient_group(gens, 2)
    assert free == 0
    assert prod(torsion) == coset_count_brute(gens)


def test_quotient_group_examples():
    assert quotient_group([(2, 0), (0, 2)], 2) == (0, [2, 2])
    assert quotient_group([(-1, 3), (3, -1), (-1, -1)], 2) == (0, [4])
    assert quotient_group([(-1, 3), (3, -1)], 2) == (0, [8])
    assert quotient_group([(2, 0)], 2) == (1, [2])
    assert quotient_group([], 3) == (3, [])
    with pytest.raises(ValueError):
        quotient_group([(1, 2, 3)], 2)


def test_solve_integer_examples():
    assert solve_integer([[2, 0], [0, 3]], [4, 9]) == (2, 3)
    assert solve_integer([[2, 0], [0, 3]], [1, 0]) is None
    x = solve_integer([[1, 1, 1]], [5])
    assert sum(x) == 5


@given(
    st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=2),
    st.lists(st.integers(-6, 6), min_size=2, max_size=2),
)
def test_solve_integer_against_box_search(a, b):
    x = solve_integer(a, b)
    found = next(
        (y for y in itertools.product(range(-20, 21), repeat=2)
         if all(sum(r * yi for r, yi in zip(row, y)) == bi for row, bi in zip(a, b))),
        None,
    )
    if x is None:
        assert found is None
    else:
        assert [sum(r * xi for r, xi in zip(row, x)) for row in a] == list(b)
        if det(a) != 0 and max(map(abs, x)) <= 20:
            assert found == tuple(x)


def test_saturation_and_orthogonal_lattice():
    assert sorted(map(primitive, saturation_basis([(2, 2)], 2))) in ([(1, 1)], [(-1, -1)])
    basis = orthogonal_lattice_basis([(1, 0, 0)], 3)
    assert len(basis) == 2 and all(v[0] == 0 for v in basis)
    assert abs(det([list(v[1:]) for v in basis])) == 1


def test_primitive():
    assert primitive((4, -6)) == (2, -3)
    assert primitive((0, 0)) == (0, 0)
