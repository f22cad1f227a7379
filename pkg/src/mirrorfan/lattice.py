"""Exact integer linear algebra over lattices.

Matrices are plain lists of rows of Python ints, so every computation is
arbitrary precision.  The Smith normal form here is the engine behind every
quotient-group computation in the package (component groups of subtori,
torsion of orbit-closure lattices).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Matrix = list[list[int]]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return [[int(x) for x in row] for row in rows]


def columns_to_matrix(cols: Sequence[Sequence[int]], n: Optional[int] = None) -> Matrix:
    """Build the n x k matrix whose columns are ``cols``."""
    if not cols:
        if n is None:
            raise ValueError("cannot infer row count from zero columns")
        return [[] for _ in range(n)]
    n = len(cols[0]) if n is None else n
    return [[int(c[i]) for c in cols] for i in range(n)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def matvec(a: Matrix, x: Sequence[int]) -> list:
    return [sum(r * xi for r, xi in zip(row, x)) for row in a]


def transpose(a: Matrix, cols: Optional[int] = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def det(a: Sequence[Sequence]) -> Fraction | int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num / prev if isinstance(num, Fraction) else num // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def primitive(v: Sequence[int]) -> tuple:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon([list(map(Fraction, r)) for r in rows])[1])


def row_echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0} over Q."""
    rref, pivots = row_echelon([[Fraction(x) for x in r] for r in rows]) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(rref, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with D diagonal carrying ``divisors``."""

    U: tuple
    V: tuple
    divisors: tuple
    shape: tuple

    def diagonal(self) -> Matrix:
        rows, cols = self.shape
        d = [[0] * cols for _ in range(rows)]
        for i, x in enumerate(self.divisors):
            d[i][i] = x
        return d


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form by elementary row/column operations.

    The pivot at each stage is the entry of smallest nonzero absolute value,
    ties broken by lowest (row, column) index, so U and V are reproducible.
    """
    A = as_matrix(a)
    rows = len(A)
    if rows == 0:
        raise ValueError("empty matrix")
    cols = len(A[0])
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        A[dst] = [x + f * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for M in (A, V):
            for row in M:
                row[dst] += f * row[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % A[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move the smallest entry of row/column t into the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
            _, i, j = min(cand)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    divisors = tuple(A[i][i] for i in range(min(rows, cols)))
    return SmithDecomposition(
        U=tuple(tuple(r) for r in U),
        V=tuple(tuple(r) for r in V),
        divisors=divisors,
        shape=(rows, cols),
    )


def quotient_group(gens: Sequence[Sequence[int]], ambient_rank: int) -> tuple[int, list[int]]:
    """Structure of Z^n / span(gens) as (free rank, nontrivial torsion divisors)."""
    for g in gens:
        if len(g) != ambient_rank:
            raise ValueError(f"generator {tuple(g)} does not have length {ambient_rank}")
    if ambient_rank == 0:
        return 0, []
    if not gens:
        return ambient_rank, []
    snf = smith_normal_form(columns_to_matrix(gens, ambient_rank))
    nonzero = [d for d in snf.divisors if d != 0]
    return ambient_rank - len(nonzero), [d for d in nonzero if d != 1]


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[tuple]:
    """Some integer x with ``a @ x == b``, or None when no integer solution exists."""
    A = as_matrix(a)
    if len(A) != len(b):
        raise ValueError("dimension mismatch")
    cols = len(A[0]) if A else 0
    if cols == 0:
        return () if all(x == 0 for x in b) else None
    snf = smith_normal_form(A)
    # D y = U b, x = V y
    c = matvec([list(r) for r in snf.U], b)
    y = [0] * cols
    for i, ci in enumerate(c):
        d = snf.divisors[i] if i < len(snf.divisors) else 0
        if d == 0:
            if ci != 0:
                return None
        elif ci % d:
            return None
        else:
            y[i] = ci // d
    return tuple(matvec([list(r) for r in snf.V], y))


def saturation_basis(vectors: Sequence[Sequence[int]], n: int) -> list[tuple]:
    """Integer basis of (span_Q vectors) ∩ Z^n."""
    if not vectors:
        return []
    snf = smith_normal_form(columns_to_matrix(vectors, n))
    r = sum(1 for d in snf.divisors if d)
    # columns of U^{-1} give an adapted basis of Z^n; first r span the saturation
    uinv = unimodular_inverse([list(row) for row in snf.U])
    return [tuple(uinv[i][j] for i in range(n)) for j in range(r)]


def orthogonal_lattice_basis(vectors: Sequence[Sequence[int]], n: int) -> list[tuple]:
    """Integer basis of {m in Z^n : <m, v> = 0 for all v in vectors}."""
    if not vectors:
        return [tuple(row) for row in identity(n)]
    # kernel of the matrix with rows = vectors
    rows = as_matrix(vectors)
    snf = smith_normal_form(rows)
    r = sum(1 for d in snf.divisors if d)
    V = snf.V
    return [tuple(V[i][j] for i in range(n)) for j in range(r, n)]


def unimodular_inverse(u: Matrix) -> Matrix:
    n = len(u)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(u)]
    rref, _ = row_echelon(aug)
    out = [[int(x) for x in row[n:]] for row in rref]
    return out


def coordinates_in_basis(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Optional[tuple]:
    """Integer coordinates of v in the given basis vectors, or None if v is not in their Z-span."""
    if not basis:
        return () if all(x == 0 for x in v) else None
    return solve_integer(columns_to_matrix(basis, len(v)), v)
