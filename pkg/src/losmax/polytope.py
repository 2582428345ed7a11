"""The feasible polyhedron P, its relaxation Q, and exact vertex checks.

P is cut out by the rows

    (j+1) x_j + x_i >= (j+1) i + eps_ij,    1 <= j <= i <= n,

with eps_ij = 1 only for i = j = 1.  Q keeps the n rows with j = b_i (the
rows tight at alpha); its first row 3 x_1 >= 3 is normalized to x_1 >= 1.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .sequence import LosTable, build_table

Label = tuple[int, int]
PointQ = tuple[Fraction, ...]

DEFAULT_GUARD = 7
# rows of the alpha slack matrix evaluated per numpy chunk
_CHUNK_CELLS = 1 << 21


class GuardError(ValueError):
    """Raised when a brute-force request exceeds the enumeration guard."""


def epsilon(i: int, j: int) -> int:
    return 1 if i == j == 1 else 0


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coef * x[idx] for idx, coef in terms) >= rhs``, labelled (i, j)."""

    terms: tuple[tuple[int, int], ...]
    rhs: int
    label: Label

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self.terms)

    def slack(self, point: Sequence[Fraction | int]) -> Fraction:
        return sum((coef * Fraction(point[idx - 1]) for idx, coef in self.terms), Fraction(0)) - self.rhs

    def __str__(self) -> str:
        lhs = " + ".join(f"{coef}*x{idx}" for idx, coef in self.terms)
        return f"{lhs} >= {self.rhs}  {self.label}"


def p_row(i: int, j: int) -> LinearConstraint:
    if not 1 <= j <= i:
        raise ValueError(f"P has no row ({i}, {j})")
    if i == j:
        terms: tuple[tuple[int, int], ...] = ((i, j + 2),)
    else:
        terms = ((j, j + 1), (i, 1))
    return LinearConstraint(terms, (j + 1) * i + epsilon(i, j), (i, j))


def constraints_P(n: int) -> list[LinearConstraint]:
    """All n(n+1)/2 rows of P, ordered by (i, j)."""
    if n < 1:
        raise ValueError("n must be positive")
    return [p_row(i, j) for i in range(1, n + 1) for j in range(1, i + 1)]


def constraints_Q(n: int, table: LosTable | None = None) -> list[LinearConstraint]:
    """The n rows (i, b_i) of P; row 1 is emitted as x_1 >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    table = _table(n, table)
    rows = [LinearConstraint(((1, 1),), 1, (1, 1))]
    rows.extend(p_row(i, table.b[i]) for i in range(2, n + 1))
    return rows


def check_feasible(point: Sequence[Fraction | int], cons: Sequence[LinearConstraint]) -> tuple[bool, list[Label]]:
    """Exact evaluation of every row; returns (feasible, violated labels)."""
    dim = len(point)
    violated = []
    for row in cons:
        if any(not 1 <= idx <= dim for idx, _ in row.terms):
            raise ValueError(f"row {row.label} references a variable outside 1..{dim}")
        if row.slack(point) < 0:
            violated.append(row.label)
    return not violated, violated


def _table(n: int, table: LosTable | None) -> LosTable:
    if table is None:
        return build_table(n)
    if table.n < n:
        raise ValueError(f"table for n={table.n} cannot serve n={n}")
    return table if table.n == n else table.truncate(n)


def alpha_slacks(table: LosTable) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (i, slack) blocks of alpha against P in exact integers.

    ``slack[r, p-1]`` is the slack of row (i[r], p) for p <= i[r]; entries with
    p > i are masked to a large positive value.
    """
    n = table.n
    # int64 is exact while every term stays far below 2**63
    dtype: type | str = np.int64 if n <= 10**6 else object
    a = np.array(table.a[1 : n + 1], dtype=dtype)
    p = np.arange(1, n + 1, dtype=dtype)
    per = max(1, _CHUNK_CELLS // n)
    for start in range(1, n + 1, per):
        i = np.arange(start, min(n, start + per - 1) + 1, dtype=dtype)
        ai = a[i - 1]
        slack = (p + 1) * a + ai[:, None] - (p + 1) * i[:, None]
        if start == 1:
            slack[0, 0] -= 1  # eps_11
        slack = np.where(p[None, :] <= i[:, None], slack, np.iinfo(np.int64).max if dtype is np.int64 else 1 << 62)
        yield i, slack


def verify_alpha_feasible(n: int, table: LosTable | None = None) -> bool:
    """True iff a_i >= (p+1)(i - a_p) + eps_ip for all 1 <= p <= i <= n."""
    table = _table(n, table)
    return all(bool((slack >= 0).all()) for _, slack in alpha_slacks(table))


@dataclass(frozen=True)
class VertexReport:
    n: int
    feasible: bool
    violated: list[Label]
    tight: list[Label]
    basis: list[Label]
    basis_tight: bool
    determinant: int
    basis_nonsingular: bool

    @property
    def is_vertex(self) -> bool:
        return self.feasible and self.basis_tight and self.basis_nonsingular and len(self.tight) >= self.n

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "feasible": self.feasible,
            "violated": [list(lab) for lab in self.violated],
            "tight": [list(lab) for lab in self.tight],
            "basis": [list(lab) for lab in self.basis],
            "basis_tight": self.basis_tight,
            "determinant": self.determinant,
            "basis_nonsingular": self.basis_nonsingular,
            "is_vertex": self.is_vertex,
        }


def triangular_determinant(rows: Sequence[LinearConstraint], n: int) -> int | None:
    """Determinant of the n x n coefficient matrix if it is triangular, else None."""
    lower = upper = True
    diag = [0] * n
    for r, row in enumerate(rows):
        for idx, coef in row.terms:
            col = idx - 1
            if col == r:
                diag[r] = coef
            elif coef:
                lower &= col < r
                upper &= col > r
    if not (lower or upper):
        return None
    det = 1
    for d in diag:
        det *= d
    return det


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if m[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) // prev
            m[r][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def dense(rows: Sequence[LinearConstraint], n: int) -> list[list[int]]:
    out = []
    for row in rows:
        dense_row = [0] * n
        for idx, coef in row.terms:
            dense_row[idx - 1] += coef
        out.append(dense_row)
    return out


def verify_vertex(n: int, table: LosTable | None = None) -> VertexReport:
    """Check alpha is feasible for P and is the solution of the n rows (i, b_i)."""
    table = _table(n, table)
    violated: list[Label] = []
    tight: list[Label] = []
    for i_block, slack in alpha_slacks(table):
        for r, c in zip(*np.nonzero(slack <= 0)):
            lab = (int(i_block[r]), int(c) + 1)
            (tight if slack[r, c] == 0 else violated).append(lab)
    basis_rows = constraints_Q(n, table)
    alpha = table.alpha()
    basis = [(i, table.b[i]) for i in range(1, n + 1)]
    basis_tight = all(row.slack(alpha) == 0 for row in basis_rows)
    det = triangular_determinant(basis_rows, n)
    if det is None:
        det = bareiss_determinant(dense(basis_rows, n))
    return VertexReport(
        n=n,
        feasible=not violated,
        violated=sorted(violated),
        tight=sorted(tight),
        basis=basis,
        basis_tight=basis_tight,
        determinant=det,
        basis_nonsingular=det != 0,
    )


def solve_integer_system(a: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[list[int], int] | None:
    """Solve ``a x = rhs`` exactly; return (y, d) with x = y / d and d > 0, or None if singular."""
    n = len(a)
    m = [list(row) + [r] for row, r in zip(a, rhs)]
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k]), None)
        if piv is None:
            return None
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
        mk = m[k]
        for r in range(k + 1, n):
            mr = m[r]
            f = mr[k]
            for c in range(k + 1, n + 1):
                mr[c] = (mr[c] * mk[k] - f * mk[c]) // prev
            mr[k] = 0
        prev = mk[k]
    d = m[n - 1][n - 1]
    y = [0] * n
    for k in range(n - 1, -1, -1):
        acc = d * m[k][n] - sum(m[k][c] * y[c] for c in range(k + 1, n))
        y[k] = acc // m[k][k]
    if d < 0:
        d, y = -d, [-v for v in y]
    return y, d


@dataclass(frozen=True)
class Vertex:
    point: PointQ
    basis: tuple[Label, ...]
    """Lexicographically first row subset that produced this point."""


def _enumerate_from(n: int, first: int) -> dict[PointQ, tuple[Label, ...]]:
    rows = constraints_P(n)
    mat = dense(rows, n)
    rhs = [row.rhs for row in rows]
    masks = [sum(1 << (idx - 1) for idx, _ in row.terms) for row in rows]
    full = (1 << n) - 1
    found: dict[PointQ, tuple[Label, ...]] = {}
    for rest in itertools.combinations(range(first + 1, len(rows)), n - 1):
        combo = (first, *rest)
        cover = 0
        for r in combo:
            cover |= masks[r]
        if cover != full:
            continue
        sol = solve_integer_system([mat[r] for r in combo], [rhs[r] for r in combo])
        if sol is None:
            continue
        y, d = sol
        if all(sum(c * v for c, v in zip(mat[r], y)) >= rhs[r] * d for r in range(len(rows))):
            key = tuple(Fraction(v, d) for v in y)
            if key not in found:
                found[key] = tuple(rows[r].label for r in combo)
    return found


def enumerate_vertices(n: int, guard: int = DEFAULT_GUARD, threads: int = 1) -> list[Vertex]:
    """Every vertex of P by trying all n-subsets of rows; sorted by coordinates."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > guard:
        raise GuardError(f"vertex enumeration refused for n={n} > guard {guard}; raise --guard to force it")
    n_rows = n * (n + 1) // 2
    firsts = range(n_rows - n + 1)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_enumerate_from, itertools.repeat(n), firsts))
    else:
        parts = [_enumerate_from(n, f) for f in firsts]
    merged: dict[PointQ, tuple[Label, ...]] = {}
    for part in parts:
        for point, basis in part.items():
            if point not in merged or basis < merged[point]:
                merged[point] = basis
    return [Vertex(point, merged[point]) for point in sorted(merged)]
