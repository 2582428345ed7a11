"""The self-generating integer tables a_i, c_j, b_i.

    a_1 = 1, a_2 = 2, a_3 = 4,
    c_j = (j+2) a_{j+1} - (j+1) a_j        (c_0 = 2 by convention),
    a_i = (j+1) (i - a_j)   where c_{j-1} <= i < c_j   (i >= 4),
    b_i = that j            (b_i = 1 for i <= 3).

Every array is stored 1-indexed: ``table.a[i]`` is a_i and
``table.a[0]`` is an unused placeholder.  ``table.c[0]`` is c_0 = 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

SEEDS = (1, 2, 4)
C0 = 2


@dataclass(frozen=True)
class LosTable:
    """Immutable a/b/c tables for dimension ``n``, generated past ``n``.

    ``a`` and ``b`` cover indices 1..L and ``c`` covers 0..L-1, where
    ``L >= n + 2``.  ``c_{b_n}`` therefore always exists.
    """

    n: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    _memo: dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    @property
    def length(self) -> int:
        return len(self.a) - 1

    @property
    def bn(self) -> int:
        return self.b[self.n]

    @property
    def b3(self) -> int:
        """b_{b_{b_n}}, the threshold above which the tail bound applies."""
        b = self.b
        return b[b[b[self.n]]]

    def alpha(self) -> tuple[int, ...]:
        """The conjectured maximizer (a_1, ..., a_n)."""
        return self.a[1 : self.n + 1]

    def block(self, j: int) -> range:
        return block(self, j)

    def block_range(self, j: int, upper: int | None = None) -> range:
        """Indices [c_{j-1}, min(c_j - 1, upper)] without the b_n bound check."""
        if j < 1 or j >= len(self.c):
            raise IndexError(f"c_{j} is not tabulated (table length {self.length})")
        hi = self.c[j] - 1
        if upper is not None:
            hi = min(hi, upper)
        return range(self.c[j - 1], hi + 1)

    def truncate(self, n: int) -> LosTable:
        """The table for a smaller dimension; identical to ``build_table(n)``."""
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot truncate table for n={self.n} to n={n}")
        L = _length_for(n)
        return LosTable(n=n, a=self.a[: L + 1], b=self.b[: L + 1], c=self.c[:L])


def _length_for(n: int) -> int:
    return max(n + 2, len(SEEDS))


def generate(length: int) -> tuple[list[int], list[int], list[int]]:
    """Raw lists a[0..length], b[0..length], c[0..length-1] (index 0 of a, b unused)."""
    if length < len(SEEDS):
        raise ValueError("length must be at least 3")
    a = [0, *SEEDS]
    b = [0, 1, 1, 1]
    c = [C0, 3 * a[2] - 2 * a[1]]
    j = 1
    for i in range(len(SEEDS) + 1, length + 1):
        # b is nondecreasing, so the block pointer only moves forward
        while c[j] <= i:
            j += 1
            if j == len(c):
                # a_{j+1} is known here because c_j > j + 1 for j >= 1
                c.append((j + 2) * a[j + 1] - (j + 1) * a[j])
        a.append((j + 1) * (i - a[j]))
        b.append(j)
    while len(c) < length:
        k = len(c)
        c.append((k + 2) * a[k + 1] - (k + 1) * a[k])
    return a, b, c[:length]


def build_table(n: int) -> LosTable:
    """Tables for dimension ``n``; any positive ``n`` is valid."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    a, b, c = generate(_length_for(n))
    return LosTable(n=n, a=tuple(a), b=tuple(b), c=tuple(c))


def block(table: LosTable, j: int) -> range:
    """Index interval [c_{j-1}, min(c_j - 1, n)] for 1 <= j <= b_n + 1.

    May be empty.  Every i >= 2 in the interval has b_i = j.
    """
    if not 1 <= j <= table.bn + 1:
        raise ValueError(f"block index j={j} outside 1..{table.bn + 1} for n={table.n}")
    return table.block_range(j, table.n)


def table_through_block(j: int) -> LosTable:
    """Smallest table whose dimension covers block ``j`` completely (n = c_j - 1)."""
    if j < 1:
        raise ValueError("block index must be positive")
    cj = build_table(j).c[j]
    return build_table(cj - 1)


def check_invariants(table: LosTable) -> list[str]:
    """Return a description of every violated table invariant (empty when sound)."""
    a, b, c = table.a, table.b, table.c
    L = table.length
    bad: list[str] = []
    if a[1:4] != SEEDS:
        bad.append(f"seeds a_1..a_3 = {a[1:4]}")
    if c[0] != C0:
        bad.append(f"c_0 = {c[0]}")
    for j in range(1, len(c)):
        if c[j] != (j + 2) * a[j + 1] - (j + 1) * a[j]:
            bad.append(f"c_{j} does not match its definition")
        if c[j] <= c[j - 1]:
            bad.append(f"c not strictly increasing at {j}")
    for i in range(1, L + 1):
        if i <= 3:
            if b[i] != 1:
                bad.append(f"b_{i} = {b[i]} != 1")
        else:
            j = b[i]
            if a[i] != (j + 1) * (i - a[j]):
                bad.append(f"recurrence fails at i={i}")
            if not c[j - 1] <= i < (c[j] if j < len(c) else i + 1):
                bad.append(f"i={i} not in block b_i={j}")
        if i > 1:
            if a[i] <= a[i - 1]:
                bad.append(f"a not strictly increasing at {i}")
            if b[i] < b[i - 1]:
                bad.append(f"b decreases at {i}")
        if 2 <= i < L:
            if a[i + 1] - a[i] != b[i] + 1:
                bad.append(f"first-difference law fails at i={i}")
            if (a[i + 1] - a[i]) - (a[i] - a[i - 1]) < 0:
                bad.append(f"negative second difference at i={i}")
    return bad
