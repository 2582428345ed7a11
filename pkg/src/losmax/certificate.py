"""The dual certificate xi* = M^{-1} v and the checks built around it.

M is the identity plus, in each row j <= b_n, the entry j+1 in every column
of block j.  v_i = 1/a_i^2.  Nonnegativity of xi* is the open key
inequality; everything here is exact.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .polytope import constraints_Q
from .rational import fmt_rational, inverse_square_sum
from .sequence import LosTable, build_table, table_through_block

DIRECT = "direct-formula"
SOLVE = "triangular-solve"
BOTH = "both-agree"

# j values whose Lemma Two margin is established by direct computation
DIRECT_J = frozenset({1, 2, 3, 4, 10, 14})


class VerificationError(AssertionError):
    """An identity or inequality that must hold was found to fail."""


def _table(n: int, table: LosTable | None) -> LosTable:
    if table is None:
        return build_table(n)
    if table.n < n:
        raise ValueError(f"table for n={table.n} cannot serve n={n}")
    return table if table.n == n else table.truncate(n)


def inv_sq(table: LosTable, i: int) -> Fraction:
    a = table.a[i]
    return Fraction(1, a * a)


# -- d coefficients ---------------------------------------------------------


def d_coeff(i: int, j: int, table: LosTable) -> int:
    """Signed chain product d_ij for 1 <= i < j <= b_n + 1.

    With k_1 = j - 1 and k_{p+1} = b_{k_p}, stop at the first k_m <= i;
    d_ij = (-1)^m prod(k_p + 1) if k_m == i, else 0.
    """
    if not 1 <= i < j <= table.bn + 1:
        raise ValueError(f"d_({i},{j}) needs 1 <= i < j <= b_n + 1 = {table.bn + 1}")
    key = ("d", i, j)
    memo = table._memo
    if key in memo:
        return memo[key]
    k, m, prod = j - 1, 1, j
    while k > i:
        k = table.b[k]
        m += 1
        prod *= k + 1
    val = (-1) ** m * prod if k == i else 0
    memo[key] = val
    return val


def d_column(j: int, table: LosTable) -> dict[int, int]:
    """Nonzero d_ij for fixed j, keyed by i; these sit on the chain of j."""
    key = ("col", j)
    memo = table._memo
    if key in memo:
        return memo[key]
    out: dict[int, int] = {}
    k, sign, prod = j - 1, -1, 1
    while True:
        prod *= k + 1
        out[k] = sign * prod
        if k == 1:
            break
        k = table.b[k]
        sign = -sign
    memo[key] = out
    return out


# -- the matrix M and its two solution routes --------------------------------


@dataclass(frozen=True)
class CertificateMatrix:
    """Unit upper-triangular M, stored as its off-diagonal row entries."""

    n: int
    rows: dict[int, tuple[tuple[int, int], ...]]

    def entry(self, j: int, i: int) -> int:
        if i == j:
            return 1
        return dict(self.rows.get(j, ())).get(i, 0)

    def apply(self, x: Sequence[Fraction]) -> list[Fraction]:
        out = list(x)
        for j, entries in self.rows.items():
            out[j - 1] += sum((val * x[col - 1] for col, val in entries), Fraction(0))
        return out

    def to_dense(self) -> list[list[int]]:
        return [[self.entry(j, i) for i in range(1, self.n + 1)] for j in range(1, self.n + 1)]


def certificate_matrix(n: int, table: LosTable | None = None) -> CertificateMatrix:
    table = _table(n, table)
    rows = {}
    for j in range(1, table.bn + 1):
        entries = tuple((i, j + 1) for i in table.block(j) if i >= 2 and i != j)
        if entries:
            rows[j] = entries
    return CertificateMatrix(n=n, rows=rows)


def rhs_vector(n: int, table: LosTable | None = None) -> list[Fraction]:
    table = _table(n, table)
    return [inv_sq(table, i) for i in range(1, n + 1)]


def solve_unit_upper(matrix: CertificateMatrix, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Back substitution for a unit upper-triangular sparse system."""
    x = list(rhs)
    for j in range(matrix.n, 0, -1):
        entries = matrix.rows.get(j)
        if not entries:
            continue
        if any(col <= j for col, _ in entries):
            raise ValueError(f"row {j} of M is not strictly upper triangular")
        x[j - 1] = rhs[j - 1] - sum((val * x[col - 1] for col, val in entries), Fraction(0))
    return x


def block_sum(table: LosTable, k: int, upper: int) -> Fraction:
    """sum of 1/a_i^2 over [c_{k-1}, min(c_k - 1, upper)]; empty sums are 0."""
    rng = table.block_range(k, upper)
    key = ("S", k, rng.stop)
    memo = table._memo
    if key not in memo:
        memo[key] = inverse_square_sum([table.a[i] for i in rng])
    return memo[key]


def xstar_entry(i: int, table: LosTable) -> Fraction:
    """x_i* from the closed summation formula (c_0 = 2 convention)."""
    n = table.n
    x = inv_sq(table, i)
    for j in range(i + 1, table.bn + 2):
        d = d_coeff(i, j, table)
        if d:
            x += d * block_sum(table, j - 1, n)
    return x


@dataclass(frozen=True)
class Certificate:
    """Exact xi* entries (all of them in full mode, i <= b_{b_{b_n}} in reduced mode).

    ``certified_by`` lists (mechanism, first, last) index ranges.  ``lower_bound``
    is the smallest certified lower bound over all indices; ``min_entry`` the
    smallest exactly computed entry.
    """

    n: int
    xstar: tuple[Fraction, ...]
    min_entry: Fraction
    first_nonpositive: int | None
    method: str
    mode: str = "full"
    certified_by: tuple[tuple[str, int, int], ...] = ()
    lower_bound: Fraction | None = None
    failures: tuple[str, ...] = ()

    @property
    def verified(self) -> bool:
        if self.failures:
            return False
        bound = self.min_entry if self.lower_bound is None else min(self.min_entry, self.lower_bound)
        return bound >= 0

    def to_json(self, emit_xstar: bool = False) -> dict:
        out: dict = {
            "n": self.n,
            "mode": self.mode,
            "method": self.method,
            "verified": self.verified,
            "min_entry": fmt_rational(self.min_entry),
            "first_nonpositive": self.first_nonpositive,
            "certified_by": [{"mechanism": m, "from": lo, "to": hi} for m, lo, hi in self.certified_by],
        }
        if self.lower_bound is not None:
            out["lower_bound"] = fmt_rational(self.lower_bound)
        if self.failures:
            out["failures"] = list(self.failures)
        if emit_xstar:
            out["xstar"] = [fmt_rational(x) for x in self.xstar]
        return out


def _first_nonpositive(xs: Sequence[Fraction], offset: int = 1) -> int | None:
    return next((i for i, x in enumerate(xs, offset) if x <= 0), None)


def _full_certificate(n: int, xs: list[Fraction], method: str) -> Certificate:
    return Certificate(
        n=n,
        xstar=tuple(xs),
        min_entry=min(xs),
        first_nonpositive=_first_nonpositive(xs),
        method=method,
        certified_by=(("exact", 1, n),),
    )


def xstar_direct(n: int, table: LosTable | None = None) -> Certificate:
    table = _table(n, table)
    return _full_certificate(n, [xstar_entry(i, table) for i in range(1, n + 1)], DIRECT)


def xstar_solve(n: int, table: LosTable | None = None) -> Certificate:
    table = _table(n, table)
    xs = solve_unit_upper(certificate_matrix(n, table), rhs_vector(n, table))
    return _full_certificate(n, xs, SOLVE)


# -- lemmas and the tail bound ----------------------------------------------


def lemma_one_check(n: int, table: LosTable | None = None) -> bool:
    """d_{i,i+1} = -(i+1) for i <= b_n, and d_ij >= 0 for i > b_{b_{b_n}}, i+1 < j <= b_n+1."""
    table = _table(n, table)
    b3 = table.b3
    for j in range(2, table.bn + 2):
        col = d_column(j, table)
        if col.get(j - 1) != -j:
            return False
        if any(d < 0 for i, d in col.items() if b3 < i < j - 1):
            return False
    return True


def lemma_two_margin(table: LosTable, j: int) -> Fraction:
    """1/a_j^2 - (j+1) * sum over block j of 1/a_i^2 (block must be complete)."""
    if table.c[j] - 1 > table.length:
        raise ValueError(f"table too short for block {j}")
    rng = table.block_range(j)
    key = ("S", j, rng.stop)
    memo = table._memo
    if key not in memo:
        memo[key] = inverse_square_sum([table.a[i] for i in rng])
    return inv_sq(table, j) - (j + 1) * memo[key]


def tail_bound(table: LosTable, i: int) -> Fraction:
    """1/a_i^2 - (i+1) * sum_{k=c_{i-1}}^{min(c_i-1, n)} 1/a_k^2, without precondition checks."""
    n = table.n
    if i > table.bn:
        return inv_sq(table, i)
    return inv_sq(table, i) - (i + 1) * block_sum(table, i, n)


def tail_bound_check(n: int, i: int, table: LosTable | None = None) -> Fraction:
    """Lower bound on x_i* for b_{b_{b_n}} < i <= n; checked positive and <= x_i*."""
    table = _table(n, table)
    if not table.b3 < i <= n:
        raise ValueError(f"tail bound needs b_(b_(b_n)) = {table.b3} < i <= n = {n}, got i={i}")
    bound = tail_bound(table, i)
    if bound <= 0:
        raise VerificationError(f"tail bound for i={i}, n={n} is not positive: {bound}")
    if bound > xstar_entry(i, table):
        raise VerificationError(f"tail bound for i={i}, n={n} exceeds x_i*")
    return bound


@dataclass(frozen=True)
class LemmaTwoRecord:
    j: int
    k: int | None
    margin: Fraction
    e_j: int
    case: str  # "direct" | "interior" | "boundary"
    identities_ok: bool | None
    boundary_ok: bool | None = None

    @property
    def holds(self) -> bool:
        return (
            self.margin > 0
            and (self.case == "direct" or self.e_j > 0)
            and self.identities_ok is not False
            and self.boundary_ok is not False
        )

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "case": self.case,
            "margin": fmt_rational(self.margin),
            "e_j": self.e_j,
            "identities_ok": self.identities_ok,
            "boundary_ok": self.boundary_ok,
            "holds": self.holds,
        }


def lemma_two_record(table: LosTable, j: int) -> LemmaTwoRecord:
    a, b, c = table.a, table.b, table.c
    margin = lemma_two_margin(table, j)
    gap = c[j] - c[j - 1]
    e_j = (j + 1) * c[j - 1] * (c[j - 1] - 2 * a[j]) + ((j + 1) - gap) * a[j] ** 2
    # k is defined by c_{k-1} < j <= c_k, so it lags b_j at block starts
    k: int | None = b[j] - 1 if j == c[b[j] - 1] else b[j]
    if not (k >= 1 and c[k - 1] < j <= c[k]):
        k = None
    identities_ok = None
    boundary_ok = None
    on_boundary = k is not None and j == c[k]
    if k is not None:
        expected_gap = -2 * k - 3 if on_boundary else j - 2 * k - 1
        identities_ok = c[j - 1] - 2 * a[j] == (k + 1) * a[k] and (j + 1) - gap == expected_gap
    if j in DIRECT_J:
        case = "direct"
    elif on_boundary:
        case = "boundary"
        ak, ck = a[k], c[k]
        factored = (k + 1) ** 2 * ((ck + 1) * (2 * ck - ak) * ak - (2 * k + 3) * (ck - ak) ** 2)
        floor = (k + 1) ** 2 * (ck - ak) ** 2 * (2 * ak - (2 * k + 3))
        boundary_ok = k >= 4 and e_j == factored and factored >= floor > 0
    else:
        case = "interior"
    return LemmaTwoRecord(j, k, margin, e_j, case, identities_ok, boundary_ok)


def lemma_two_check(j_max: int) -> list[LemmaTwoRecord]:
    if j_max < 1:
        raise ValueError("j_max must be positive")
    table = table_through_block(j_max)
    return [lemma_two_record(table, j) for j in range(1, j_max + 1)]


def iter_lemma_two(j_max: int) -> Iterator[LemmaTwoRecord]:
    table = table_through_block(j_max)
    for j in range(1, j_max + 1):
        yield lemma_two_record(table, j)


# -- conjecture check ---------------------------------------------------------


def check_conjecture(n: int, mode: str = "full", table: LosTable | None = None) -> Certificate:
    """Decide x_i* >= 0 for i <= n.

    ``full`` computes xi* by both routes and requires them to agree.
    ``reduced`` computes x_i* exactly only for i <= b_{b_{b_n}} and certifies
    the rest by the tail bound under Lemma One; indices the tail argument
    cannot cover fall back to exact evaluation.
    """
    table = _table(n, table)
    if mode == "full":
        direct = xstar_direct(n, table)
        solved = xstar_solve(n, table)
        if direct.xstar != solved.xstar:
            bad = next(i for i, (p, q) in enumerate(zip(direct.xstar, solved.xstar), 1) if p != q)
            return Certificate(
                n=n,
                xstar=solved.xstar,
                min_entry=solved.min_entry,
                first_nonpositive=solved.first_nonpositive,
                method=SOLVE,
                certified_by=solved.certified_by,
                failures=(f"direct and triangular routes disagree at i={bad}",),
            )
        return Certificate(
            n=n,
            xstar=solved.xstar,
            min_entry=solved.min_entry,
            first_nonpositive=solved.first_nonpositive,
            method=BOTH,
            certified_by=solved.certified_by,
        )
    if mode != "reduced":
        raise ValueError(f"unknown mode {mode!r}")
    return _reduced_certificate(table)


def _reduced_certificate(table: LosTable) -> Certificate:
    n, bn, b3 = table.n, table.bn, table.b3
    exact = {i: xstar_entry(i, table) for i in range(1, b3 + 1)}
    bounds = list(exact.values())
    certified: list[tuple[str, int, int]] = [("exact", 1, b3)]
    lemma_one = lemma_one_check(n, table)
    for i in range(b3 + 1, bn + 1):
        bound = tail_bound(table, i)
        if lemma_one and bound > 0:
            bounds.append(bound)
            certified.append(("tail-bound", i, i))
        else:
            exact[i] = xstar_entry(i, table)
            bounds.append(exact[i])
            certified.append(("exact-fallback", i, i))
    if n > bn:
        certified.append(("immediate", bn + 1, n))
        bounds.append(inv_sq(table, n))
    return Certificate(
        n=n,
        xstar=tuple(exact[i] for i in range(1, b3 + 1)),
        min_entry=min(exact.values()),
        first_nonpositive=next((i for i in sorted(exact) if exact[i] <= 0), None),
        method=DIRECT,
        mode="reduced",
        certified_by=_merge_ranges(certified),
        lower_bound=min(bounds),
    )


def _merge_ranges(ranges: list[tuple[str, int, int]]) -> tuple[tuple[str, int, int], ...]:
    out: list[tuple[str, int, int]] = []
    for mech, lo, hi in ranges:
        if out and out[-1][0] == mech and out[-1][2] + 1 == lo:
            out[-1] = (mech, out[-1][1], hi)
        else:
            out.append((mech, lo, hi))
    return tuple(out)


# -- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    n: int
    mode: str
    verified: bool
    min_entry: Fraction
    argmin: int
    first_nonpositive: int | None
    lower_bound: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "mode": self.mode,
            "verdict": "verified" if self.verified else "violation",
            "min_entry": fmt_rational(self.min_entry),
            "argmin": self.argmin,
            "first_nonpositive": self.first_nonpositive,
        }
        if self.lower_bound is not None:
            out["lower_bound"] = fmt_rational(self.lower_bound)
        return out


@dataclass
class ConjectureSweep:
    """Incremental xi* over n = n_from..n_to.

    Moving from n-1 to n adds 1/a_n^2 to block b_n, which changes x_i* only by
    d_{i, b_n+1} / a_n^2 on the chain of b_n + 1.
    """

    n_to: int
    mode: str = "full"
    n_from: int = 1
    table: LosTable = field(init=False)
    x: dict[int, Fraction] = field(init=False, default_factory=dict)
    _partial: Fraction = field(init=False, default=Fraction(0))
    _lemma_one: dict[tuple[int, int], bool] = field(init=False, default_factory=dict)
    _tail_min: dict[tuple[int, int], Fraction | None] = field(init=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in ("full", "reduced"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 1 <= self.n_from <= self.n_to:
            raise ValueError("need 1 <= n_from <= n_to")
        self.table = build_table(self.n_to)
        t = self.table
        self.limit = t.bn if self.mode == "full" else t.b3
        if self.n_from > 1:
            start = t.truncate(self.n_from - 1)
            for i in range(1, min(self.limit, start.bn) + 1):
                self.x[i] = xstar_entry(i, start)
            self._partial = block_sum(start, start.bn, start.n)

    def _advance(self, n: int) -> None:
        t = self.table
        bn = t.b[n]
        inc = inv_sq(t, n)
        if n == 1:
            self.x[1] = inc
            return
        if bn != t.b[n - 1]:
            self._partial = Fraction(0)
        self._partial += inc
        for i, d in d_column(bn + 1, t).items():
            if i > self.limit:
                continue
            if i not in self.x:
                self.x[i] = inv_sq(t, i)
            self.x[i] += d * inc

    def _reduced_tail(self, n: int, b3: int, bn: int) -> tuple[bool, Fraction | None]:
        t = self.table
        key = (b3, bn)
        if key not in self._lemma_one:
            self._lemma_one[key] = lemma_one_check(n, t)
            # blocks i < b_n are complete, so their bounds do not depend on n
            margins = [lemma_two_margin(t, i) for i in range(b3 + 1, bn)]
            self._tail_min[key] = min(margins) if margins else None
        lows = [m for m in (self._tail_min[key],) if m is not None]
        if bn > b3:
            lows.append(inv_sq(t, bn) - (bn + 1) * self._partial)
        low = min(lows) if lows else None
        ok = self._lemma_one[key] and (low is None or low > 0)
        return ok, low

    def records(self) -> Iterator[SweepRecord]:
        t = self.table
        b = t.b
        for n in range(self.n_from, self.n_to + 1):
            self._advance(n)
            bn = b[n]
            cap = bn if self.mode == "full" else b[b[bn]]
            items = [(i, self.x[i]) for i in range(1, cap + 1)]
            if n > bn:
                items.append((n, inv_sq(t, n)))
            argmin, low_exact = min(items, key=lambda kv: kv[1])
            first = next((i for i, v in items if v <= 0), None)
            if self.mode == "full":
                yield SweepRecord(n, "full", low_exact >= 0, low_exact, argmin, first)
                continue
            ok, tail_low = self._reduced_tail(n, cap, bn)
            lower = low_exact if tail_low is None else min(low_exact, tail_low)
            if not ok:
                # tail argument unavailable: settle this n exactly instead
                cert = check_conjecture(n, "full", t.truncate(n))
                yield SweepRecord(n, "reduced", cert.verified, cert.min_entry, cert.xstar.index(cert.min_entry) + 1,
                                  cert.first_nonpositive, cert.min_entry)
                continue
            yield SweepRecord(n, "reduced", low_exact >= 0, low_exact, argmin, first, lower)


def _sweep_chunk(args: tuple[int, int, str]) -> list[SweepRecord]:
    lo, hi, mode = args
    return list(ConjectureSweep(hi, mode, lo).records())


def sweep(n_from: int, n_to: int, mode: str = "full", threads: int = 1) -> Iterator[SweepRecord]:
    """Records for every n in [n_from, n_to], in ascending n."""
    if threads <= 1 or n_to - n_from < 2 * threads:
        yield from ConjectureSweep(n_to, mode, n_from).records()
        return
    step = -(-(n_to - n_from + 1) // threads)
    chunks = [(lo, min(n_to, lo + step - 1), mode) for lo in range(n_from, n_to + 1, step)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_sweep_chunk, chunks):
            yield from part


# -- duality -------------------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    n: int
    primal_value: Fraction
    dual_value: Fraction
    dual_residuals: tuple[Fraction, ...]
    nonneg_ok: bool
    min_entry: Fraction

    @property
    def residuals_zero(self) -> bool:
        return all(r == 0 for r in self.dual_residuals)

    @property
    def strong_duality(self) -> bool:
        return self.primal_value == self.dual_value

    @property
    def verified(self) -> bool:
        return self.residuals_zero and self.strong_duality and self.nonneg_ok

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "primal_value": fmt_rational(self.primal_value),
            "dual_value": fmt_rational(self.dual_value),
            "duality_gap": fmt_rational(self.dual_value - self.primal_value),
            "residuals_zero": self.residuals_zero,
            "nonzero_residuals": [i for i, r in enumerate(self.dual_residuals, 1) if r != 0],
            "nonneg_ok": self.nonneg_ok,
            "min_entry": fmt_rational(self.min_entry),
            "strong_duality": self.strong_duality,
            "verified": self.verified,
        }


def duality_check(n: int, table: LosTable | None = None) -> DualityReport:
    """M xi* = v, xi* >= 0, and r . xi* = g(alpha) = sum 1/a_i."""
    table = _table(n, table)
    cert = check_conjecture(n, "full", table)
    xs = list(cert.xstar)
    residuals = [mx - v for mx, v in zip(certificate_matrix(n, table).apply(xs), rhs_vector(n, table))]
    r = [row.rhs for row in constraints_Q(n, table)]
    dual = sum((ri * xi for ri, xi in zip(r, xs)), Fraction(0))
    primal = sum((Fraction(1, a) for a in table.alpha()), Fraction(0))
    return DualityReport(
        n=n,
        primal_value=primal,
        dual_value=dual,
        dual_residuals=tuple(residuals),
        nonneg_ok=cert.min_entry >= 0,
        min_entry=cert.min_entry,
    )
