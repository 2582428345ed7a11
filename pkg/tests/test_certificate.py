from fractions import Fraction as F

import pytest

from losmax.certificate import (
    BOTH,
    certificate_matrix,
    check_conjecture,
    d_coeff,
    d_column,
    duality_check,
    lemma_one_check,
    lemma_two_check,
    lemma_two_margin,
    sweep,
    tail_bound,
    tail_bound_check,
    xstar_direct,
    xstar_solve,
)
from losmax.sequence import build_table, table_through_block

from _oracles import dual_system, gauss_solve, matmul

GOLDEN_24 = [
    F(123587941503427, 187646731272000),
    F(3536905093973, 27799515744000),
    F(44159, 1016064),
    F(9439261073843, 750586925088000),
    F(47, 4050),
]

# rows 1-5 of the displayed inverse for n = 24
MINV_24 = [
    [1, -2, -2] + [6] * 6 + [8] * 4 + [-30] * 10 + [-36],
    [0, 1, 0] + [-3] * 6 + [0] * 4 + [15] * 10 + [18],
    [0, 0, 1] + [0] * 6 + [-4] * 4 + [0] * 10 + [0],
    [0, 0, 0, 1] + [0] * 5 + [0] * 4 + [-5] * 10 + [0],
    [0, 0, 0, 0, 1] + [0] * 4 + [0] * 4 + [0] * 10 + [-6],
]


@pytest.fixture(scope="module")
def t24():
    return build_table(24)


@pytest.mark.parametrize("i, j, expected", [(1, 2, -2), (1, 5, -30), (2, 4, 0), (2, 5, 15), (5, 6, -6), (4, 6, 0)])
def test_d_examples(t24, i, j, expected):
    assert d_coeff(i, j, t24) == expected


def test_d_bounds(t24):
    with pytest.raises(ValueError):
        d_coeff(3, 3, t24)
    with pytest.raises(ValueError):
        d_coeff(1, 7, t24)


def test_column_matches_definition():
    t = build_table(20000)
    for j in range(2, t.bn + 2):
        col = d_column(j, t)
        for i in range(1, j):
            assert d_coeff(i, j, t) == col.get(i, 0)


def test_matrix_pattern_24(t24):
    m = certificate_matrix(24, t24)
    expected = {1: (2, range(2, 4)), 2: (3, range(4, 10)), 3: (4, range(10, 14)), 4: (5, range(14, 24)), 5: (6, range(24, 25))}
    assert set(m.rows) == set(expected)
    for j, (val, cols) in expected.items():
        assert m.rows[j] == tuple((c, val) for c in cols)


def test_d_reproduces_displayed_inverse(t24):
    for i, row in enumerate(MINV_24, 1):
        for k in range(i + 1, 25):
            j = t24.b[k] + 1
            assert (d_coeff(i, j, t24) if j > i else 0) == row[k - 1], (i, k)


def test_displayed_inverse_times_m_is_identity(t24):
    dense = certificate_matrix(24, t24).to_dense()
    prod = matmul(MINV_24, dense)
    for i, row in enumerate(prod):
        assert row == [1 if k == i else 0 for k in range(24)]


def test_golden_fractions(t24):
    direct = xstar_direct(24, t24)
    solved = xstar_solve(24, t24)
    assert list(direct.xstar[:5]) == GOLDEN_24
    assert direct.xstar == solved.xstar


def test_tail_entries_are_reciprocal_squares():
    for n in (24, 100, 777):
        t = build_table(n)
        xs = xstar_solve(n, t).xstar
        assert all(xs[i - 1] == F(1, t.a[i] ** 2) for i in range(t.bn + 1, n + 1))


def test_n1():
    assert xstar_direct(1).xstar == (1,)
    assert xstar_solve(1).xstar == (1,)


def test_n3_by_hand():
    # x1 + 2(x2 + x3) = 1, x2 = 1/4, x3 = 1/16
    expected = (F(3, 8), F(1, 4), F(1, 16))
    assert xstar_direct(3).xstar == expected
    assert xstar_solve(3).xstar == expected


@pytest.mark.parametrize("n", list(range(1, 41)) + [57, 88, 120])
def test_both_routes_match_dense_solve(n):
    t = build_table(n)
    rows, rhs = dual_system(t, n)
    ref = gauss_solve(rows, rhs)
    assert xstar_direct(n, t).xstar == ref
    assert xstar_solve(n, t).xstar == ref


def test_check_conjecture_24_full(t24):
    cert = check_conjecture(24, "full", t24)
    assert cert.verified and cert.method == BOTH and cert.first_nonpositive is None
    assert cert.min_entry == F(1, 90**2)


def test_check_conjecture_small():
    assert check_conjecture(1).verified
    assert check_conjecture(1, "reduced").verified
    with pytest.raises(ValueError):
        check_conjecture(5, "sideways")


def test_reduced_records_mechanisms():
    cert = check_conjecture(24, "reduced")
    assert cert.verified
    assert cert.certified_by == (("exact", 1, 1), ("tail-bound", 2, 5), ("immediate", 6, 24))
    assert cert.xstar == (GOLDEN_24[0],)


def test_full_and_reduced_agree():
    big = build_table(300)
    for n in range(1, 301):
        t = big.truncate(n)
        assert check_conjecture(n, "full", t).verified == check_conjecture(n, "reduced", t).verified


def test_sweep_matches_direct_certificates():
    recs = {r.n: r for r in sweep(1, 400)}
    for n in (1, 2, 3, 23, 24, 25, 150, 399, 400):
        cert = check_conjecture(n)
        assert recs[n].min_entry == cert.min_entry
        assert recs[n].verified == cert.verified


def test_reduced_sweep_matches_reduced_certificates():
    recs = {r.n: r for r in sweep(1, 500, "reduced")}
    for n in (1, 5, 24, 100, 333, 500):
        cert = check_conjecture(n, "reduced")
        assert recs[n].verified == cert.verified
        assert recs[n].lower_bound == cert.lower_bound


def test_sweep_can_start_midway():
    whole = [r.to_json() for r in sweep(1, 300)]
    tail = [r.to_json() for r in sweep(137, 300)]
    assert whole[136:] == tail


def test_sweep_threads_identical():
    assert [r.to_json() for r in sweep(1, 200, "reduced")] == [r.to_json() for r in sweep(1, 200, "reduced", threads=3)]


def test_lemma_one_examples():
    assert lemma_one_check(24)
    assert lemma_one_check(1)


def test_lemma_one_literal_against_d_coeff():
    for n in (24, 300, 2000):
        t = build_table(n)
        b3 = t.b3
        literal = all(d_coeff(i, i + 1, t) == -(i + 1) for i in range(1, t.bn + 1)) and all(
            d_coeff(i, j, t) >= 0 for i in range(b3 + 1, t.bn + 1) for j in range(i + 2, t.bn + 2)
        )
        assert literal
        assert lemma_one_check(n, t) == literal


def test_lemma_two_j5():
    rec = lemma_two_check(5)[4]
    assert rec.k == 2 and rec.case == "interior"
    t = build_table(10)
    assert t.c[4] - 2 * t.a[5] == 24 - 18 == 6 == 3 * t.a[2]
    assert rec.identities_ok and rec.holds


def test_lemma_two_direct_cases():
    recs = {r.j: r for r in lemma_two_check(14)}
    for j in (1, 2, 3, 4, 10, 14):
        assert recs[j].case == "direct" and recs[j].margin > 0


def test_lemma_two_boundary_j24():
    rec = lemma_two_check(24)[23]
    assert rec.case == "boundary" and rec.k == 4
    t = table_through_block(24)
    a4, c4 = t.a[4], t.c[4]
    floor = 25 * (c4 - a4) ** 2 * (2 * a4 - 11)
    assert rec.e_j == 25 * ((c4 + 1) * (2 * c4 - a4) * a4 - 11 * (c4 - a4) ** 2)
    assert rec.e_j >= floor > 0
    assert rec.boundary_ok and rec.holds


def test_lemma_two_margin_matches_naive_sum():
    t = table_through_block(40)
    for j in range(1, 41):
        naive = F(1, t.a[j] ** 2) - (j + 1) * sum(F(1, t.a[i] ** 2) for i in range(t.c[j - 1], t.c[j]))
        assert lemma_two_margin(t, j) == naive


def test_tail_bound_examples(t24):
    assert tail_bound_check(24, 24, t24) == F(1, 8100)
    bound = tail_bound_check(24, 5, t24)
    assert 0 < bound <= F(47, 4050)
    assert t24.b3 == 1
    with pytest.raises(ValueError):
        tail_bound_check(24, 1, t24)
    assert tail_bound_check(24, 3, t24) > 0


def test_tail_bound_dominated_by_lemma_two():
    for n in (50, 300, 1200):
        t = build_table(n)
        full = table_through_block(t.bn)
        for i in range(t.b3 + 1, t.bn + 1):
            margin = lemma_two_margin(full, i)
            assert margin > 0
            assert tail_bound(t, i) >= margin
            assert tail_bound_check(n, i, t) > 0


def test_duality_examples():
    r1 = duality_check(1)
    assert r1.primal_value == r1.dual_value == 1
    r3 = duality_check(3)
    assert r3.dual_value == 1 * F(3, 8) + 4 * F(1, 4) + 6 * F(1, 16) == F(7, 4) == 1 + F(1, 2) + F(1, 4)
    r24 = duality_check(24)
    assert r24.verified and r24.residuals_zero and r24.strong_duality
