"""Dense exact linear algebra used only as an independent check."""

from fractions import Fraction as F


def gauss_solve(rows, rhs):
    n = len(rows)
    m = [[F(v) for v in r] + [F(b)] for r, b in zip(rows, rhs)]
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            return None
        m[k], m[piv] = m[piv], m[k]
        m[k] = [v / m[k][k] for v in m[k]]
        for r in range(n):
            if r != k and m[r][k] != 0:
                f = m[r][k]
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
    return tuple(m[r][n] for r in range(n))


def dual_system(table, n):
    """Rows x_j + (j+1) * sum_{i=c_{j-1}}^{min(c_j-1,n)} x_i = 1/a_j^2, from raw c values."""
    c, a, b = table.c, table.a, table.b
    rows, rhs = [], []
    for j in range(1, n + 1):
        row = [0] * n
        row[j - 1] = 1
        if j <= b[n]:
            for i in range(c[j - 1], min(c[j] - 1, n) + 1):
                row[i - 1] += j + 1
        rows.append(row)
        rhs.append(F(1, a[j] ** 2))
    return rows, rhs


def matmul(x, y):
    return [[sum(F(p) * q for p, q in zip(r, col)) for col in zip(*y)] for r in x]
