"""A small exact simplex solver (Bland's rule) over Fractions.

scipy's solvers are floating point; flatness and rigidity decisions need
exact answers, so the few LPs the toolkit solves go through here.
"""
from fractions import Fraction


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(T, basis, r, c):
    pv = T[r][c]
    T[r] = [x / pv for x in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _run(T, basis, obj, allowed):
    """Maximize the objective stored in row `obj` (as reduced costs)."""
    while True:
        cost = T[obj]
        col = next((j for j in allowed if cost[j] < 0), None)
        if col is None:
            return
        best = None
        for i in range(len(T)):
            if i == obj or i >= len(basis) or T[i][col] <= 0:
                continue
            ratio = T[i][-1] / T[i][col]
            if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                best = (ratio, i)
        if best is None:
            raise Unbounded()
        _pivot(T, basis, best[1], col)


def maximize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """max c.y subject to A_ub y <= b_ub, A_eq y = b_eq with y free.

    Returns (value, y). Raises Infeasible or Unbounded.
    """
    n = len(c)
    rows = [([Fraction(x) for x in a], Fraction(b), True) for a, b in zip(A_ub, b_ub)]
    rows += [([Fraction(x) for x in a], Fraction(b), False) for a, b in zip(A_eq, b_eq)]
    m = len(rows)
    n_slack = sum(1 for _, _, ub in rows if ub)
    # columns: u (n), w (n), slacks, artificials (m), rhs
    width = 2 * n + n_slack + m
    T = []
    s = 0
    for i, (a, b, ub) in enumerate(rows):
        row = a + [-x for x in a] + [Fraction(0)] * (n_slack + m) + [b]
        if ub:
            row[2 * n + s] = Fraction(1)
            s += 1
        if b < 0:
            row = [-x for x in row]
        row[2 * n + n_slack + i] = Fraction(1)
        T.append(row)
    basis = [2 * n + n_slack + i for i in range(m)]
    # phase 1: minimize the sum of artificials
    phase1 = [Fraction(0)] * (width + 1)
    for row in T:
        phase1 = [p - x for p, x in zip(phase1, row)]
    for i in range(m):
        phase1[2 * n + n_slack + i] = Fraction(0)
    T.append(phase1)
    _run(T, basis, m, range(width))
    if T[m][-1] != 0:
        raise Infeasible()
    T.pop()
    # drive artificials out of the basis where possible
    real = 2 * n + n_slack
    for i in range(m):
        if basis[i] >= real:
            col = next((j for j in range(real) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)
    keep = [i for i in range(m) if basis[i] < real]
    T = [T[i][:real] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    cost = [Fraction(-x) for x in c] + [Fraction(x) for x in c] + [Fraction(0)] * n_slack + \
        [Fraction(0)]
    for i, b in enumerate(basis):
        if cost[b] != 0:
            f = cost[b]
            cost = [x - f * y for x, y in zip(cost, T[i])]
    T.append(cost)
    _run(T, basis, len(T) - 1, range(real))
    y = [Fraction(0)] * (2 * n)
    for i, b in enumerate(basis):
        if b < 2 * n:
            y[b] = T[i][-1]
    sol = tuple(y[j] - y[n + j] for j in range(n))
    return T[-1][-1], sol


def strictly_feasible_point(A_eq, b_eq, A_strict, b_strict, A_weak=(), b_weak=()):
    """A point with A_eq y = b_eq, A_strict y > b_strict, A_weak y >= b_weak,
    or None. Strictness is certified by a positive slack."""
    n = len(A_eq[0]) if A_eq else len(A_strict[0]) if A_strict else \
        len(A_weak[0]) if A_weak else 0
    c = [0] * n + [1]
    ub, bu = [], []
    for a, b in zip(A_strict, b_strict):
        ub.append([-x for x in a] + [1])
        bu.append(-b)
    for a, b in zip(A_weak, b_weak):
        ub.append([-x for x in a] + [0])
        bu.append(-b)
    ub.append([0] * n + [1])
    bu.append(1)
    eq = [list(a) + [0] for a in A_eq]
    try:
        val, y = maximize(c, ub, bu, eq, list(b_eq))
    except Infeasible:
        return None
    if A_strict and val <= 0:
        return None
    return y[:n]
