"""Exact linear-programming feasibility via phase-1 simplex.

Only feasibility problems are needed here: convex-hull membership, Minkowski
membership, joint region intersection, convex decomposition.  The solver runs
a textbook phase-1 simplex over rationals with Bland's rule, so it terminates
on every input and the answers are exact.
"""

from __future__ import annotations

from ._rat import ONE, ZERO, rat


def find_nonnegative_solution(a_rows, b) -> list | None:
    """Find x >= 0 with Ax = b exactly, or None when infeasible.

    Returns a basic feasible solution (the one reached by Bland pivoting), so
    callers that need convex weights get a canonical, reproducible choice.
    """
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    if m == 0:
        return []

    # tableau [A | I | b], rows flipped so rhs >= 0; artificials start basic
    tab = []
    for i in range(m):
        row = [rat(x) for x in a_rows[i]] + [ZERO] * m + [rat(b[i])]
        if row[-1] < 0:
            row = [-x for x in row]
        row[n + i] = ONE
        tab.append(row)
    basis = [n + i for i in range(m)]
    width = n + m

    # objective: minimize the artificial sum; reduced-cost row starts as the
    # column sums over the original variables (artificials are basic, cost 0)
    obj = [ZERO] * (width + 1)
    for j in range(n):
        obj[j] = sum((tab[i][j] for i in range(m)), ZERO)
    obj[width] = sum((tab[i][width] for i in range(m)), ZERO)

    while True:
        enter = next((j for j in range(width) if obj[j] > 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][width] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            # phase-1 objective bounded below by 0, never unbounded
            raise AssertionError("phase-1 simplex reported unbounded")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        prow = tab[leave]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * p for x, p in zip(tab[i], prow)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * p for x, p in zip(obj, prow)]
        basis[leave] = enter

    if obj[width] != 0:
        return None
    x = [ZERO] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            x[bvar] = tab[i][width]
    return x


def convex_weights(point, generators) -> list | None:
    """Weights l >= 0 with sum(l) = 1 and sum(l_i * g_i) = point, or None.

    This is exact convex-hull membership: feasible iff the point lies in the
    hull of the generators.
    """
    if not generators:
        return None
    dim = len(point)
    a_rows = [[g[c] for g in generators] for c in range(dim)]
    a_rows.append([ONE] * len(generators))
    b = list(point) + [ONE]
    return find_nonnegative_solution(a_rows, b)


def inequalities_feasible(c_rows, d) -> bool:
    """Is {t : Ct <= d} nonempty, with t unrestricted in sign?

    Encoded as C(u - v) + s = d with u, v, s >= 0.
    """
    if not c_rows:
        return True
    k = len(c_rows[0])
    m = len(c_rows)
    a_rows = []
    for i in range(m):
        row = list(c_rows[i]) + [-x for x in c_rows[i]] + [ZERO] * m
        row[2 * k + i] = ONE
        a_rows.append(row)
    return find_nonnegative_solution(a_rows, d) is not None
