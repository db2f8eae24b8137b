"""Dense exact linear algebra over rationals.

Vectors are tuples, matrices are sequences of row tuples.  Everything here is
small and dense; dimensions in this package stay in the tens, so Gaussian
elimination with exact pivoting is the right tool.
"""

from __future__ import annotations

from ._rat import ONE, ZERO, rat

Vec = tuple
Mat = list


def vec_dot(a, b):
    acc = ZERO
    for x, y in zip(a, b):
        if x and y:
            acc += x * y
    return acc


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a):
    return tuple(c * x for x in a)


def vec_is_zero(a) -> bool:
    return all(x == 0 for x in a)


def rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices).

    The input rows are copied; exact arithmetic, first nonzero entry used as
    pivot within each column.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    _, pivots = rref(rows)
    return len(pivots)


def nullspace(rows, ncols: int) -> list[tuple]:
    """Basis of {x : Mx = 0} for the matrix with the given rows."""
    if not rows:
        return [tuple(ONE if j == i else ZERO for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve_affine(a_rows, b) -> tuple[tuple, list[tuple]] | None:
    """Solve Ax = b exactly.

    Returns (particular solution, nullspace basis), or None when inconsistent.
    """
    if not a_rows:
        n = 0
        return (), []
    n = len(a_rows[0])
    aug = [list(r) + [rhs] for r, rhs in zip(a_rows, b)]
    red, pivots = rref(aug)
    for row in red:
        if all(x == 0 for x in row[:n]) and row[n] != 0:
            return None
    x0 = [ZERO] * n
    for r, p in enumerate(pivots):
        if p < n:
            x0[p] = red[r][n]
    return tuple(x0), nullspace([list(r) for r in a_rows], n)


def invert(rows) -> list[tuple] | None:
    """Inverse of a square matrix, or None if singular."""
    n = len(rows)
    aug = [list(r) + [ONE if j == i else ZERO for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [tuple(red[i][n:]) for i in range(n)]


def independent_rows(rows, dim: int) -> list[int] | None:
    """Indices of `dim` linearly independent rows, or None if rank < dim."""
    chosen: list[int] = []
    echelon: list[list] = []
    for idx, row in enumerate(rows):
        work = list(row)
        for e in echelon:
            lead = next(j for j in range(dim) if e[j] != 0)
            if work[lead] != 0:
                f = work[lead] / e[lead]
                work = [a - f * b for a, b in zip(work, e)]
        if any(x != 0 for x in work):
            echelon.append(work)
            chosen.append(idx)
            if len(chosen) == dim:
                return chosen
    return None
