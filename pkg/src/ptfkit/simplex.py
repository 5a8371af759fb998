"""A small exact simplex solver for linear feasibility problems.

Dense tableau over Fractions with Bland's rule, so it always terminates.
Intended for instances with at most a few hundred rows and columns.
"""

from fractions import Fraction


def _pivot(T, basis, row, col):
    piv = T[row][col]
    prow = T[row]
    if piv != 1:
        inv = 1 / Fraction(piv)
        prow = [v * inv if v else v for v in prow]
        T[row] = prow
    nz = [(j, v) for j, v in enumerate(prow) if v]
    for i, r in enumerate(T):
        if i == row:
            continue
        factor = r[col]
        if factor:
            for j, v in nz:
                r[j] = r[j] - factor * v
    basis[row] = col


def find_feasible(A, b):
    """Return a rational x with ``A x >= b`` (x unrestricted in sign), or None.

    Phase one of the simplex method on ``A (u - w) - s + a = b`` with
    ``u, w, s, a >= 0``, minimizing the artificial total ``sum a``.
    """
    m = len(A)
    if m == 0:
        return [Fraction(0)] * (len(A[0]) if A else 0)
    N = len(A[0])
    ncols = 2 * N + 2 * m
    T = []
    for i, (row, rhs) in enumerate(zip(A, b)):
        sign = -1 if rhs < 0 else 1
        r = [0] * (ncols + 1)
        for j, v in enumerate(row):
            if v:
                r[j] = sign * v
                r[N + j] = -sign * v
        r[2 * N + i] = -sign
        r[2 * N + m + i] = 1
        r[ncols] = sign * rhs
        T.append(r)
    basis = [2 * N + m + i for i in range(m)]
    # objective row: reduced costs of sum(a) expressed through the basis
    obj = [0] * (ncols + 1)
    for r in T:
        for j in range(2 * N + m):
            obj[j] -= r[j]
        obj[ncols] -= r[ncols]
    T.append(obj)
    last = m
    while True:
        col = next((j for j in range(2 * N + m) if T[last][j] < 0), None)
        if col is None:
            break
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = Fraction(T[i][ncols]) / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # unbounded direction cannot occur in phase one (objective >= 0)
            break
        _pivot(T, basis, best[1], col)
    if T[last][ncols] != 0:
        return None
    x = [Fraction(0)] * N
    for i, col in enumerate(basis):
        if col < N:
            x[col] += Fraction(T[i][ncols])
        elif col < 2 * N:
            x[col - N] -= Fraction(T[i][ncols])
    return x
