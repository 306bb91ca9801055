"""Exact Gaussian elimination over F_p or Q."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class LinearSolution:
    particular: tuple
    kernel: tuple  # basis vectors of the null space


def rref(rows, field):
    """Reduced row echelon form. Returns (matrix, pivot columns).

    Rows are held sparsely during elimination; the systems built here are
    mostly zeros.
    """
    F = field
    ncols = len(rows[0]) if rows else 0
    m = [{j: x for j, x in enumerate(r) if x != F.zero} for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if c in m[i]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        prow = {j: F.mul(inv, x) for j, x in m[r].items()}
        m[r] = prow
        for i in range(len(m)):
            if i != r and c in m[i]:
                row = m[i]
                f = row[c]
                for j, b in prow.items():
                    v = F.sub(row.get(j, F.zero), F.mul(f, b))
                    if v == F.zero:
                        row.pop(j, None)
                    else:
                        row[j] = v
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    dense = [[row.get(j, F.zero) for j in range(ncols)] for row in m]
    return dense, pivots


def solve_linear(matrix, rhs, field, ncols: int | None = None) -> LinearSolution | None:
    """Solve ``matrix @ x = rhs`` exactly; ``None`` when inconsistent.

    ``ncols`` is needed only when the matrix has no rows.
    """
    F = field
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    rows = [[F(x) for x in row] + [F(b)] for row, b in zip(matrix, rhs)]
    if len(rows) != len(matrix):
        raise ValueError("row count of matrix and right-hand side differ")
    red, pivots = rref(rows, F) if rows else ([], [])
    if ncols in pivots:
        return None
    x = [F.zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for f in free:
        v = [F.zero] * ncols
        v[f] = F.one
        for i, c in enumerate(pivots):
            v[c] = F.neg(red[i][f])
        kernel.append(tuple(v))
    return LinearSolution(tuple(x), tuple(kernel))


def mat_vec(matrix, vec, field):
    F = field
    out = []
    for row in matrix:
        s = F.zero
        for a, b in zip(row, vec):
            if a != F.zero and b != F.zero:
                s = F.add(s, F.mul(a, b))
        out.append(s)
    return out
