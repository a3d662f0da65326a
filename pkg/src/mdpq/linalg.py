"""Linear solvers used by the reachability and frequency computations."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix

DIRECT_LIMIT = 2000
ITER_TOL = 1e-12
ITER_CAP = 10**6


def solve_fraction(rows, rhs):
    """Solve a square system exactly.

    ``rows`` is a list of sparse rows (``{column: Fraction}``), ``rhs`` a list of
    Fractions. Gauss-Jordan elimination with the first non-zero pivot; raises
    ``ZeroDivisionError`` when the matrix is singular.
    """
    n = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r].get(col)), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        prow = rows[col]
        inv = 1 / prow[col]
        if inv != 1:
            for k in prow:
                prow[k] *= inv
            rhs[col] *= inv
        for r in range(n):
            if r == col:
                continue
            factor = rows[r].get(col)
            if not factor:
                continue
            row = rows[r]
            for k, v in prow.items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs[r] -= factor * rhs[col]
    return [Fraction(v) for v in rhs]


def solve_float(rows, rhs, n):
    """Solve ``(I - Q) y = b`` given as sparse rows of the full matrix.

    Dense LU up to ``DIRECT_LIMIT`` unknowns, Jacobi-style fixed-point
    iteration on ``y = Q y + b`` beyond that.
    """
    if n <= DIRECT_LIMIT:
        mat = np.zeros((n, n))
        for i, row in enumerate(rows):
            for j, v in row.items():
                mat[i, j] = v
        return np.linalg.solve(mat, np.asarray(rhs, dtype=float))
    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, v in row.items():
            if i != j:
                data.append(-float(v))
                ri.append(i)
                ci.append(j)
    diag = np.array([float(row.get(i, 0.0)) for i, row in enumerate(rows)])
    q = csr_matrix((data, (ri, ci)), shape=(n, n))
    b = np.asarray(rhs, dtype=float)
    y = np.zeros(n)
    for _ in range(ITER_CAP):
        nxt = (q @ y + b) / diag
        if np.max(np.abs(nxt - y)) <= ITER_TOL:
            return nxt
        y = nxt
    raise RuntimeError("fixed-point iteration did not converge")
