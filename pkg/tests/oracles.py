"""Independent reference implementations used only by the tests.

Nothing here imports the package: each oracle re-derives its answer from
first principles with plain Python loops.
"""

from __future__ import annotations

import math
from functools import lru_cache


def solve_full_pivot(A: list[list[float]], b: list[float]) -> list[float]:
    """Gaussian elimination with full (row and column) pivoting."""
    n = len(A)
    M = [list(map(float, row)) + [float(v)] for row, v in zip(A, b)]
    cols = list(range(n))
    for k in range(n):
        best, pr, pc = -1.0, k, k
        for i in range(k, n):
            for j in range(k, n):
                if abs(M[i][j]) > best:
                    best, pr, pc = abs(M[i][j]), i, j
        if best == 0.0:
            raise ZeroDivisionError("singular system")
        M[k], M[pr] = M[pr], M[k]
        if pc != k:
            for row in M:
                row[k], row[pc] = row[pc], row[k]
            cols[k], cols[pc] = cols[pc], cols[k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                for j in range(k, n + 1):
                    M[i][j] -= f * M[k][j]
    x = [0.0] * n
    for k in range(n - 1, -1, -1):
        s = M[k][n] - sum(M[k][j] * x[j] for j in range(k + 1, n))
        x[k] = s / M[k][k]
    out = [0.0] * n
    for k, c in enumerate(cols):
        out[c] = x[k]
    return out


def lstsq_residual_norm(y: list[float], d: int) -> float:
    """Residual norm of the best degree-``d`` polynomial fit to ``y``.

    The residual depends only on the column space, so the fit uses the
    symmetric axis ``[-1, 1]`` and the normal equations in full-pivot
    elimination, independently of any projection matrix.
    """
    n = len(y)
    xs = [-1.0 + 2.0 * t / (n - 1) for t in range(n)] if n > 1 else [0.0]
    rows = [[x ** j for j in range(d + 1)] for x in xs]
    A = [[math.fsum(r[a] * r[b] for r in rows) for b in range(d + 1)] for a in range(d + 1)]
    rhs = [math.fsum(r[a] * v for r, v in zip(rows, y)) for a in range(d + 1)]
    beta = solve_full_pivot(A, rhs)
    resid = [v - sum(c * p for c, p in zip(beta, r)) for v, r in zip(y, rows)]
    return math.sqrt(math.fsum(e * e for e in resid))


def dtw_recursive(a: list[float], b: list[float]) -> float:
    """DTW by memoized recursion over the last aligned pair."""

    @lru_cache(maxsize=None)
    def cost(i: int, j: int) -> float:
        c = (a[i] - b[j]) ** 2
        if i == 0 and j == 0:
            return c
        options = []
        if i > 0 and j > 0:
            options.append(cost(i - 1, j - 1))
        if i > 0:
            options.append(cost(i - 1, j))
        if j > 0:
            options.append(cost(i, j - 1))
        return c + min(options)

    return cost(len(a) - 1, len(b) - 1)


def thresholds_by_hand(values: list[float], alpha: int) -> list[float]:
    """Equivolume thresholds written straight from the 1-based sorted-list rule."""
    B = sorted(values)
    s = len(B)
    out = []
    for k in range(1, alpha):
        idx = max(math.floor(s * k / alpha), 1)
        out.append(B[idx - 1])
    return out + [math.inf]


def region_by_scan(v: float, thresholds: list[float]) -> int:
    """1-based region by linear scan: first threshold strictly above ``v``."""
    for k, mu in enumerate(thresholds, start=1):
        if v < mu:
            return k
    raise AssertionError("sentinel threshold missing")


def nearest_label(train: list[list[float]], labels: list[int], query: list[float]) -> int:
    best, label = math.inf, None
    for row, lab in zip(train, labels):
        d = math.sqrt(sum((p - q) ** 2 for p, q in zip(row, query)))
        if d < best:
            best, label = d, lab
    return label
