"""Sliding-window polynomial least squares.

All windows of a given length share the same design matrix, so the
least-squares projection is factored once per ``(n, d)`` and every window
costs a single ``(d+1) x n`` matrix-vector product.

Coefficients are stored in ascending monomial order: ``beta[j]`` multiplies
``x**j``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular

from .timeseries import SeriesDataset, sliding_windows, znormalize_windows

__all__ = [
    "build_design_matrix",
    "build_projection",
    "projection_matrix",
    "fit_window",
    "extract_coefficients",
]

AXES = ("unit", "raw")


def build_design_matrix(n: int, d: int, axis: str = "unit") -> np.ndarray:
    """Vandermonde matrix of shape ``(n, d+1)`` for relative window time.

    With ``axis="unit"`` time runs over ``t / (n-1)`` in ``[0, 1]``;
    ``axis="raw"`` uses the integer offsets ``0 .. n-1``. The raw axis is
    badly conditioned for long windows and high degree (``399**8``) and is
    kept for checking that the rescaling leaves words unchanged: it only
    multiplies coefficient ``j`` by ``(n-1)**j``.
    """
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")
    if n <= d:
        raise ValueError(f"underdetermined fit: window length {n} needs to exceed degree {d}")
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    t = np.arange(n, dtype=np.float64)
    if axis == "unit":
        x = t / (n - 1) if n > 1 else np.zeros(1)
    else:
        x = t
    # np.power gives 0**0 == 1
    return np.power.outer(x, np.arange(d + 1))


def build_projection(Z: np.ndarray) -> np.ndarray:
    """Least-squares projection ``(Z^T Z)^{-1} Z^T`` of shape ``(d+1, n)``.

    Computed from a reduced QR factorization, ``P = R^{-1} Q^T``, which is
    the same operator without squaring the condition number.
    """
    Z = np.asarray(Z, dtype=np.float64)
    q, r = np.linalg.qr(Z, mode="reduced")
    # each column's component orthogonal to the previous ones, relative to its norm
    independence = np.abs(np.diag(r)) / np.linalg.norm(Z, axis=0)
    if not np.all(independence > np.finfo(float).eps * Z.shape[0]):
        raise np.linalg.LinAlgError("design matrix is rank deficient")
    return solve_triangular(r, q.T, lower=False)


@lru_cache(maxsize=64)
def _cached_projection(n: int, d: int, axis: str) -> np.ndarray:
    P = build_projection(build_design_matrix(n, d, axis))
    P.setflags(write=False)
    return P


def projection_matrix(n: int, d: int, axis: str = "unit") -> np.ndarray:
    """Shared, read-only projection for ``(n, d)``."""
    return _cached_projection(int(n), int(d), axis)


def fit_window(P: np.ndarray, Y) -> np.ndarray:
    """Coefficients minimizing ``||Y - Z beta||^2`` for one window."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (P.shape[1],):
        raise ValueError(f"window has length {Y.shape}, projection expects {P.shape[1]}")
    return P @ Y


def _series_matrix(data) -> np.ndarray:
    if isinstance(data, SeriesDataset):
        return data.values
    values = np.asarray(data, dtype=np.float64)
    if values.ndim == 1:
        values = values[None, :]
    return values


def extract_coefficients(data, n: int, d: int, axis: str = "unit", jobs: int = 1) -> np.ndarray:
    """Fit every z-normalized sliding window of every series.

    Parameters
    ----------
    data : SeriesDataset or array_like (M, N)
    n : int
        Window length, ``d + 1 <= n < N``.
    d : int
        Polynomial degree.
    jobs : int
        Worker threads; the output does not depend on it.

    Returns
    -------
    np.ndarray of shape (M, N - n, d + 1)
        ``out[i, t]`` holds the coefficients of series ``i``'s window
        starting at ``t``.
    """
    values = _series_matrix(data)
    if values.shape[1] <= n:
        raise ValueError(f"window exceeds series: n={n}, N={values.shape[1]}")
    P = projection_matrix(n, d, axis)
    out = np.empty((values.shape[0], values.shape[1] - n, d + 1))

    def fit_series(i: int) -> None:
        out[i] = znormalize_windows(sliding_windows(values[i], n)) @ P.T

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(fit_series, range(values.shape[0])))
    else:
        for i in range(values.shape[0]):
            fit_series(i)
    return out
