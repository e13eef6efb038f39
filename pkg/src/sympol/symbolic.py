"""Equivolume discretization of polynomial coefficients into words."""

from __future__ import annotations

import string

import numpy as np

__all__ = [
    "LETTERS",
    "make_alphabet",
    "compute_thresholds",
    "symbol_index",
    "coefficient_symbols",
    "coefficients_to_words",
    "symbols_to_words",
]

LETTERS = string.ascii_uppercase


def make_alphabet(alpha: int) -> str:
    """The first ``alpha`` capital letters, ``2 <= alpha <= 26``."""
    if not 2 <= alpha <= len(LETTERS):
        raise ValueError(f"alphabet size must be in [2, 26], got {alpha}")
    return LETTERS[:alpha]


def _flat_coefficients(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    return coeffs.reshape(-1, coeffs.shape[-1])


def compute_thresholds(coeffs, alpha: int) -> np.ndarray:
    """Equivolume thresholds for each coefficient index.

    ``coeffs`` is any array whose last axis is the coefficient index, such
    as the ``(M, N-n, d+1)`` output of
    :func:`sympol.polyfit.extract_coefficients`. For coefficient ``j`` the
    values over all windows are sorted into ``B`` of size ``s`` and
    threshold ``k`` (``k = 1 .. alpha-1``) is ``B[floor(s*k/alpha)]`` with
    1-based indexing, clamped to the first element. The last column is
    ``+inf``.

    Returns
    -------
    np.ndarray of shape (d+1, alpha)
    """
    make_alphabet(alpha)
    flat = _flat_coefficients(coeffs)
    s = flat.shape[0]
    if s == 0:
        raise ValueError("empty coefficient bag")
    ranks = np.maximum((s * np.arange(1, alpha)) // alpha, 1) - 1
    ordered = np.sort(flat, axis=0)
    table = np.full((flat.shape[1], alpha), np.inf)
    table[:, :-1] = ordered[ranks].T
    return table


def symbol_index(v: float, thresholds) -> int:
    """1-based region of ``v``: the smallest ``k`` with ``v < thresholds[k]``.

    Values equal to a threshold fall into the region on its right.

    >>> symbol_index(2.0, [2, 4, 6, float("inf")])
    2
    """
    return int(np.searchsorted(np.asarray(thresholds, dtype=np.float64), v, side="right")) + 1


def coefficient_symbols(coeffs, thresholds) -> np.ndarray:
    """0-based symbol indices, same shape as ``coeffs``, dtype uint8."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if coeffs.shape[-1] != thresholds.shape[0]:
        raise ValueError(
            f"{coeffs.shape[-1]} coefficients per window but {thresholds.shape[0]} threshold rows"
        )
    out = np.empty(coeffs.shape, dtype=np.uint8)
    for j, row in enumerate(thresholds):
        out[..., j] = np.searchsorted(row, coeffs[..., j], side="right")
    return out


def symbols_to_words(symbols, alphabet: str) -> list[list[str]]:
    """Render an ``(M, W, L)`` symbol-index array as per-series word lists."""
    symbols = np.asarray(symbols)
    lookup = np.array(list(alphabet))
    chars = lookup[symbols]
    return [["".join(w) for w in series] for series in chars]


def coefficients_to_words(coeffs, thresholds, alphabet: str | None = None) -> list[list[str]]:
    """Convert a coefficient bag into a bag of words, one word per window.

    ``coeffs`` has shape ``(M, W, d+1)``; a ``(W, d+1)`` array is treated
    as a single series. Word characters follow ascending monomial degree.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim == 2:
        coeffs = coeffs[None]
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if alphabet is None:
        alphabet = make_alphabet(thresholds.shape[1])
    if len(alphabet) < thresholds.shape[1]:
        raise ValueError("alphabet is smaller than the number of regions")
    return symbols_to_words(coefficient_symbols(coeffs, thresholds), alphabet)
