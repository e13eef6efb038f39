"""Series -> polynomial words -> histogram, in one call."""

from __future__ import annotations

import numpy as np

from .bagging import Histogram, histogram_from_symbols
from .polyfit import extract_coefficients
from .symbolic import coefficient_symbols, compute_thresholds, make_alphabet, symbols_to_words

__all__ = ["sympol_symbols", "sympol_words", "sympol_transform"]


def sympol_symbols(data, n: int, alpha: int, degree: int, fit_rows=None, coeffs=None) -> np.ndarray:
    """Symbol indices ``(M, N-n, degree+1)`` with thresholds fit on ``fit_rows``.

    ``coeffs`` may pass precomputed coefficients for ``(n, degree)``.
    """
    if coeffs is None:
        coeffs = extract_coefficients(data, n, degree)
    basis = coeffs if fit_rows is None else coeffs[np.asarray(fit_rows, dtype=np.int64)]
    return coefficient_symbols(coeffs, compute_thresholds(basis, alpha))


def sympol_words(data, n: int, alpha: int, degree: int, fit_rows=None) -> list[list[str]]:
    return symbols_to_words(sympol_symbols(data, n, alpha, degree, fit_rows), make_alphabet(alpha))


def sympol_transform(
    data,
    n: int,
    alpha: int,
    degree: int,
    fit_rows=None,
    numerosity_reduction: bool = False,
    coeffs=None,
) -> Histogram:
    """Histogram of symbolic polynomial words for every series.

    With ``fit_rows=None`` thresholds and dictionary come from all series
    (transductive). Otherwise both are learned from ``fit_rows`` only and
    the remaining series are mapped onto that dictionary.
    """
    symbols = sympol_symbols(data, n, alpha, degree, fit_rows, coeffs)
    return histogram_from_symbols(
        symbols, make_alphabet(alpha), fit_rows=fit_rows, numerosity_reduction=numerosity_reduction
    )
