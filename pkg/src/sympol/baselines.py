"""Comparison methods: bag-of-SAX-words histograms, Euclidean and DTW distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bagging import Histogram, histogram_from_symbols
from .polyfit import _series_matrix
from .symbolic import make_alphabet
from .timeseries import sliding_windows, znormalize_windows

__all__ = [
    "SAX_BREAKPOINTS",
    "SaxConfig",
    "sax_breakpoints",
    "round_window",
    "paa",
    "sax_word",
    "sax_symbols",
    "bsax_transform",
    "euclidean_distance",
    "dtw_matrix",
    "dtw_distance",
]

# Equiprobable N(0, 1) breakpoints at two decimals, the usual SAX lookup table.
SAX_BREAKPOINTS: dict[int, tuple[float, ...]] = {
    2: (0.0,),
    3: (-0.43, 0.43),
    4: (-0.67, 0.0, 0.67),
    5: (-0.84, -0.25, 0.25, 0.84),
    6: (-0.97, -0.43, 0.0, 0.43, 0.97),
    7: (-1.07, -0.57, -0.18, 0.18, 0.57, 1.07),
    8: (-1.15, -0.67, -0.32, 0.0, 0.32, 0.67, 1.15),
    9: (-1.22, -0.76, -0.43, -0.14, 0.14, 0.43, 0.76, 1.22),
    10: (-1.28, -0.84, -0.52, -0.25, 0.0, 0.25, 0.52, 0.84, 1.28),
}


def sax_breakpoints(alpha: int) -> np.ndarray:
    try:
        return np.array(SAX_BREAKPOINTS[alpha])
    except KeyError:
        raise ValueError(
            f"no SAX breakpoints for alphabet size {alpha}; supported: {sorted(SAX_BREAKPOINTS)}"
        ) from None


def round_window(n: int, word_len: int) -> int:
    """Smallest multiple of ``word_len`` that is ``>= n`` (100 -> 102 for 3)."""
    return -(-n // word_len) * word_len


@dataclass(frozen=True)
class SaxConfig:
    n: int
    word_len: int
    alpha: int

    def __post_init__(self):
        if self.word_len < 1 or self.n < 1:
            raise ValueError("window and word length must be positive")
        sax_breakpoints(self.alpha)

    @property
    def window(self) -> int:
        return round_window(self.n, self.word_len)

    @property
    def breakpoints(self) -> np.ndarray:
        return sax_breakpoints(self.alpha)


def paa(Y, segments: int) -> np.ndarray:
    """Piecewise aggregate approximation: the means of equal-length chunks.

    The last axis of ``Y`` must be divisible by ``segments``.
    """
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[-1]
    if segments < 1 or n % segments:
        raise ValueError(f"window length {n} is not divisible into {segments} segments")
    return Y.reshape(*Y.shape[:-1], segments, n // segments).mean(axis=-1)


def _symbolize(means: np.ndarray, breakpoints: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.asarray(breakpoints, dtype=np.float64), means, side="right")


def sax_word(means, breakpoints) -> str:
    """Map PAA means to letters; a mean equal to a breakpoint goes right.

    >>> sax_word([0, 0, 0, 0], [-0.67, 0, 0.67])
    'CCCC'
    """
    idx = _symbolize(np.asarray(means, dtype=np.float64), breakpoints)
    alphabet = make_alphabet(max(len(breakpoints) + 1, 2))
    return "".join(alphabet[k] for k in idx)


def sax_symbols(data, config: SaxConfig) -> np.ndarray:
    """``(M, N - n', word_len)`` SAX symbol indices over all sliding windows.

    ``n'`` is the window rounded up to a multiple of the word length.
    """
    values = _series_matrix(data)
    n = config.window
    bp = config.breakpoints
    out = np.empty((values.shape[0], values.shape[1] - n, config.word_len), dtype=np.uint8)
    if out.shape[1] <= 0:
        raise ValueError(f"window exceeds series: n={n}, N={values.shape[1]}")
    for i, series in enumerate(values):
        means = paa(znormalize_windows(sliding_windows(series, n)), config.word_len)
        out[i] = _symbolize(means, bp)
    return out


def bsax_transform(
    data, config: SaxConfig, fit_rows=None, numerosity_reduction: bool = False
) -> Histogram:
    """Bag-of-SAX-words histogram, built exactly like the polynomial one."""
    return histogram_from_symbols(
        sax_symbols(data, config),
        make_alphabet(config.alpha),
        fit_rows=fit_rows,
        numerosity_reduction=numerosity_reduction,
    )


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return math.sqrt(float(np.dot(diff, diff)))


@njit(cache=True, nogil=True)
def _dtw_grid(a, b):
    la, lb = a.shape[0], b.shape[0]
    D = np.full((la + 1, lb + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, la + 1):
        ai = a[i - 1]
        for j in range(1, lb + 1):
            c = (ai - b[j - 1]) ** 2
            D[i, j] = c + min(D[i - 1, j - 1], D[i - 1, j], D[i, j - 1])
    return D


@njit(cache=True, nogil=True)
def _dtw_cost(a, b):
    lb = b.shape[0]
    prev = np.full(lb + 1, np.inf)
    cur = np.full(lb + 1, np.inf)
    prev[0] = 0.0
    for i in range(a.shape[0]):
        ai = a[i]
        cur[0] = np.inf
        for j in range(1, lb + 1):
            c = (ai - b[j - 1]) ** 2
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = c + best
        prev, cur = cur, prev
    return prev[lb]


def _as_nonempty(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("DTW needs non-empty 1-D sequences")
    return x


def dtw_matrix(a, b) -> np.ndarray:
    """Accumulated cost grid of shape ``(len(a)+1, len(b)+1)``.

    Row and column 0 are ``+inf`` except the origin, which is 0.
    """
    return _dtw_grid(_as_nonempty(a), _as_nonempty(b))


def dtw_distance(a, b) -> float:
    """Unconstrained DTW: minimal summed squared difference over monotone alignments.

    The accumulated cost is returned without a final square root; nearest
    neighbour decisions do not change under that monotone map.
    """
    return float(_dtw_cost(_as_nonempty(a), _as_nonempty(b)))
