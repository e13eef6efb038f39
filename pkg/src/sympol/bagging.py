"""Word dictionaries and word-frequency histograms."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Histogram",
    "build_dictionary",
    "populate_histogram",
    "reduce_numerosity",
    "histogram_from_symbols",
    "write_histogram_csv",
]


@dataclass(frozen=True)
class Histogram:
    """Word counts per series.

    Attributes
    ----------
    counts : np.ndarray of shape (M, |D|), int64
        ``counts[i, j]`` is how often ``dictionary[j]`` occurs in series ``i``.
    dictionary : tuple of str
        Column words in first-occurrence order.
    dropped : np.ndarray of shape (M,), int64
        Words of each series that are not in the dictionary.
    """

    counts: np.ndarray
    dictionary: tuple[str, ...]
    dropped: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def to_csv(self, path: str | Path, labels: Sequence[int]) -> None:
        write_histogram_csv(path, self, labels)


def build_dictionary(bags: Iterable[Iterable[str]]) -> list[str]:
    """Distinct words ordered by first occurrence (series, then window)."""
    # dicts keep insertion order
    seen: dict[str, None] = {}
    for bag in bags:
        for word in bag:
            seen.setdefault(word, None)
    return list(seen)


def populate_histogram(bags: Sequence[Sequence[str]], dictionary: Sequence[str]) -> Histogram:
    """Count each bag's words against ``dictionary``; unknown words are dropped."""
    column = {w: j for j, w in enumerate(dictionary)}
    counts = np.zeros((len(bags), len(column)), dtype=np.int64)
    dropped = np.zeros(len(bags), dtype=np.int64)
    for i, bag in enumerate(bags):
        for word in bag:
            j = column.get(word)
            if j is None:
                dropped[i] += 1
            else:
                counts[i, j] += 1
    return Histogram(counts, tuple(dictionary), dropped)


def reduce_numerosity(words: Sequence[str]) -> list[str]:
    """Collapse runs of identical consecutive words to one occurrence."""
    return [w for k, w in enumerate(words) if k == 0 or w != words[k - 1]]


def histogram_from_symbols(
    symbols: np.ndarray,
    alphabet: str,
    fit_rows: Sequence[int] | None = None,
    numerosity_reduction: bool = False,
) -> Histogram:
    """Vectorized dictionary + histogram from an ``(M, W, L)`` symbol array.

    Equivalent to rendering the words and calling :func:`build_dictionary`
    on the ``fit_rows`` series (all series when ``None``) followed by
    :func:`populate_histogram` on every series.
    """
    symbols = np.asarray(symbols)
    M, W, L = symbols.shape
    flat = np.ascontiguousarray(symbols.reshape(M * W, L))
    uniq, first, inverse = np.unique(flat, axis=0, return_index=True, return_inverse=True)
    codes = inverse.reshape(M, W)

    keep = np.ones((M, W), dtype=bool)
    if numerosity_reduction:
        keep[:, 1:] = codes[:, 1:] != codes[:, :-1]

    rows = np.arange(M) if fit_rows is None else np.sort(np.asarray(fit_rows, dtype=np.int64))
    fit_mask = np.zeros(uniq.shape[0], dtype=bool)
    fit_mask[codes[rows][keep[rows]]] = True
    # first occurrence over the fit rows, in (series, window) order
    fit_codes = codes[rows].ravel()
    first_pos = np.full(uniq.shape[0], np.iinfo(np.int64).max)
    np.minimum.at(first_pos, fit_codes, np.arange(fit_codes.size))
    present = np.flatnonzero(fit_mask)
    order = present[np.argsort(first_pos[present], kind="stable")]

    column = np.full(uniq.shape[0], -1, dtype=np.int64)
    column[order] = np.arange(order.size)
    cols = column[codes]
    valid = keep & (cols >= 0)
    K = order.size
    series_idx = np.broadcast_to(np.arange(M)[:, None], (M, W))
    counts = np.bincount(
        (series_idx[valid] * K + cols[valid]), minlength=M * K
    ).reshape(M, K).astype(np.int64)
    dropped = (keep & (cols < 0)).sum(axis=1).astype(np.int64)
    lookup = np.array(list(alphabet))
    dictionary = tuple("".join(lookup[row]) for row in uniq[order])
    return Histogram(counts, dictionary, dropped)


def write_histogram_csv(path: str | Path, histogram: Histogram, labels: Sequence[int]) -> None:
    """Header ``label,<word>,...`` then one row per series, label first."""
    if len(labels) != histogram.counts.shape[0]:
        raise ValueError("one label per histogram row is required")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", *histogram.dictionary])
        for label, row in zip(labels, histogram.counts):
            writer.writerow([int(label), *row.tolist()])
