"""Series and dataset containers, window normalization and dataset file IO.

Dataset files hold one series per line, label first::

    # comment lines are skipped
    0,1.0,2.0,3.0
    1 4.0 5.0 6.0

Fields may be separated by commas or whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DatasetError",
    "LabeledSeries",
    "SeriesDataset",
    "znormalize_window",
    "znormalize_windows",
    "sliding_windows",
    "load_dataset",
    "save_dataset",
    "format_dataset",
]

_SPLIT = re.compile(r"[,\s]+")


class DatasetError(ValueError):
    """Raised for malformed dataset files or invalid series collections."""


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledSeries:
    label: int
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1 or values.size < 1:
            raise DatasetError("a series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise DatasetError("series values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "label", int(self.label))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SeriesDataset:
    """An immutable collection of equal-length labeled series.

    ``values`` is the ``(M, N)`` matrix of all series and ``labels`` the
    length-``M`` label vector; both are read-only views.
    """

    series: tuple[LabeledSeries, ...]
    values: np.ndarray = field(init=False, repr=False, compare=False)
    labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise DatasetError("empty dataset")
        lengths = {len(s) for s in series}
        if len(lengths) != 1:
            raise DatasetError(f"inconsistent series length: {sorted(lengths)}")
        values = np.vstack([s.values for s in series])
        values.setflags(write=False)
        labels = np.array([s.label for s in series], dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_arrays(cls, values, labels) -> "SeriesDataset":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise DatasetError(f"expected an (M, N) matrix, got shape {values.shape}")
        labels = list(labels)
        if len(labels) != values.shape[0]:
            raise DatasetError("one label per series is required")
        return cls(tuple(LabeledSeries(lab, row) for lab, row in zip(labels, values)))

    @property
    def M(self) -> int:
        return len(self.series)

    @property
    def N(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.M

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesDataset):
            return NotImplemented
        return np.array_equal(self.labels, other.labels) and np.array_equal(
            self.values, other.values
        )

    def __hash__(self):
        return hash((self.labels.tobytes(), self.values.tobytes()))

    def subset(self, indices: Iterable[int]) -> "SeriesDataset":
        return SeriesDataset(tuple(self.series[i] for i in indices))

    def znormalized(self) -> "SeriesDataset":
        """Return a copy with every whole series z-normalized."""
        return SeriesDataset.from_arrays(znormalize_windows(self.values), self.labels)


def znormalize_window(values: Sequence[float]) -> np.ndarray:
    """Shift and scale a window to mean 0 and population standard deviation 1.

    A window whose values are all identical carries no shape and maps to
    zeros.

    >>> znormalize_window([0.0, 2.0])
    array([-1.,  1.])
    """
    return znormalize_windows(np.asarray(values, dtype=np.float64)[None, :])[0]


def znormalize_windows(windows: np.ndarray) -> np.ndarray:
    """Row-wise :func:`znormalize_window` for an ``(k, n)`` array."""
    windows = np.asarray(windows, dtype=np.float64)
    mean = windows.mean(axis=-1, keepdims=True)
    centered = windows - mean
    std = np.sqrt(np.mean(centered * centered, axis=-1, keepdims=True))
    flat = windows.max(axis=-1, keepdims=True) == windows.min(axis=-1, keepdims=True)
    std = np.where(flat, 1.0, std)
    return np.where(flat, 0.0, centered / std)


def sliding_windows(values: np.ndarray, n: int) -> np.ndarray:
    """Read-only ``(N - n, n)`` view of the unit-stride windows of a series.

    Start positions run over ``0 .. N - n - 1``; a series of length ``N``
    yields ``N - n`` windows.
    """
    values = np.asarray(values, dtype=np.float64)
    if n < 1:
        raise ValueError(f"window length must be positive, got {n}")
    if values.shape[-1] <= n:
        raise ValueError(
            f"window exceeds series: n={n} needs series longer than {values.shape[-1]}"
        )
    view = np.lib.stride_tricks.sliding_window_view(values, n, axis=-1)
    return view[..., : values.shape[-1] - n, :]


def _parse_label(token: str, lineno: int) -> int:
    try:
        number = float(token)
    except ValueError:
        raise DatasetError(f"line {lineno}: non-numeric label {token!r}") from None
    if not np.isfinite(number) or number != int(number):
        raise DatasetError(f"line {lineno}: label must be an integer, got {token!r}")
    return int(number)


def _parse_lines(lines: Iterable[str]) -> SeriesDataset:
    series = []
    length = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        if len(tokens) < 2:
            raise DatasetError(f"line {lineno}: malformed line, expected label and values")
        label = _parse_label(tokens[0], lineno)
        try:
            values = [float(t) for t in tokens[1:]]
        except ValueError as exc:
            raise DatasetError(f"line {lineno}: non-numeric token ({exc})") from None
        if not all(np.isfinite(values)):
            raise DatasetError(f"line {lineno}: non-finite value")
        if length is None:
            length = len(values)
        elif len(values) != length:
            raise DatasetError(
                f"line {lineno}: inconsistent series length {len(values)} (expected {length})"
            )
        series.append(LabeledSeries(label, values))
    if not series:
        raise DatasetError("empty dataset")
    return SeriesDataset(tuple(series))


def load_dataset(path: str | Path) -> SeriesDataset:
    """Read a label-first series file (UTF-8, one series per line)."""
    with open(path, encoding="utf-8") as fh:
        return _parse_lines(fh)


def format_dataset(dataset: SeriesDataset) -> str:
    rows = []
    for s in dataset.series:
        rows.append(",".join([str(s.label)] + [repr(float(v)) for v in s.values]))
    return "\n".join(rows) + "\n"


def save_dataset(dataset: SeriesDataset, path: str | Path) -> None:
    """Write ``dataset`` in the format read by :func:`load_dataset`; exact round trip."""
    Path(path).write_text(format_dataset(dataset), encoding="utf-8")
