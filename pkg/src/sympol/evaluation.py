"""Nearest-neighbour classification and nested cross-validation.

Every method is reduced to a matrix of distances between query series and
training series; the 1-NN rule then takes the closest training row, with
ties going to the lowest training index.

Cross-validation uses ``k`` stratified folds. In rotation ``r`` fold ``r``
is the test set, fold ``r+1`` (cyclically) the validation set and the
remaining folds the training set. Every grid point is learned on the
training folds and scored on the validation fold; the winner is scored on
the test fold after learning on the same training folds.
"""

from __future__ import annotations

import itertools
import json
import threading
import time
import warnings
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np

from .baselines import SaxConfig, bsax_transform, dtw_distance, euclidean_distance
from .polyfit import extract_coefficients
from .pipeline import sympol_transform
from .timeseries import DatasetError, SeriesDataset

__all__ = [
    "METHODS",
    "MODES",
    "SYMPOL_GRID",
    "BSAX_GRID",
    "MethodConfig",
    "FoldResult",
    "CvReport",
    "Evaluator",
    "default_grid",
    "nn_classify",
    "nn_predict",
    "make_folds",
    "rotations",
    "grid_search",
    "cross_validate",
    "holdout_evaluate",
]

METHODS = ("sympol", "bsax", "enn", "dtwnn")
MODES = ("transductive", "inductive")
HISTOGRAM_METHODS = ("sympol", "bsax")

SYMPOL_GRID = {"n": (100, 200, 300, 400), "alpha": (4, 6, 8), "degree": tuple(range(1, 9))}
BSAX_GRID = {"n": (100, 200, 300, 400), "alpha": (4, 6, 8), "word_len": tuple(range(2, 10))}

_REQUIRED = {
    "sympol": ("n", "alpha", "degree"),
    "bsax": ("n", "alpha", "word_len"),
    "enn": (),
    "dtwnn": (),
}
_HYPER = ("n", "alpha", "degree", "word_len")


@dataclass(frozen=True)
class MethodConfig:
    """A method plus its hyperparameters (``None`` where not applicable)."""

    method: str
    n: int | None = None
    alpha: int | None = None
    degree: int | None = None
    word_len: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        required = _REQUIRED[self.method]
        for name in _HYPER:
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValueError(f"{self.method} needs {name}")
                object.__setattr__(self, name, int(value))
            elif value is not None:
                raise ValueError(f"{self.method} takes no {name}")
        if self.method == "sympol":
            if self.n <= self.degree:
                raise ValueError(f"underdetermined fit: n={self.n}, degree={self.degree}")
            if not 2 <= self.alpha <= 26:
                raise ValueError(f"alphabet size must be in [2, 26], got {self.alpha}")
        elif self.method == "bsax":
            SaxConfig(self.n, self.word_len, self.alpha)

    @property
    def params(self) -> dict:
        return {name: getattr(self, name) for name in _REQUIRED[self.method]}

    @property
    def window(self) -> int | None:
        if self.method == "bsax":
            return SaxConfig(self.n, self.word_len, self.alpha).window
        return self.n

    def sort_key(self) -> tuple:
        """Simplicity order for tie-breaking: smaller n, then alpha, then degree or word length."""
        last = self.degree if self.method == "sympol" else self.word_len
        return tuple(-1 if v is None else v for v in (self.n, self.alpha, last))

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.method}({inner})"


def default_grid(method: str) -> list[MethodConfig]:
    """The full search grid for ``method``, in simplicity order."""
    if method == "sympol":
        g = SYMPOL_GRID
        points = [MethodConfig("sympol", n=n, alpha=a, degree=d)
                  for n, a, d in itertools.product(g["n"], g["alpha"], g["degree"])]
    elif method == "bsax":
        g = BSAX_GRID
        points = [MethodConfig("bsax", n=n, alpha=a, word_len=w)
                  for n, a, w in itertools.product(g["n"], g["alpha"], g["word_len"])]
    elif method in METHODS:
        points = [MethodConfig(method)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(points, key=MethodConfig.sort_key)


def nn_classify(train_rows, train_labels, query) -> int:
    """Label of the training row closest to ``query`` in Euclidean distance."""
    train_rows = np.asarray(train_rows, dtype=np.float64)
    if train_rows.ndim != 2 or train_rows.shape[0] == 0:
        raise ValueError("empty training set")
    dists = [euclidean_distance(row, query) for row in train_rows]
    return int(np.asarray(train_labels)[int(np.argmin(dists))])


def nn_predict(distances: np.ndarray, train_labels) -> np.ndarray:
    """1-NN labels from a ``(queries, train)`` distance block."""
    distances = np.asarray(distances)
    if distances.shape[1] == 0:
        raise ValueError("empty training set")
    return np.asarray(train_labels)[np.argmin(distances, axis=1)]


def make_folds(labels, k: int = 5, seed: int = 0) -> list[np.ndarray]:
    """Stratified partition of ``range(len(labels))`` into ``k`` sorted index arrays.

    Each class is shuffled and dealt round-robin, continuing where the
    previous class stopped, so per-class and total fold sizes differ by at
    most one.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if labels.size < k:
        raise ValueError(f"{labels.size} instances cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        if members.size < k:
            warnings.warn(
                f"class {label} has {members.size} < {k} members; stratification is degenerate",
                stacklevel=2,
            )
        for pos, i in enumerate(rng.permutation(members)):
            folds[(offset + pos) % k].append(int(i))
        offset = (offset + members.size) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def rotations(folds: Sequence[np.ndarray]) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """``(train, validation, test)`` index arrays for each rotation."""
    k = len(folds)
    if k < 3:
        raise ValueError("nested cross-validation needs at least 3 folds")
    out = []
    for r in range(k):
        val = (r + 1) % k
        train = np.sort(np.concatenate([folds[f] for f in range(k) if f not in (r, val)]))
        out.append((train, folds[val], folds[r]))
    return out


class _ByteLRU:
    """Thread-safe LRU cache bounded by the total ``nbytes`` of its arrays."""

    def __init__(self, budget: int):
        self.budget = budget
        self._items: OrderedDict = OrderedDict()
        self._size = 0
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key in self._items:
                self._items.move_to_end(key)
                return self._items[key]
        return None

    def put(self, key, value: np.ndarray) -> None:
        with self._lock:
            if key in self._items or value.nbytes > self.budget:
                return
            self._items[key] = value
            self._size += value.nbytes
            while self._size > self.budget:
                _, old = self._items.popitem(last=False)
                self._size -= old.nbytes


def _squared_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # integer counts: every product and partial sum stays exact in float64
    A = A.astype(np.float64)
    B = B.astype(np.float64)
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    return sq


class Evaluator:
    """Computes 1-NN errors of method configurations on one dataset.

    Parameters
    ----------
    dataset : SeriesDataset
    mode : {"transductive", "inductive"}
        Whether thresholds and dictionaries are learned from all series or
        from the training rows of each split only.
    numerosity_reduction : bool
        Collapse consecutive repeated words before counting.
    znormalize_series : bool
        z-normalize whole series before the ENN and DTW baselines.
    jobs : int
        Worker threads for grid points and DTW pairs.
    cache_bytes : int
        Memory budget for cached coefficients and distance matrices.
    """

    def __init__(
        self,
        dataset: SeriesDataset,
        mode: str = "transductive",
        numerosity_reduction: bool = False,
        znormalize_series: bool = False,
        jobs: int = 1,
        cache_bytes: int = 512 * 2**20,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.dataset = dataset
        self.mode = mode
        self.numerosity_reduction = numerosity_reduction
        self.znormalize_series = znormalize_series
        self.jobs = max(1, int(jobs))
        self.labels = dataset.labels
        self._raw = dataset.znormalized().values if znormalize_series else dataset.values
        self._coeffs = _ByteLRU(cache_bytes)
        self._dists = _ByteLRU(cache_bytes)
        self._dtw: dict[tuple[int, int], float] = {}
        self._dtw_lock = threading.Lock()

    def feasible(self, config: MethodConfig) -> bool:
        return config.window is None or config.window < self.dataset.N

    def histogram(self, config: MethodConfig, fit_rows=None):
        """Histogram for a sympol/bsax config, learned on ``fit_rows`` (all if None)."""
        if config.method == "sympol":
            key = (config.n, config.degree)
            coeffs = self._coeffs.get(key)
            if coeffs is None:
                coeffs = extract_coefficients(self.dataset, config.n, config.degree)
                self._coeffs.put(key, coeffs)
            return sympol_transform(
                self.dataset, config.n, config.alpha, config.degree, fit_rows=fit_rows,
                numerosity_reduction=self.numerosity_reduction, coeffs=coeffs,
            )
        if config.method == "bsax":
            return bsax_transform(
                self.dataset, SaxConfig(config.n, config.word_len, config.alpha),
                fit_rows=fit_rows, numerosity_reduction=self.numerosity_reduction,
            )
        raise ValueError(f"{config.method} does not build histograms")

    def _dtw_pair(self, i: int, j: int) -> float:
        key = (i, j) if i <= j else (j, i)
        with self._dtw_lock:
            hit = self._dtw.get(key)
        if hit is None:
            hit = dtw_distance(self._raw[key[0]], self._raw[key[1]])
            with self._dtw_lock:
                self._dtw[key] = hit
        return hit

    def distances(self, config: MethodConfig, queries, train, fit_rows=None) -> np.ndarray:
        """``(len(queries), len(train))`` block of distances (squared for L2 and DTW)."""
        queries = np.asarray(queries, dtype=np.int64)
        train = np.asarray(train, dtype=np.int64)
        if config.method in HISTOGRAM_METHODS:
            if fit_rows is None:
                key = config
                full = self._dists.get(key)
                if full is None:
                    counts = self.histogram(config).counts
                    full = _squared_block(counts, counts)
                    self._dists.put(key, full)
                return full[np.ix_(queries, train)]
            counts = self.histogram(config, fit_rows).counts
            return _squared_block(counts[queries], counts[train])
        if config.method == "enn":
            X = self._raw
            return np.stack([((X[train] - X[q]) ** 2).sum(axis=1) for q in queries])
        pairs = [(q, t) for q in queries for t in train]
        if self.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                flat = list(pool.map(lambda p: self._dtw_pair(*p), pairs))
        else:
            flat = [self._dtw_pair(q, t) for q, t in pairs]
        return np.array(flat, dtype=np.float64).reshape(len(queries), len(train))

    def mistakes(self, config: MethodConfig, train, evaluate: Sequence) -> list[int]:
        """1-NN mistakes on each index set in ``evaluate``, learning from ``train``."""
        counts = None
        if self.mode == "inductive" and config.method in HISTOGRAM_METHODS:
            counts = self.histogram(config, train).counts
        out = []
        for queries in evaluate:
            if counts is None:
                d = self.distances(config, queries, train)
            else:
                d = _squared_block(counts[queries], counts[train])
            pred = nn_predict(d, self.labels[train])
            out.append(int(np.sum(pred != self.labels[queries])))
        return out

    def search(self, grid: Sequence[MethodConfig], train, val, extra: Sequence = ()):
        """Score every feasible grid point on ``val`` (and on each set in ``extra``).

        Returns the winning config and a list of ``(config, mistakes)``
        pairs in grid order, ``mistakes[0]`` being the validation count.
        """
        feasible = []
        for config in grid:
            if self.feasible(config):
                feasible.append(config)
            else:
                warnings.warn(
                    f"skipping {config}: window {config.window} does not fit series "
                    f"of length {self.dataset.N}",
                    stacklevel=2,
                )
        if not feasible:
            raise ValueError("no grid point fits the series length")
        sets = [val, *extra]
        if self.jobs > 1 and len(feasible) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                scores = list(pool.map(lambda c: self.mistakes(c, train, sets), feasible))
        else:
            scores = [self.mistakes(c, train, sets) for c in feasible]
        table = list(zip(feasible, scores))
        best = min(table, key=lambda item: (item[1][0], item[0].sort_key()))[0]
        return best, table


def grid_search(
    dataset: SeriesDataset,
    train,
    val,
    grid: Sequence[MethodConfig],
    mode: str = "transductive",
    jobs: int = 1,
    **options,
) -> MethodConfig:
    """Grid point with the fewest validation mistakes; ties go to the simplest."""
    evaluator = Evaluator(dataset, mode=mode, jobs=jobs, **options)
    return evaluator.search(grid, train, val)[0]


@dataclass
class FoldResult:
    fold: int
    n_train: int
    n_validation: int
    n_test: int
    params: dict
    validation_error: float | None
    test_error: float
    seconds: float | None = None


@dataclass
class CvReport:
    """Outcome of a cross-validation (or holdout) run."""

    method: str
    mode: str
    protocol: str
    seed: int
    options: dict
    dataset: dict
    folds: list[FoldResult] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([f.test_error for f in self.folds])

    @property
    def error_mean(self) -> float:
        return float(self.errors.mean())

    @property
    def error_std(self) -> float:
        # population deviation over folds
        return float(self.errors.std())

    @property
    def seconds(self) -> np.ndarray:
        return np.array([f.seconds for f in self.folds], dtype=np.float64)

    def to_dict(self, timings: bool = False) -> dict:
        folds = []
        for f in self.folds:
            item = asdict(f)
            if not timings:
                item.pop("seconds")
            folds.append(item)
        out = {
            "method": self.method,
            "mode": self.mode,
            "protocol": self.protocol,
            "seed": self.seed,
            "options": self.options,
            "dataset": self.dataset,
            "folds": folds,
            "error_mean": self.error_mean,
            "error_std": self.error_std,
        }
        if timings:
            out["seconds_mean"] = float(self.seconds.mean())
            out["seconds_std"] = float(self.seconds.std())
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"


def _grid_for(method: str, grid) -> list[MethodConfig]:
    grid = default_grid(method) if grid is None else list(grid)
    if not grid:
        raise ValueError("empty grid")
    if any(c.method != method for c in grid):
        raise ValueError(f"grid mixes methods other than {method}")
    return grid


def _check_classification(dataset: SeriesDataset) -> None:
    if dataset.M < 2 or np.unique(dataset.labels).size < 2:
        raise DatasetError("classification needs at least 2 series and 2 distinct labels")


def _summary(dataset: SeriesDataset, source: str | None) -> dict:
    labels, counts = np.unique(dataset.labels, return_counts=True)
    return {
        "M": dataset.M,
        "N": dataset.N,
        "classes": {str(int(l)): int(c) for l, c in zip(labels, counts)},
        "source": source,
    }


def cross_validate(
    dataset: SeriesDataset,
    method: str,
    grid: Sequence[MethodConfig] | None = None,
    seed: int = 0,
    k: int = 5,
    mode: str = "transductive",
    numerosity_reduction: bool = False,
    znormalize_series: bool = False,
    jobs: int = 1,
    source: str | None = None,
) -> CvReport:
    """Nested k-fold cross-validation with grid search on a rotating validation fold.

    ``grid=None`` searches :func:`default_grid`; a single-point grid is a
    fixed-parameter run.
    """
    _check_classification(dataset)
    grid = _grid_for(method, grid)
    evaluator = Evaluator(
        dataset, mode=mode, numerosity_reduction=numerosity_reduction,
        znormalize_series=znormalize_series, jobs=jobs,
    )
    report = CvReport(
        method=method, mode=mode, protocol=f"{k}-fold", seed=seed,
        options={"numerosity_reduction": numerosity_reduction,
                 "znormalize_series": znormalize_series, "k": k},
        dataset=_summary(dataset, source),
    )
    for r, (train, val, test) in enumerate(rotations(make_folds(dataset.labels, k, seed))):
        start = time.perf_counter()
        best, table = evaluator.search(grid, train, val, extra=(test,))
        val_mistakes, test_mistakes = dict(table)[best]
        report.folds.append(FoldResult(
            fold=r, n_train=len(train), n_validation=len(val), n_test=len(test),
            params=best.params,
            validation_error=val_mistakes / len(val),
            test_error=test_mistakes / len(test),
            seconds=time.perf_counter() - start,
        ))
    return report


def holdout_evaluate(
    train_set: SeriesDataset,
    test_set: SeriesDataset,
    method: str,
    grid: Sequence[MethodConfig] | None = None,
    seed: int = 0,
    k: int = 5,
    mode: str = "transductive",
    numerosity_reduction: bool = False,
    znormalize_series: bool = False,
    jobs: int = 1,
    source: str | None = None,
) -> CvReport:
    """Learn on ``train_set`` and score on ``test_set``.

    With more than one grid point, one of ``k`` stratified folds of the
    training set serves as validation and the rest as training during the
    search; the winner is then learned on the whole training set.
    """
    if train_set.N != test_set.N:
        raise DatasetError(f"train length {train_set.N} differs from test length {test_set.N}")
    combined = SeriesDataset(train_set.series + test_set.series)
    _check_classification(train_set)
    grid = _grid_for(method, grid)
    evaluator = Evaluator(
        combined, mode=mode, numerosity_reduction=numerosity_reduction,
        znormalize_series=znormalize_series, jobs=jobs,
    )
    train = np.arange(train_set.M)
    test = np.arange(train_set.M, combined.M)
    start = time.perf_counter()
    if len(grid) > 1:
        folds = make_folds(train_set.labels, k, seed)
        inner_val = folds[0]
        inner_train = np.sort(np.concatenate(folds[1:]))
        best, table = evaluator.search(grid, inner_train, inner_val)
        val_error = dict(table)[best][0] / len(inner_val)
        n_val = len(inner_val)
    else:
        best, val_error, n_val = grid[0], None, 0
        if not evaluator.feasible(best):
            raise ValueError(f"{best}: window does not fit series of length {combined.N}")
    (test_mistakes,) = evaluator.mistakes(best, train, [test])
    report = CvReport(
        method=method, mode=mode, protocol="holdout", seed=seed,
        options={"numerosity_reduction": numerosity_reduction,
                 "znormalize_series": znormalize_series, "k": k},
        dataset=_summary(combined, source),
    )
    report.folds.append(FoldResult(
        fold=0, n_train=len(train), n_validation=n_val, n_test=len(test),
        params=best.params,
        validation_error=val_error,
        test_error=test_mistakes / len(test),
        seconds=time.perf_counter() - start,
    ))
    return report
