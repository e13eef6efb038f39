"""Command-line entry point.

Example::

    sympol run --synthetic bag-of-patterns --method sympol --seed 1
    sympol run --data ecg2.txt --method bsax --grid default --jobs 4 --time
    sympol run --data ecg2.txt --method sympol --n 100 --alpha 4 --degree 3 \\
        --export-histogram hist.csv
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .evaluation import (
    METHODS,
    MODES,
    Evaluator,
    MethodConfig,
    cross_validate,
    holdout_evaluate,
    make_folds,
    rotations,
)
from .synthetic import generate_bag_of_patterns
from .timeseries import DatasetError, SeriesDataset, load_dataset

_FIXED = {"sympol": ("n", "alpha", "degree"), "bsax": ("n", "alpha", "word_len")}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunSpec:
    data: str | None
    test_data: str | None
    synthetic: dict | None
    method: str
    config: MethodConfig | None  # None: search the default grid
    mode: str
    numerosity_reduction: bool
    znormalize_series: bool
    folds: int
    seed: int
    jobs: int
    timing: bool
    out: Path
    export_histogram: Path | None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sympol", description="Symbolic polynomial histograms for time-series classification."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="cross-validate a method and write a JSON report")

    src = run.add_argument_group("data")
    src.add_argument("--data", metavar="PATH", help="label-first series file")
    src.add_argument("--test-data", metavar="PATH",
                     help="score on this file after learning on --data instead of cross-validating")
    src.add_argument("--synthetic", choices=["bag-of-patterns"], help="generate data in-process")
    src.add_argument("--znormalize-series", action="store_true",
                     help="z-normalize whole series before the enn/dtwnn baselines")

    m = run.add_argument_group("method")
    m.add_argument("--method", choices=METHODS, required=True)
    m.add_argument("--grid", choices=["default", "none"],
                   help="search the default grid, or use fixed --n/--alpha/... values")
    m.add_argument("--n", type=int, help="sliding window length")
    m.add_argument("--alpha", type=int, help="alphabet size")
    m.add_argument("--degree", type=int, help="polynomial degree (sympol)")
    m.add_argument("--word-len", type=int, help="SAX word length (bsax)")
    m.add_argument("--mode", choices=MODES, default="transductive",
                   help="learn thresholds and dictionary on all series or on training folds only")
    m.add_argument("--numerosity-reduction", action="store_true",
                   help="collapse consecutive repeated words")

    e = run.add_argument_group("evaluation")
    e.add_argument("--folds", type=int, default=5)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--jobs", type=int, default=1, help="worker threads")
    e.add_argument("--time", action="store_true", help="report wall-clock seconds per fold")
    e.add_argument("--out", type=Path, default=Path("report.json"), metavar="PATH")
    e.add_argument("--export-histogram", type=Path, metavar="PATH",
                   help="write the histogram of a fixed-parameter sympol/bsax config as CSV")

    g = run.add_argument_group("generator (--synthetic bag-of-patterns)")
    g.add_argument("--classes", type=int, default=2)
    g.add_argument("--patterns-per-class", type=int, default=2)
    g.add_argument("--pattern-len", type=int, default=60)
    g.add_argument("--length", type=int, default=1000, help="series length N")
    g.add_argument("--instances", type=int, default=40, help="number of series M")
    g.add_argument("--noise", type=float, default=0.1, help="Gaussian noise deviation")
    return parser


def _resolve_config(args) -> MethodConfig | None:
    names = _FIXED.get(args.method, ())
    given = {name: getattr(args, name) for name in ("n", "alpha", "degree", "word_len")
             if getattr(args, name) is not None}
    extra = set(given) - set(names)
    if extra:
        flags = ", ".join("--" + k.replace("_", "-") for k in sorted(extra))
        raise UsageError(f"{flags} not used by method {args.method}")
    if not names:
        return MethodConfig(args.method)
    if args.grid == "default":
        if given:
            raise UsageError("--grid default cannot be combined with fixed hyperparameters")
        return None
    if not given and args.grid is None:
        return None
    missing = [n for n in names if n not in given]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"fixed-parameter {args.method} run needs {flags}")
    try:
        return MethodConfig(args.method, **given)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def make_spec(args) -> RunSpec:
    if (args.data is None) == (args.synthetic is None):
        raise UsageError("give exactly one of --data and --synthetic")
    if args.test_data and args.synthetic:
        raise UsageError("--test-data needs --data")
    if args.folds < 3:
        raise UsageError("--folds must be at least 3")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    config = _resolve_config(args)
    if args.export_histogram and (config is None or args.method not in _FIXED):
        raise UsageError("--export-histogram needs a fixed-parameter sympol or bsax run")
    synthetic = None
    if args.synthetic:
        synthetic = dict(classes=args.classes, patterns_per_class=args.patterns_per_class,
                         pattern_len=args.pattern_len, N=args.length, M=args.instances,
                         noise=args.noise, seed=args.seed)
    return RunSpec(
        data=args.data, test_data=args.test_data, synthetic=synthetic, method=args.method,
        config=config, mode=args.mode, numerosity_reduction=args.numerosity_reduction,
        znormalize_series=args.znormalize_series, folds=args.folds, seed=args.seed,
        jobs=args.jobs, timing=args.time, out=args.out, export_histogram=args.export_histogram,
    )


def _load(spec: RunSpec) -> tuple[SeriesDataset, SeriesDataset | None, str]:
    if spec.synthetic is not None:
        params = ",".join(f"{k}={v}" for k, v in spec.synthetic.items())
        return generate_bag_of_patterns(**spec.synthetic), None, f"synthetic:bag-of-patterns({params})"
    train = load_dataset(spec.data)
    test = load_dataset(spec.test_data) if spec.test_data else None
    source = Path(spec.data).name + (f"+{Path(spec.test_data).name}" if test else "")
    return train, test, source


def export_histogram(spec: RunSpec, train: SeriesDataset, test: SeriesDataset | None) -> None:
    """Write the histogram CSV for ``spec.config``.

    Inductive runs learn the dictionary from the training folds of the
    first cross-validation rotation, or from ``train`` in a holdout run.
    """
    if test is None:
        data = train
        fit = None
        if spec.mode == "inductive":
            fit = rotations(make_folds(train.labels, spec.folds, spec.seed))[0][0]
    else:
        data = SeriesDataset(train.series + test.series)
        fit = None if spec.mode == "transductive" else np.arange(train.M)
    evaluator = Evaluator(data, mode=spec.mode, numerosity_reduction=spec.numerosity_reduction)
    if not evaluator.feasible(spec.config):
        raise ValueError(f"{spec.config}: window does not fit series of length {data.N}")
    evaluator.histogram(spec.config, fit).to_csv(spec.export_histogram, data.labels)


def run(spec: RunSpec) -> int:
    train, test, source = _load(spec)
    if spec.export_histogram:
        export_histogram(spec, train, test)
    grid = None if spec.config is None else [spec.config]
    options = dict(seed=spec.seed, k=spec.folds, mode=spec.mode,
                   numerosity_reduction=spec.numerosity_reduction,
                   znormalize_series=spec.znormalize_series, jobs=spec.jobs, source=source)
    start = time.perf_counter()
    if test is None:
        report = cross_validate(train, spec.method, grid, **options)
    else:
        report = holdout_evaluate(train, test, spec.method, grid, **options)
    total = time.perf_counter() - start
    spec.out.write_text(report.to_json(timings=spec.timing), encoding="utf-8")
    print_summary(report, timing=spec.timing, total=total)
    return 0


def print_summary(report, timing: bool = False, total: float | None = None, file=None) -> None:
    file = file or sys.stdout
    print(f"{report.method}  mode={report.mode}  protocol={report.protocol}  "
          f"source={report.dataset['source']}", file=file)
    head = f"{'fold':>4}  {'test error':>10}  {'val error':>9}"
    if timing:
        head += f"  {'seconds':>9}"
    print(head + "  params", file=file)
    for f in report.folds:
        val = "-" if f.validation_error is None else f"{f.validation_error:.4f}"
        line = f"{f.fold:>4}  {f.test_error:>10.4f}  {val:>9}"
        if timing:
            line += f"  {f.seconds:>9.2f}"
        params = " ".join(f"{k}={v}" for k, v in f.params.items()) or "-"
        print(f"{line}  {params}", file=file)
    print(f"error  mu (mean) = {report.error_mean:.4f}  sigma (st.dev.) = {report.error_std:.4f}",
          file=file)
    if timing:
        print(f"time   mu (mean) = {report.seconds.mean():.2f}s  "
              f"sigma (st.dev.) = {report.seconds.std():.2f}s  total = {total:.2f}s", file=file)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = make_spec(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sympol: error: {exc}", file=sys.stderr)
        return 2
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        warnings.showwarning = _warn_to_stderr
        try:
            return run(spec)
        except (DatasetError, ValueError, OSError) as exc:
            print(f"sympol: error: {exc}", file=sys.stderr)
            return 1


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    print(f"sympol: warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
