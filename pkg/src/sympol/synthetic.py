"""Generated "bag of patterns" datasets: long series made of shuffled local shapes."""

from __future__ import annotations

import numpy as np

from .timeseries import SeriesDataset, znormalize_window

__all__ = ["random_pattern", "generate_bag_of_patterns"]


def random_pattern(rng: np.random.Generator, length: int) -> np.ndarray:
    """A smooth shape: random cubic plus one sinusoid, z-normalized."""
    t = np.linspace(-1.0, 1.0, length)
    poly = np.polynomial.polynomial.polyval(t, rng.normal(size=4))
    freq = rng.uniform(0.5, 2.0)
    wave = rng.uniform(0.3, 1.5) * np.sin(np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    return znormalize_window(poly + wave)


def generate_bag_of_patterns(
    classes: int = 2,
    patterns_per_class: int = 2,
    pattern_len: int = 60,
    N: int = 1000,
    M: int = 40,
    noise: float = 0.1,
    seed: int = 0,
) -> SeriesDataset:
    """Series built by concatenating patterns from a per-class vocabulary.

    Every class owns ``patterns_per_class`` random smooth patterns. A series
    picks random frequencies for its class's patterns, concatenates draws
    in random order, starts at a random offset into that sequence and adds
    Gaussian noise of deviation ``noise``. Labels are ``0 .. classes-1``,
    assigned round-robin, so classes are balanced.
    """
    if pattern_len >= N:
        raise ValueError(f"pattern length {pattern_len} must be shorter than series length {N}")
    if classes < 1 or patterns_per_class < 1 or M < 1:
        raise ValueError("classes, patterns per class and M must be positive")
    rng = np.random.default_rng(seed)
    vocab = [[random_pattern(rng, pattern_len) for _ in range(patterns_per_class)]
             for _ in range(classes)]
    pieces = -(-N // pattern_len) + 1
    values = np.empty((M, N))
    labels = np.arange(M) % classes
    for i, label in enumerate(labels):
        weights = rng.dirichlet(np.ones(patterns_per_class))
        picks = rng.choice(patterns_per_class, size=pieces, p=weights)
        stream = np.concatenate([vocab[label][p] for p in picks])
        start = rng.integers(pattern_len)
        values[i] = stream[start:start + N] + rng.normal(scale=noise, size=N)
    return SeriesDataset.from_arrays(values, labels)
