"""Monte Carlo, weighted and empirical Banzhaf indices.

Each feature ``i`` gets its own random stream, keyed by ``(seed, i)``. A sample
is a coalition with bit ``i`` cleared, and the estimator counts how often
adding ``i`` flips the outcome. With uniform coalitions this is an unbiased
estimate of ``swings / 2^(n-1)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from banzhaf.errors import ArgumentError
from banzhaf.game import Game, check_n_features, matrix_to_masks

RNG_ALGORITHM = "numpy.PCG64(SeedSequence([seed, feature]))"
BATCH = 1 << 16


def required_samples(epsilon: float, delta: float) -> int:
    """Hoeffding sample size: ``ceil(ln(2/delta) / (2 epsilon^2))``."""
    _check_eps_delta(epsilon, delta)
    return math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon))


def hoeffding_half_width(k: int, delta: float) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * k))


def _check_eps_delta(epsilon: float, delta: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ArgumentError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ArgumentError(f"delta must lie in (0, 1), got {delta}")


def feature_rng(seed: int, feature: int) -> np.random.Generator:
    if seed < 0:
        raise ArgumentError(f"seed must be a non-negative integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(feature)])))


@dataclass(frozen=True)
class EstimateResult:
    """Per-feature estimates ``flip_counts[i] / k``.

    ``half_width`` is the per-feature Hoeffding half-width at level
    ``1 - delta``; there is no joint guarantee across features.
    """

    flip_counts: tuple[int, ...]
    k: int
    seed: int
    epsilon: float | None = None
    delta: float | None = None
    method: str = "monte_carlo"
    runtime_ms: float = field(default=0.0, compare=False)

    @property
    def n(self) -> int:
        return len(self.flip_counts)

    @property
    def indices(self) -> list[float]:
        return [c / self.k for c in self.flip_counts]

    @property
    def half_width(self) -> float | None:
        if self.epsilon is not None:
            return self.epsilon
        if self.delta is not None:
            return hoeffding_half_width(self.k, self.delta)
        return None


@dataclass(frozen=True)
class ProductDistribution:
    """Independent features, feature ``j`` present with probability ``probs[j]``."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        check_n_features(len(probs))
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ArgumentError("product distribution probabilities must lie in [0, 1]")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> ProductDistribution:
        return cls((0.5,) * n)


def _flip_count(game: Game, i: int, masks: np.ndarray) -> int:
    bit = np.uint64(1 << i)
    without = masks & ~bit
    diff = game.evaluate_batch(without | bit) != game.evaluate_batch(without)
    return int(np.count_nonzero(diff))


def _estimate(game: Game, k: int, seed: int, draw) -> list[int]:
    counts = []
    for i in range(game.n_features):
        rng = feature_rng(seed, i)
        total = 0
        remaining = k
        while remaining:
            b = min(BATCH, remaining)
            total += _flip_count(game, i, draw(rng, b))
            remaining -= b
        counts.append(total)
    return counts


def monte_carlo_banzhaf(
    game: Game,
    epsilon: float | None = 0.05,
    delta: float | None = 0.05,
    seed: int = 0,
    samples: int | None = None,
) -> EstimateResult:
    """Uniform-coalition estimate with ``k = required_samples(epsilon, delta)``.

    ``samples`` overrides the Hoeffding sample size; the reported half-width is
    then recomputed from ``delta``.
    """
    t0 = time.perf_counter()
    if samples is None:
        if epsilon is None or delta is None:
            raise ArgumentError("either samples or both epsilon and delta are required")
        k = required_samples(epsilon, delta)
    else:
        if samples < 1:
            raise ArgumentError(f"samples must be >= 1, got {samples}")
        k = int(samples)
        if delta is not None and not 0.0 < delta < 1.0:
            raise ArgumentError(f"delta must lie in (0, 1), got {delta}")
        epsilon = None
    n = game.n_features
    high = 1 << n

    def draw(rng: np.random.Generator, b: int) -> np.ndarray:
        return rng.integers(0, high, size=b, dtype=np.uint64)

    counts = _estimate(game, k, seed, draw)
    return EstimateResult(
        tuple(counts), k, seed, epsilon, delta, "monte_carlo", (time.perf_counter() - t0) * 1000.0
    )


def weighted_banzhaf(game: Game, dist: ProductDistribution, k: int, seed: int = 0) -> EstimateResult:
    """Estimate under independent feature presence probabilities ``dist.probs``."""
    t0 = time.perf_counter()
    if len(dist.probs) != game.n_features:
        raise ArgumentError(f"distribution has {len(dist.probs)} probabilities for {game.n_features} features")
    if k < 1:
        raise ArgumentError(f"k must be >= 1, got {k}")
    probs = np.array(dist.probs)

    def draw(rng: np.random.Generator, b: int) -> np.ndarray:
        return matrix_to_masks(rng.random((b, len(probs))) < probs)

    counts = _estimate(game, int(k), seed, draw)
    return EstimateResult(tuple(counts), int(k), seed, None, None, "weighted_mc", (time.perf_counter() - t0) * 1000.0)


def _rows_as_masks(data, n: int) -> np.ndarray:
    x = data.X if hasattr(data, "X") else np.asarray(data)
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ArgumentError("empirical index needs a non-empty dataset")
    if x.shape[1] != n:
        raise ArgumentError(f"dataset rows have {x.shape[1]} features, game has {n}")
    if np.any((x != 0) & (x != 1)):
        raise ArgumentError("dataset cells must be 0 or 1")
    return matrix_to_masks(x.astype(np.uint8))


def empirical_flip_counts(game: Game, data, literal: bool = False) -> tuple[tuple[int, ...], int]:
    """Per-feature flip counts over the dataset rows, and the row count.

    By default a row contributes ``|F(x with i set) - F(x with i cleared)|``.
    ``literal=True`` uses ``F(x | {i}) - F(x)`` as written, which is zero for
    rows that already contain ``i``.
    """
    masks = _rows_as_masks(data, game.n_features)
    base = game.evaluate_batch(masks) if literal else None
    counts = []
    for i in range(game.n_features):
        bit = np.uint64(1 << i)
        if literal:
            flips = game.evaluate_batch(masks | bit) != base
        else:
            without = masks & ~bit
            flips = game.evaluate_batch(without | bit) != game.evaluate_batch(without)
        counts.append(int(np.count_nonzero(flips)))
    return tuple(counts), len(masks)


def empirical_banzhaf(game: Game, data, literal: bool = False) -> list[float]:
    """Flip rate of each feature over the dataset, normalized by ``|X|``."""
    counts, rows = empirical_flip_counts(game, data, literal)
    return [c / rows for c in counts]
