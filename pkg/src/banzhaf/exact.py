"""Exact Banzhaf indices by exhaustive enumeration.

The game is evaluated once per coalition into a packed truth table; the swing
count of feature ``i`` is then the number of differing bit pairs
``(m, m | 2^i)``, found with an XOR and popcount over the table.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from banzhaf.errors import CapacityError
from banzhaf.game import Game, TruthTableGame

DEFAULT_EXACT_CAP = 26
CAP_ENV = "BANZHAF_EXACT_CAP"

# Coalitions evaluated per batch; a power of two so chunks stay byte aligned.
CHUNK_BITS = 16

# Within-byte masks selecting bit positions whose feature-i bit is 0, i < 3.
_LOW_MASKS = (0x55, 0x33, 0x0F)


def exact_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    return int(os.environ.get(CAP_ENV, DEFAULT_EXACT_CAP))


def check_capacity(n: int, cap: int | None = None) -> None:
    limit = exact_cap(cap)
    if n > limit:
        raise CapacityError(
            f"exhaustive computation over {n} features exceeds the cap of {limit} "
            f"(2^{n} coalitions); raise it with --exact-cap or {CAP_ENV}"
        )


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExactResult:
    n: int
    swing_counts: tuple[int, ...]
    evaluations: int = 0
    runtime_ms: float = field(default=0.0, compare=False)
    method: str = "exact"

    @property
    def denominator(self) -> int:
        return 1 << (self.n - 1)

    @property
    def fractions(self) -> list[Fraction]:
        return [Fraction(c, self.denominator) for c in self.swing_counts]

    @property
    def indices(self) -> list[float]:
        return [c / self.denominator for c in self.swing_counts]

    @property
    def dummies(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.swing_counts) if c == 0)


def chunk_ranges(total: int, size: int) -> list[tuple[int, int]]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def ordered_map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so reductions stay in chunk order.
        return list(pool.map(fn, items))


def build_truth_table(game: Game, cap: int | None = None, workers: int | None = None) -> TruthTableGame:
    """Evaluate ``game`` on all ``2^n`` coalitions into a packed table."""
    if isinstance(game, TruthTableGame):
        return game
    n = game.n_features
    check_capacity(n, cap)
    total = 1 << n
    packed = np.zeros(max(1, total // 8), dtype=np.uint8)

    def fill(bounds: tuple[int, int]) -> None:
        start, stop = bounds
        outcomes = game.evaluate_batch(np.arange(start, stop, dtype=np.uint64))
        bits = np.packbits(outcomes, bitorder="little")
        packed[start // 8 : start // 8 + bits.size] = bits

    ordered_map(fill, chunk_ranges(total, 1 << CHUNK_BITS), workers or default_workers())
    return TruthTableGame(n, packed)


def _swing_count(packed: np.ndarray, i: int, workers: int) -> int:
    if i < 3:
        diff = (packed ^ (packed >> (1 << i))) & _LOW_MASKS[i]
        return int(np.bitwise_count(diff).sum(dtype=np.int64))
    stride = 1 << (i - 3)
    pairs = packed.reshape(-1, 2, stride)
    rows = pairs.shape[0]
    step = max(1, (1 << CHUNK_BITS) // stride)

    def count(bounds: tuple[int, int]) -> int:
        block = pairs[bounds[0] : bounds[1]]
        return int(np.bitwise_count(block[:, 0, :] ^ block[:, 1, :]).sum(dtype=np.int64))

    return sum(ordered_map(count, chunk_ranges(rows, step), workers))


def swing_counts_from_table(table: TruthTableGame, workers: int | None = None) -> tuple[int, ...]:
    w = workers or default_workers()
    return tuple(_swing_count(table.packed, i, w) for i in range(table.n_features))


def exact_banzhaf(game: Game, cap: int | None = None, workers: int | None = None) -> ExactResult:
    """Swing counts and indices ``swings / 2^(n-1)`` for every feature."""
    t0 = time.perf_counter()
    evaluations = 0 if isinstance(game, TruthTableGame) else 1 << game.n_features
    table = build_truth_table(game, cap=cap, workers=workers)
    swings = swing_counts_from_table(table, workers)
    return ExactResult(
        n=game.n_features,
        swing_counts=swings,
        evaluations=evaluations,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )


def find_dummies(game: Game, cap: int | None = None, workers: int | None = None) -> set[int]:
    return set(exact_banzhaf(game, cap=cap, workers=workers).dummies)
