"""Generating-function swing counts for weighted voting games.

The coefficients of ``prod_j (1 + x^{w_j})`` count coalitions by total weight.
Dividing out one player's factor gives the counts over the other players,
and a player swings exactly the coalitions whose weight lies in
``[quota - w_i, quota - 1]``. Total cost is ``O(n W)`` big-integer additions
for total weight ``W``.
"""

from __future__ import annotations

import time

import numpy as np

from banzhaf.errors import ArgumentError, CapacityError
from banzhaf.exact import ExactResult
from banzhaf.game import WeightedVotingGame

DEFAULT_WEIGHT_CAP = 10**7


def _check_weight_cap(total: int, cap: int | None) -> None:
    limit = DEFAULT_WEIGHT_CAP if cap is None else cap
    if total > limit:
        raise CapacityError(
            f"total weight {total} exceeds the generating-function cap of {limit}; "
            "use the enumeration engine (banzhaf exact) or raise --weight-cap"
        )


def weight_distribution(game: WeightedVotingGame, cap: int | None = None) -> list[int]:
    """``counts[s]`` = number of coalitions with total weight exactly ``s``."""
    if not isinstance(game, WeightedVotingGame):
        raise ArgumentError("weight_distribution needs a WeightedVotingGame")
    _check_weight_cap(game.total_weight, cap)
    return [int(c) for c in _product(game.weights)]


def _product(weights) -> np.ndarray:
    counts = np.zeros(sum(weights) + 1, dtype=object)
    counts[0] = 1
    reach = 0
    for w in weights:
        if w == 0:
            counts[: reach + 1] *= 2
            continue
        # Descending update in one vectorized step: right side is evaluated first.
        counts[w : reach + w + 1] = counts[w : reach + w + 1] + counts[: reach + 1]
        reach += w
    return counts


def _deflate(counts: np.ndarray, w: int) -> np.ndarray:
    """Divide ``counts`` by ``(1 + x^w)``: coalition counts without that player."""
    if w == 0:
        return counts // 2
    size = len(counts) - w
    out = np.empty(size, dtype=object)
    out[: min(w, size)] = counts[: min(w, size)]
    for start in range(w, size, w):
        stop = min(start + w, size)
        out[start:stop] = counts[start:stop] - out[start - w : stop - w]
    return out


def gf_banzhaf(game: WeightedVotingGame, cap: int | None = None) -> ExactResult:
    if not isinstance(game, WeightedVotingGame):
        raise ArgumentError("the generating-function method needs a weighted voting game")
    t0 = time.perf_counter()
    _check_weight_cap(game.total_weight, cap)
    counts = _product(game.weights)
    q = game.quota
    swings = []
    for w in game.weights:
        others = _deflate(counts, w)
        lo = max(0, q - w)
        hi = min(q - 1, len(others) - 1)
        swings.append(int(others[lo : hi + 1].sum()) if lo <= hi else 0)
    return ExactResult(
        n=game.n_features,
        swing_counts=tuple(swings),
        evaluations=0,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
        method="generating_function",
    )
