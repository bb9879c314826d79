"""Lossless removal of dummy features.

A dummy feature never changes the outcome, so pinning it to any constant
leaves ``F`` unchanged on every feature vector. Detection is exact only: a
sampled estimate of zero proves nothing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from banzhaf.errors import ArgumentError
from banzhaf.exact import check_capacity, chunk_ranges, default_workers, exact_banzhaf, ordered_map
from banzhaf.game import (
    Game,
    LinearThresholdGame,
    WeightedVotingGame,
    check_feature,
    check_mask,
)
from banzhaf.modelio import model_hash
from banzhaf.sampling import feature_rng

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"


class PrunedGame(Game):
    """``original`` restricted to ``kept`` features, the rest pinned to 0.

    Feature ``k`` of the pruned game is feature ``kept[k]`` of the original.
    """

    kind = "pruned"

    def __init__(self, original: Game, pruned: Iterable[int]):
        n = original.n_features
        pruned = frozenset(int(i) for i in pruned)
        for i in pruned:
            check_feature(i, n)
        self.original = original
        self.pruned = pruned
        self.kept = tuple(i for i in range(n) if i not in pruned)
        self.n_features = len(self.kept)

    def expand(self, mask: int) -> int:
        return sum(1 << old for new, old in enumerate(self.kept) if mask >> new & 1)

    def project(self, mask: int) -> int:
        """Original coalition to pruned coalition; pruned bits are dropped."""
        return sum(1 << new for new, old in enumerate(self.kept) if mask >> old & 1)

    def expand_batch(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros_like(masks)
        for new, old in enumerate(self.kept):
            out |= ((masks >> np.uint64(new)) & np.uint64(1)) << np.uint64(old)
        return out

    def project_batch(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros_like(masks)
        for new, old in enumerate(self.kept):
            out |= ((masks >> np.uint64(old)) & np.uint64(1)) << np.uint64(new)
        return out

    def evaluate(self, mask: int) -> int:
        check_mask(mask, self.n_features)
        return self.original.evaluate(self.expand(mask))

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        return self.original.evaluate_batch(self.expand_batch(masks))

    def __repr__(self) -> str:
        return f"PrunedGame({self.original!r}, pruned={sorted(self.pruned)})"


@dataclass(frozen=True)
class Verification:
    mode: str
    checks: int
    mismatches: int
    seed: int | None = None


@dataclass(frozen=True)
class PruneCertificate:
    pruned: tuple[int, ...]
    kept: tuple[int, ...]
    verification: Verification | None
    model_hash: str | None = None

    @property
    def valid(self) -> bool:
        return self.verification is not None and self.verification.mismatches == 0

    def to_dict(self) -> dict:
        return {
            "pruned": list(self.pruned),
            "kept": list(self.kept),
            "index_map": {str(old): new for new, old in enumerate(self.kept)},
            "verification": None if self.verification is None else asdict(self.verification),
            "model_hash": self.model_hash,
            "valid": self.valid,
        }


def verify_lossless(
    original: Game,
    pruned: PrunedGame,
    mode: str = EXHAUSTIVE,
    k: int = 100_000,
    seed: int = 0,
    cap: int | None = None,
    workers: int | None = None,
) -> Verification:
    """Compare outcomes of ``original`` and ``pruned`` on original coalitions.

    Exhaustive mode checks all ``2^n`` coalitions and is a proof; sampled mode
    checks ``k`` uniform coalitions and is evidence only.
    """
    n = original.n_features
    if pruned.original.n_features != n:
        raise ArgumentError("pruned game was built from a game with a different feature count")

    def mismatches(masks: np.ndarray) -> int:
        a = original.evaluate_batch(masks)
        b = pruned.evaluate_batch(pruned.project_batch(masks))
        return int(np.count_nonzero(a != b))

    if mode == EXHAUSTIVE:
        check_capacity(n, cap)
        total = 1 << n
        parts = ordered_map(
            lambda bounds: mismatches(np.arange(*bounds, dtype=np.uint64)),
            chunk_ranges(total, 1 << 16),
            workers or default_workers(),
        )
        return Verification(EXHAUSTIVE, total, sum(parts))
    if mode == SAMPLED:
        if k < 1:
            raise ArgumentError(f"sample count must be >= 1, got {k}")
        # Stream keyed past any feature index so it never coincides with MC streams.
        rng = feature_rng(seed, 1 << 20)
        masks = rng.integers(0, 1 << n, size=int(k), dtype=np.uint64)
        return Verification(SAMPLED, int(k), mismatches(masks), seed)
    raise ArgumentError(f"unknown verification mode {mode!r} (expected exhaustive or sampled)")


def prune_dummies(
    game: Game,
    verify: str | None = EXHAUSTIVE,
    k: int = 100_000,
    seed: int = 0,
    cap: int | None = None,
    workers: int | None = None,
) -> tuple[PrunedGame, PruneCertificate]:
    """Pin every exact dummy feature to 0 and certify the result."""
    result = exact_banzhaf(game, cap=cap, workers=workers)
    pruned = PrunedGame(game, result.dummies)
    verification = None
    if verify is not None:
        verification = verify_lossless(game, pruned, verify, k=k, seed=seed, cap=cap, workers=workers)
    try:
        digest = model_hash(game)
    except ArgumentError:
        digest = None
    cert = PruneCertificate(tuple(sorted(pruned.pruned)), pruned.kept, verification, digest)
    return pruned, cert


def shrink(game: Game, pruned: Iterable[int]) -> Game:
    """Drop pruned features from a voting or linear model's weight vector.

    Equivalent to pinning them to 0; only offered where that is obviously so.
    """
    drop = set(pruned)
    if isinstance(game, WeightedVotingGame):
        return WeightedVotingGame([w for j, w in enumerate(game.weights) if j not in drop], game.quota)
    if isinstance(game, LinearThresholdGame):
        return LinearThresholdGame(
            [w for j, w in enumerate(game.weights) if j not in drop], game.bias, label=game.label
        )
    raise ArgumentError(f"weight-level shrink is only defined for voting and linear models, not {game.kind}")
