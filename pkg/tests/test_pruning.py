import numpy as np
import pytest

from banzhaf.errors import ArgumentError, CapacityError
from banzhaf.exact import exact_banzhaf
from banzhaf.game import LinearThresholdGame, MlpGame, TruthTableGame, WeightedVotingGame
from banzhaf.pruning import PrunedGame, prune_dummies, shrink, verify_lossless
from oracles import brute_indices, game_fn
from conftest import random_table


def with_dummies(game, d):
    """Tile a table over ``d`` extra high-order features that never matter."""
    outcomes = np.tile(game.outcomes(), 1 << d)
    return TruthTableGame.from_outcomes(outcomes)


class TestPruneDummies:
    def test_dictator(self, dictator3):
        pruned, cert = prune_dummies(dictator3)
        assert cert.pruned == (1, 2)
        assert cert.kept == (0,)
        assert pruned.n_features == 1
        assert cert.valid
        assert cert.model_hash.startswith("sha256:")

    def test_no_dummies(self, wvg211):
        _, cert = prune_dummies(wvg211)
        assert cert.pruned == ()
        assert cert.kept == (0, 1, 2)

    def test_tiled_table(self):
        base = TruthTableGame.from_outcomes([0, 1, 1, 0, 1, 0, 0, 1])
        _, cert = prune_dummies(with_dummies(base, 1))
        assert cert.pruned == (3,)
        assert cert.verification.mismatches == 0
        assert cert.verification.checks == 16

    def test_random_augmented(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 8))
            d = int(rng.integers(1, 4))
            base = random_table(rng, n)
            base_dummies = exact_banzhaf(base).dummies
            _, cert = prune_dummies(with_dummies(base, d))
            assert set(cert.pruned) == base_dummies | set(range(n, n + d))
            assert cert.valid

    def test_kept_indices_unchanged(self, rng):
        for _ in range(10):
            base = random_table(rng, 4)
            game = with_dummies(base, 2)
            pruned, cert = prune_dummies(game)
            # Indices, not raw counts: the denominator shrinks with n.
            before = exact_banzhaf(game).indices
            after = brute_indices(pruned.n_features, game_fn(pruned))
            assert after == [before[old] for old in cert.kept]

    def test_certificate_dict(self, dictator3):
        _, cert = prune_dummies(dictator3)
        doc = cert.to_dict()
        assert doc["index_map"] == {"0": 0}
        assert doc["verification"] == {"mode": "exhaustive", "checks": 8, "mismatches": 0, "seed": None}
        assert doc["valid"] is True

    def test_sampled_verification(self, dictator3):
        _, cert = prune_dummies(dictator3, verify="sampled", k=500, seed=3)
        assert cert.verification.mode == "sampled"
        assert cert.verification.checks == 500
        assert cert.valid

    def test_no_verification(self, dictator3):
        _, cert = prune_dummies(dictator3, verify=None)
        assert not cert.valid

    def test_capacity(self):
        with pytest.raises(CapacityError):
            prune_dummies(WeightedVotingGame([1] * 12, 3), cap=10)


class TestVerifyLossless:
    def test_negative_control(self):
        game = WeightedVotingGame([1, 1, 1], 2)
        result = verify_lossless(game, PrunedGame(game, [0]))
        assert result.mismatches > 0

    def test_negative_control_sampled(self):
        game = WeightedVotingGame([1, 1, 1], 2)
        assert verify_lossless(game, PrunedGame(game, [2]), "sampled", k=200).mismatches > 0

    def test_unknown_mode(self, dictator3):
        with pytest.raises(ArgumentError):
            verify_lossless(dictator3, PrunedGame(dictator3, [1]), "guess")

    def test_mlp_score_changes_outcome_does_not(self):
        # Feature 1 feeds an always-active unit and shifts the score by 0.5,
        # but the score stays in {-2, -1.5} or {2, 2.5}: never across 0.
        game = MlpGame([[3.0, 0.0], [0.0, 0.5]], [-2.0, 1.0], [4.0, 1.0], -3.0)
        assert game.scores(np.array([[0, 1]]))[0] != game.scores(np.array([[0, 0]]))[0]
        pruned, cert = prune_dummies(game)
        assert cert.pruned == (1,)
        assert cert.valid
        for m in range(4):
            assert pruned.evaluate(pruned.project(m)) == game.evaluate(m)


class TestPrunedGame:
    def test_index_mapping(self):
        game = TruthTableGame.from_function(5, lambda m: m >> 1 & m >> 4 & 1)
        pruned = PrunedGame(game, [0, 2, 3])
        assert pruned.kept == (1, 4)
        assert pruned.expand(0b11) == 0b10010
        assert pruned.project(0b11111) == 0b11
        masks = np.arange(4, dtype=np.uint64)
        assert pruned.project_batch(pruned.expand_batch(masks)).tolist() == masks.tolist()
        assert pruned.evaluate_batch(masks).tolist() == [0, 0, 0, 1]

    def test_bad_feature(self, wvg211):
        with pytest.raises(ArgumentError):
            PrunedGame(wvg211, [3])


class TestShrink:
    def test_voting(self):
        game = WeightedVotingGame([3, 0, 2, 0], 4)
        small = shrink(game, [1, 3])
        assert small.weights == (3, 2) and small.quota == 4
        assert exact_banzhaf(small).indices == [exact_banzhaf(game).indices[j] for j in (0, 2)]

    def test_linear(self):
        game = LinearThresholdGame(["1", "0", "-2"], "0.5", label="logreg")
        small = shrink(game, [1])
        assert small.label == "logreg"
        assert [small.evaluate(m) for m in range(4)] == [game.evaluate(m & 1 | (m >> 1) << 2) for m in range(4)]

    def test_other_games(self):
        with pytest.raises(ArgumentError):
            shrink(TruthTableGame.from_outcomes([0, 1]), [0])
