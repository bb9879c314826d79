from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banzhaf.errors import ArgumentError, ModelParseError, PrecisionError
from banzhaf.exact import exact_banzhaf
from banzhaf.game import (
    COMPLEMENTED,
    DIRECT,
    LinearThresholdGame,
    MlpGame,
    TruthTableGame,
    WeightedVotingGame,
    is_critical,
    linear_to_voting,
    marginal_contribution,
    mask_from_bits,
    masks_to_matrix,
)
from banzhaf.modelio import load_model, model_from_dict, model_hash, model_to_dict, save_model
from oracles import brute_swings, game_fn


def dictator(n=3):
    return TruthTableGame.from_function(n, lambda m: m & 1)


def constant(n, value=0):
    return TruthTableGame.from_function(n, lambda m: value)


class TestMarginalContribution:
    def test_dictator_empty(self):
        assert marginal_contribution(dictator(), 0, 0) == 1

    @pytest.mark.parametrize("s", [0b001, 0b011, 0b101, 0b111])
    def test_member_contributes_zero(self, s):
        game = TruthTableGame.from_outcomes(np.random.default_rng(s).integers(0, 2, 8))
        assert marginal_contribution(game, 0, s) == 0

    def test_voting_crosses_quota(self, wvg211):
        assert marginal_contribution(wvg211, 1, 0b001) == 1

    def test_negative_contribution(self):
        # F(S) = 1 iff feature 0 absent: adding it makes a winner lose.
        game = TruthTableGame.from_function(2, lambda m: 1 - (m & 1))
        assert marginal_contribution(game, 0, 0) == -1
        assert is_critical(game, 0, 0)

    def test_index_out_of_range(self, wvg211):
        with pytest.raises(ArgumentError):
            marginal_contribution(wvg211, 3, 0)
        with pytest.raises(ArgumentError):
            marginal_contribution(wvg211, -1, 0)

    def test_mask_out_of_range(self, wvg211):
        with pytest.raises(ArgumentError):
            marginal_contribution(wvg211, 0, 0b1000)


class TestIsCritical:
    def test_dictator(self):
        assert is_critical(dictator(), 0, 0b110)

    def test_constant_game(self):
        game = constant(3)
        assert not any(is_critical(game, i, s) for i in range(3) for s in range(8))

    def test_already_winning(self, wvg211):
        assert not is_critical(wvg211, 2, 0b011)


class TestGames:
    @pytest.mark.parametrize(
        "game",
        [
            WeightedVotingGame([2, 1, 1], 3),
            LinearThresholdGame(["0.5", "-1.25", "2"], "-0.5"),
            MlpGame([[1.0, -2.0, 0.5], [0.3, 0.1, -0.7]], [0.1, -0.2], [1.0, -1.5], 0.05),
        ],
    )
    def test_batch_matches_scalar_and_is_binary(self, game):
        masks = np.arange(8, dtype=np.uint64)
        batch = game.evaluate_batch(masks)
        scalar = [game.evaluate(m) for m in range(8)]
        assert batch.tolist() == scalar
        assert set(scalar) <= {0, 1}
        assert game.evaluate_batch(masks).tolist() == scalar  # pure

    def test_truth_table_bits(self):
        game = TruthTableGame.from_outcomes([0, 1, 0, 1])
        assert [game.evaluate(m) for m in range(4)] == [0, 1, 0, 1]
        assert game.to_hex() == "0a"

    def test_truth_table_hex_roundtrip(self, rng):
        for n in (1, 2, 3, 5, 9):
            game = TruthTableGame.from_outcomes(rng.integers(0, 2, 1 << n))
            again = TruthTableGame.from_hex(n, game.to_hex())
            assert again == game
            assert again.outcomes().tolist() == game.outcomes().tolist()

    def test_truth_table_length_checked(self):
        with pytest.raises(ArgumentError):
            TruthTableGame.from_outcomes([0, 1, 1])
        with pytest.raises(ArgumentError):
            TruthTableGame.from_hex(4, "00")
        with pytest.raises(ArgumentError):
            TruthTableGame.from_hex(1, "04")  # bit for coalition 2 does not exist

    def test_truth_table_is_immutable(self):
        game = dictator()
        with pytest.raises(ValueError):
            game.packed[0] = 0

    def test_voting_validation(self):
        with pytest.raises(ArgumentError):
            WeightedVotingGame([1, -1], 1)
        with pytest.raises(ArgumentError):
            WeightedVotingGame([1, 1], 0)
        assert WeightedVotingGame([1, 1], 5).evaluate(0b11) == 0

    def test_linear_tie_is_positive(self):
        game = LinearThresholdGame(["0.1", "0.2"], "-0.3")
        assert game.evaluate(0b11) == 1
        assert game.evaluate_batch(np.array([3], dtype=np.uint64)).tolist() == [1]

    def test_mlp_tie_is_positive(self):
        game = MlpGame([[1.0]], [0.0], [1.0], -1.0)
        assert game.evaluate(1) == 1
        assert game.evaluate(0) == 0

    def test_mlp_shapes(self):
        with pytest.raises(ArgumentError):
            MlpGame([[1.0, 2.0]], [0.0, 1.0], [1.0], 0.0)

    def test_mlp_zero_column_is_dummy(self, rng):
        w1 = rng.normal(size=(6, 5))
        w1[:, 3] = 0.0
        game = MlpGame(w1, rng.normal(size=6), rng.normal(size=6), 0.1)
        assert exact_banzhaf(game).swing_counts[3] == 0

    def test_masks_to_matrix(self):
        x = masks_to_matrix(np.array([0b101, 0b010], dtype=np.uint64), 3)
        assert x.tolist() == [[1, 0, 1], [0, 1, 0]]
        assert mask_from_bits([1, 0, 1]) == 0b101

    def test_63_features(self):
        game = WeightedVotingGame([1] * 63, 63)
        assert game.evaluate((1 << 63) - 1) == 1
        assert game.evaluate_batch(np.array([(1 << 63) - 1], dtype=np.uint64)).tolist() == [1]


class TestLinearToVoting:
    def test_negative_weight_complemented(self):
        conv = linear_to_voting(LinearThresholdGame(["-2", "1"], "0.5"), 2)
        assert conv.game.weights == (4, 2)
        assert conv.game.quota == 3
        assert conv.polarity == (COMPLEMENTED, DIRECT)
        assert exact_banzhaf(conv.game).indices == [1.0, 0.0]

    def test_original_indices_match(self):
        model = LinearThresholdGame(["-2", "1"], "0.5")
        assert brute_swings(2, game_fn(model)) == [2, 0]

    def test_direct_scaling(self):
        conv = linear_to_voting(LinearThresholdGame(["1", "1"], "-1.5"), 2)
        assert conv.game.weights == (2, 2)
        assert conv.game.quota == 3
        assert conv.polarity == (DIRECT, DIRECT)

    def test_precision_error(self):
        with pytest.raises(PrecisionError, match=r"weight\[0\]"):
            linear_to_voting(LinearThresholdGame(["0.3"], "0"), 2)

    def test_constant_win(self):
        conv = linear_to_voting(LinearThresholdGame(["1", "-1"], "2"), 1)
        assert conv.constant_win and conv.game is None
        assert all(conv.evaluate_original(m) == 1 for m in range(4))

    def test_bad_scale(self):
        with pytest.raises(ArgumentError):
            linear_to_voting(LinearThresholdGame(["1"], "0"), 0)

    @settings(max_examples=60, deadline=None)
    @given(
        weights=st.lists(st.integers(-12, 12), min_size=1, max_size=10),
        bias=st.integers(-30, 30),
        scale_pow=st.integers(0, 2),
    )
    def test_roundtrip_exhaustive(self, weights, bias, scale_pow):
        # Decimal weights with up to scale_pow decimal places, converted at 10^scale_pow.
        scale = 10**scale_pow
        model = LinearThresholdGame(
            [Decimal(w) / scale for w in weights], Decimal(bias) / scale
        )
        conv = linear_to_voting(model, scale)
        n = len(weights)
        for m in range(1 << n):
            assert conv.evaluate_original(m) == model.evaluate(m)
        original = brute_swings(n, game_fn(model))
        if conv.constant_win:
            assert original == [0] * n
        else:
            assert list(exact_banzhaf(conv.game).swing_counts) == original


class TestModelFiles:
    @pytest.mark.parametrize(
        "game",
        [
            TruthTableGame.from_outcomes([0, 1, 1, 0, 1, 0, 0, 1]),
            WeightedVotingGame([3, 2, 2], 4),
            LinearThresholdGame(["0.25", "-1.5"], "0.125"),
            LinearThresholdGame(["0.25", "-1.5"], "0.125", label="logreg"),
            MlpGame([[0.1, -0.3], [2.5, 1e-7]], [0.0, -1.0], [1.0, 0.5], -0.25),
        ],
    )
    def test_roundtrip(self, game, tmp_path):
        path = tmp_path / "m.json"
        save_model(game, path)
        again = load_model(path)
        assert model_to_dict(again) == model_to_dict(game)
        assert model_hash(again) == model_hash(game)
        assert [again.evaluate(m) for m in range(4)] == [game.evaluate(m) for m in range(4)]

    def test_decimal_strings(self):
        doc = model_to_dict(MlpGame([[0.1]], [0.2], [0.3], 0.4))
        assert doc["w1"] == [["0.1"]] and doc["b2"] == "0.4"

    def test_unknown_type(self):
        with pytest.raises(ModelParseError, match="forest"):
            model_from_dict({"type": "forest"})

    def test_missing_field(self):
        with pytest.raises(ModelParseError, match="quota"):
            model_from_dict({"type": "voting", "weights": [1]})

    def test_voting_weights_must_be_integers(self):
        with pytest.raises(ModelParseError):
            model_from_dict({"type": "voting", "weights": [1.5], "quota": 1})

    def test_logreg_label_kept(self):
        game = model_from_dict({"type": "logreg", "weights": ["1"], "bias": "0"})
        assert game.label == "logreg"
