import json

import pytest

from banzhaf import report
from banzhaf.errors import ArgumentError
from banzhaf.exact import exact_banzhaf
from banzhaf.game import LinearThresholdGame, WeightedVotingGame
from banzhaf.modelio import model_hash
from banzhaf.sampling import monte_carlo_banzhaf


def info(game, path="m.json"):
    return report.model_info(path, game, model_hash(game))


def values_report(values, method="saliency", model=None):
    return report.power_report(method, values, model or {"path": None, "type": "mlp", "hash": "sha256:x"})


class TestPowerReport:
    def test_exact(self, wvg211):
        doc = report.from_exact(exact_banzhaf(wvg211), info(wvg211))
        assert [e["value"] for e in doc["entries"]] == [0.75, 0.25, 0.25]
        assert [e["swing_count"] for e in doc["entries"]] == [3, 1, 1]
        assert doc["entries"][0]["feature_name"] == "f1"
        assert doc["dummies"] == []
        assert doc["params"]["denominator"] == 4

    def test_estimate(self, wvg211):
        doc = report.from_estimate(monte_carlo_banzhaf(wvg211, seed=2), info(wvg211), ["a", "b", "c"])
        assert doc["params"]["k"] == 738
        assert doc["entries"][1]["feature_name"] == "b"
        assert all(e["ci_half_width"] == 0.05 for e in doc["entries"])
        assert all(e["value"] == e["flip_count"] / 738 for e in doc["entries"])

    def test_coefficients(self):
        game = LinearThresholdGame(["-0.5", "0", "1.5"], "0", label="logreg")
        doc = report.from_coefficients(game, info(game))
        assert [e["value"] for e in doc["entries"]] == [0.5, 0.0, 1.5]
        assert [e["signed_value"] for e in doc["entries"]] == [-0.5, 0.0, 1.5]
        assert doc["pruned_by_l1"] == [1]
        assert doc["model"]["type"] == "logreg"

    def test_rejects_bad_input(self):
        with pytest.raises(ArgumentError):
            values_report([float("nan")])
        with pytest.raises(ArgumentError):
            values_report([1.0], method="guess")
        with pytest.raises(ArgumentError):
            report.power_report("saliency", [1.0, 2.0], {"path": None, "type": "mlp", "hash": None}, ["a"])

    def test_validate(self):
        doc = values_report([1.0])
        bad = dict(doc, spec_version="0.9")
        with pytest.raises(ArgumentError, match="version"):
            report.validate(bad)
        with pytest.raises(ArgumentError):
            report.validate(dict(doc, n_features="one"))
        with pytest.raises(ArgumentError):
            report.validate({"kind": "other"})

    def test_strip_runtime(self, wvg211):
        doc = report.from_exact(exact_banzhaf(wvg211), info(wvg211))
        stripped = report.strip_runtime(doc)
        assert "runtime_ms" not in stripped and stripped["entries"] == doc["entries"]


class TestCompare:
    def test_self(self):
        a = values_report([0.1, 0.5, 0.3, 0.2])
        doc = report.compare([a, a], k=2)
        assert doc["spearman"][0][1] == 1.0
        assert doc["kendall"][0][1] == 1.0
        assert doc["top_k_overlap"][0][1] == 1.0
        assert doc["methods"] == ["saliency", "saliency#2"]
        assert doc["top_k_sets"]["saliency"] == ["f2", "f3"]

    def test_reversed(self):
        a = values_report([1.0, 2.0, 3.0, 4.0])
        b = values_report([4.0, 3.0, 2.0, 1.0], method="empirical")
        doc = report.compare([a, b], k=2)
        assert doc["spearman"][0][1] == -1.0
        assert doc["kendall"][0][1] == -1.0
        assert doc["top_k_overlap"][0][1] == 0.0

    def test_symmetric(self, rng):
        reports = [values_report(list(rng.random(6)), m) for m in ("monte_carlo", "saliency", "empirical")]
        doc = report.compare(reports, k=3)
        for key in ("spearman", "kendall", "top_k_overlap"):
            matrix = doc[key]
            assert all(matrix[i][j] == matrix[j][i] for i in range(3) for j in range(3))

    def test_constant_vector_gives_null(self):
        # Equal indices, e.g. w=(3,2,2,2,2), q=6 where every player scores 0.375.
        game = WeightedVotingGame([3, 2, 2, 2, 2], 6)
        exact = report.from_exact(exact_banzhaf(game), info(game))
        assert {e["value"] for e in exact["entries"]} == {0.375}
        other = report.power_report("saliency", [0.1, 0.2, 0.3, 0.4, 0.5], exact["model"])
        doc = report.compare([exact, other], k=2)
        assert doc["spearman"][0][1] is None and doc["kendall"][0][1] is None
        assert doc["top_k_sets"]["exact"] == ["f1", "f2"]  # ties break toward lower index
        json.dumps(doc)

    def test_model_mismatch(self):
        a = values_report([1.0, 2.0], model={"path": None, "type": "mlp", "hash": "sha256:a"})
        b = values_report([1.0, 2.0], model={"path": None, "type": "mlp", "hash": "sha256:b"})
        with pytest.raises(ArgumentError, match="allow-model-mismatch"):
            report.compare([a, b], k=1)
        assert report.compare([a, b], k=1, allow_model_mismatch=True)["models"][1]["hash"] == "sha256:b"

    def test_feature_mismatch(self):
        a = values_report([1.0, 2.0])
        b = values_report([1.0, 2.0, 3.0])
        with pytest.raises(ArgumentError, match="feature"):
            report.compare([a, b], k=1)

    def test_bad_k(self):
        a = values_report([1.0, 2.0])
        with pytest.raises(ArgumentError):
            report.compare([a, a], k=3)
        with pytest.raises(ArgumentError):
            report.compare([a], k=1)

    def test_ties_average_ranks(self):
        a = values_report([1.0, 1.0, 2.0, 3.0])
        b = values_report([1.0, 2.0, 3.0, 4.0])
        assert 0.9 < report.compare([a, b], k=1)["spearman"][0][1] < 1.0


class TestPlot:
    def test_rows_feature_major(self):
        a = values_report([0.1, 0.2], "empirical")
        b = values_report([0.3, 0.4], "saliency")
        assert report.plot_rows([a, b]) == [
            ("f1", "empirical", 0.1),
            ("f1", "saliency", 0.3),
            ("f2", "empirical", 0.2),
            ("f2", "saliency", 0.4),
        ]

    def test_csv(self):
        text = report.plot_csv([values_report([0.5])])
        assert text == "feature,method,value\nf1,saliency,0.5\n"

    def test_chart(self, tmp_path):
        pytest.importorskip("matplotlib")
        path = tmp_path / "c.png"
        report.render_chart([values_report([0.1, 0.4]), values_report([0.3, 0.2], "empirical")], path)
        assert path.read_bytes()[:4] == b"\x89PNG"
