"""JSON model files.

Every model file is an object with a ``"type"`` tag. Real-valued parameters
are written as decimal strings so that reading a file back never introduces
binary rounding.
"""

from __future__ import annotations

import hashlib
import json
from decimal import Decimal
from pathlib import Path
from typing import Any

import numpy as np

from banzhaf.errors import ArgumentError, ModelParseError
from banzhaf.game import Game, LinearThresholdGame, MlpGame, TruthTableGame, WeightedVotingGame

MODEL_TYPES = ("truth_table", "voting", "linear", "mlp", "logreg")


def _dec(x) -> str:
    if isinstance(x, Decimal):
        return str(x)
    return repr(float(x))


def model_to_dict(game: Game) -> dict[str, Any]:
    if isinstance(game, TruthTableGame):
        return {"type": "truth_table", "n": game.n_features, "bits": game.to_hex()}
    if isinstance(game, WeightedVotingGame):
        return {"type": "voting", "weights": list(game.weights), "quota": game.quota}
    if isinstance(game, LinearThresholdGame):
        return {"type": game.label, "weights": [_dec(w) for w in game.weights], "bias": _dec(game.bias)}
    if isinstance(game, MlpGame):
        return {
            "type": "mlp",
            "w1": [[_dec(v) for v in row] for row in game.w1],
            "b1": [_dec(v) for v in game.b1],
            "w2": [_dec(v) for v in game.w2],
            "b2": _dec(game.b2),
        }
    raise ArgumentError(f"cannot serialize {type(game).__name__}")


def _floats(values, what: str) -> np.ndarray:
    try:
        return np.array([float(Decimal(str(v))) for v in values], dtype=np.float64)
    except Exception:
        raise ModelParseError(f"{what}: expected a list of decimal strings") from None


def model_from_dict(doc: dict[str, Any]) -> Game:
    if not isinstance(doc, dict) or "type" not in doc:
        raise ModelParseError('model file must be a JSON object with a "type" field')
    kind = doc["type"]
    try:
        if kind == "truth_table":
            return TruthTableGame.from_hex(int(doc["n"]), doc["bits"])
        if kind == "voting":
            weights = doc["weights"]
            if any(not isinstance(w, int) or isinstance(w, bool) for w in weights):
                raise ModelParseError("voting weights must be JSON integers")
            return WeightedVotingGame(weights, doc["quota"])
        if kind in ("linear", "logreg"):
            return LinearThresholdGame(doc["weights"], doc["bias"], label=kind)
        if kind == "mlp":
            w1 = np.array([_floats(row, "w1") for row in doc["w1"]])
            return MlpGame(w1, _floats(doc["b1"], "b1"), _floats(doc["w2"], "w2"), float(Decimal(str(doc["b2"]))))
    except KeyError as exc:
        raise ModelParseError(f"{kind} model is missing field {exc}") from None
    except ArgumentError as exc:
        raise ModelParseError(f"invalid {kind} model: {exc}") from None
    raise ModelParseError(f"unknown model type {kind!r} (expected one of {', '.join(MODEL_TYPES)})")


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def model_hash(game_or_doc: Game | dict) -> str:
    doc = game_or_doc if isinstance(game_or_doc, dict) else model_to_dict(game_or_doc)
    return "sha256:" + hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def load_model(path: str | Path) -> Game:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc)


def save_model(game: Game, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(game), indent=2) + "\n", encoding="utf-8")
