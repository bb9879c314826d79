"""Classifiers over {0,1}^n viewed as simple coalitional games.

A coalition is an ``int`` bitmask: bit ``j`` set means feature ``j`` is
present (equivalently, ``x_j = 1``). Every game exposes ``evaluate(mask)``
for a single coalition and ``evaluate_batch(masks)`` for a ``uint64`` array
of coalitions; the batch path is what the exhaustive engine and the samplers
use.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

import numpy as np

from banzhaf.errors import ArgumentError, PrecisionError

MAX_FEATURES = 63

DIRECT = "direct"
COMPLEMENTED = "complemented"

_INT64_SAFE = 2**62


def check_n_features(n: int) -> None:
    if not 1 <= n <= MAX_FEATURES:
        raise ArgumentError(f"feature count must be in [1, {MAX_FEATURES}], got {n}")


def check_mask(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ArgumentError(f"coalition {mask:#x} has bits outside the {n} features")


def check_feature(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise ArgumentError(f"feature index {i} out of range [0, {n})")


def mask_from_bits(bits: Sequence[int]) -> int:
    mask = 0
    for j, b in enumerate(bits):
        if b:
            mask |= 1 << j
    return mask


def bits_from_mask(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> j) & 1 for j in range(n)], dtype=np.uint8)


def masks_to_matrix(masks: np.ndarray, n: int) -> np.ndarray:
    """Expand a ``uint64`` mask array into a ``(len(masks), n)`` 0/1 matrix."""
    masks = np.asarray(masks, dtype=np.uint64)
    shifts = np.arange(n, dtype=np.uint64)
    return ((masks[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)


def matrix_to_masks(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    shifts = np.arange(x.shape[1], dtype=np.uint64)
    return np.bitwise_or.reduce(x << shifts, axis=1) if x.shape[1] else np.zeros(len(x), np.uint64)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Game(ABC):
    """A simple coalitional game ``F: 2^A -> {0, 1}``.

    Implementations are immutable after construction, so ``evaluate`` may be
    called from many threads at once.
    """

    kind: str = "game"
    n_features: int

    @abstractmethod
    def evaluate(self, mask: int) -> int:
        ...

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        return np.fromiter((self.evaluate(int(m)) for m in masks), dtype=np.uint8, count=len(masks))


class TruthTableGame(Game):
    """Game given by its full outcome table, packed 8 coalitions per byte.

    Byte ``m >> 3`` bit ``m & 7`` holds ``F(m)`` (little-endian bit order).
    """

    kind = "truth_table"

    def __init__(self, n: int, packed: np.ndarray):
        check_n_features(n)
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        nbytes = max(1, (1 << n) // 8)
        if packed.shape != (nbytes,):
            raise ArgumentError(f"truth table for n={n} needs {nbytes} bytes, got {packed.size}")
        if n < 3 and packed[0] >> (1 << n):
            raise ArgumentError("truth table has bits set beyond coalition 2^n - 1")
        self.n_features = n
        self.packed = _readonly(packed.copy())

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[int] | np.ndarray) -> TruthTableGame:
        outcomes = np.asarray(outcomes, dtype=np.uint8)
        size = outcomes.size
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise ArgumentError(f"outcome table length must be a power of two >= 2, got {size}")
        if np.any(outcomes > 1):
            raise ArgumentError("outcomes must be 0 or 1")
        return cls(n, np.packbits(outcomes, bitorder="little"))

    @classmethod
    def from_function(cls, n: int, fn) -> TruthTableGame:
        return cls.from_outcomes([fn(m) for m in range(1 << n)])

    @classmethod
    def from_hex(cls, n: int, text: str) -> TruthTableGame:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise ArgumentError(f"truth table bits are not valid hex: {exc}") from None
        return cls(n, np.frombuffer(raw, dtype=np.uint8))

    def to_hex(self) -> str:
        return self.packed.tobytes().hex()

    def outcomes(self) -> np.ndarray:
        return np.unpackbits(self.packed, bitorder="little", count=1 << self.n_features)

    def evaluate(self, mask: int) -> int:
        check_mask(mask, self.n_features)
        return int(self.packed[mask >> 3] >> (mask & 7)) & 1

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        return ((self.packed[masks >> np.uint64(3)] >> (masks & np.uint64(7)).astype(np.uint8)) & 1).astype(
            np.uint8
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruthTableGame)
            and other.n_features == self.n_features
            and np.array_equal(other.packed, self.packed)
        )

    def __repr__(self) -> str:
        return f"TruthTableGame(n={self.n_features})"


def _weights_matrix_dtype(weights: Sequence[int]) -> type | str:
    total = sum(abs(w) for w in weights)
    return np.int64 if total < _INT64_SAFE else object


class WeightedVotingGame(Game):
    """``F(S) = 1`` iff the summed weight of ``S`` reaches ``quota``."""

    kind = "voting"

    def __init__(self, weights: Sequence[int], quota: int):
        weights = tuple(int(w) for w in weights)
        check_n_features(len(weights))
        if any(w < 0 for w in weights):
            raise ArgumentError("voting weights must be non-negative integers")
        if int(quota) != quota or quota < 1:
            raise ArgumentError(f"quota must be a positive integer, got {quota}")
        self.weights = weights
        self.quota = int(quota)
        self.n_features = len(weights)
        self._w = np.array(weights, dtype=_weights_matrix_dtype(weights))

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def evaluate(self, mask: int) -> int:
        check_mask(mask, self.n_features)
        s = sum(w for j, w in enumerate(self.weights) if mask >> j & 1)
        return int(s >= self.quota)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        x = masks_to_matrix(masks, self.n_features).astype(self._w.dtype)
        return (x @ self._w >= self.quota).astype(np.uint8)

    def __repr__(self) -> str:
        return f"WeightedVotingGame(weights={list(self.weights)}, quota={self.quota})"


def _to_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        d = value
    elif isinstance(value, (float, np.floating)):
        d = Decimal(repr(float(value)))
    else:
        try:
            d = Decimal(str(value))
        except Exception:
            raise ArgumentError(f"not a decimal number: {value!r}") from None
    if not d.is_finite():
        raise ArgumentError(f"weights must be finite, got {value!r}")
    return d


class LinearThresholdGame(Game):
    """``F(x) = 1`` iff ``w . x + bias >= 0``.

    Weights are kept as :class:`~decimal.Decimal` so that integrality checks and
    the tie ``score == 0`` are exact. ``label`` is ``"linear"`` or ``"logreg"``
    and only affects how reports name the model class.
    """

    kind = "linear"

    def __init__(self, weights: Sequence, bias, label: str = "linear"):
        self.weights = tuple(_to_decimal(w) for w in weights)
        self.bias = _to_decimal(bias)
        check_n_features(len(self.weights))
        if label not in ("linear", "logreg"):
            raise ArgumentError(f"unknown linear model label {label!r}")
        self.label = label
        self.n_features = len(self.weights)
        # Common decimal scale turns the model into exact integers.
        exp = min(d.as_tuple().exponent for d in (*self.weights, self.bias))
        self._scale = 10 ** max(0, -int(exp))
        self._int_w = [int(w * self._scale) for w in self.weights]
        self._int_b = int(self.bias * self._scale)
        if sum(abs(w) for w in self._int_w) + abs(self._int_b) < _INT64_SAFE:
            self._batch_w = np.array(self._int_w, dtype=np.int64)
            self._batch_b = self._int_b
        else:
            self._batch_w = np.array([float(w) for w in self.weights])
            self._batch_b = float(self.bias)

    @property
    def float_weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def score(self, mask: int) -> Decimal:
        check_mask(mask, self.n_features)
        return sum((w for j, w in enumerate(self.weights) if mask >> j & 1), Decimal(0)) + self.bias

    def evaluate(self, mask: int) -> int:
        check_mask(mask, self.n_features)
        s = sum(w for j, w in enumerate(self._int_w) if mask >> j & 1) + self._int_b
        return int(s >= 0)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        x = masks_to_matrix(masks, self.n_features).astype(self._batch_w.dtype)
        return (x @ self._batch_w + self._batch_b >= 0).astype(np.uint8)

    def __repr__(self) -> str:
        return f"LinearThresholdGame(n={self.n_features}, label={self.label!r})"


class MlpGame(Game):
    """Single hidden layer ReLU network thresholded at zero.

    ``f(x) = w2 . relu(w1 x + b1) + b2`` and ``F(x) = 1`` iff ``f(x) >= 0``.
    """

    kind = "mlp"

    def __init__(self, w1, b1, w2, b2):
        w1 = np.array(w1, dtype=np.float64, ndmin=2)
        b1 = np.array(b1, dtype=np.float64).reshape(-1)
        w2 = np.array(w2, dtype=np.float64).reshape(-1)
        h, n = w1.shape
        if h < 1:
            raise ArgumentError("hidden width must be at least 1")
        if b1.shape != (h,) or w2.shape != (h,):
            raise ArgumentError(f"inconsistent MLP shapes: w1 {w1.shape}, b1 {b1.shape}, w2 {w2.shape}")
        check_n_features(n)
        if not (np.all(np.isfinite(w1)) and np.all(np.isfinite(b1)) and np.all(np.isfinite(w2))):
            raise ArgumentError("MLP parameters must be finite")
        self.w1 = _readonly(w1)
        self.b1 = _readonly(b1)
        self.w2 = _readonly(w2)
        self.b2 = float(b2)
        self.hidden = h
        self.n_features = n

    def scores(self, x: np.ndarray) -> np.ndarray:
        """Scores for a ``(rows, n)`` real matrix."""
        pre = np.asarray(x, dtype=np.float64) @ self.w1.T + self.b1
        return np.maximum(pre, 0.0) @ self.w2 + self.b2

    def evaluate(self, mask: int) -> int:
        check_mask(mask, self.n_features)
        x = masks_to_matrix(np.array([mask], dtype=np.uint64), self.n_features)
        return int(self.scores(x)[0] >= 0.0)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        x = masks_to_matrix(masks, self.n_features)
        return (self.scores(x) >= 0.0).astype(np.uint8)

    def __repr__(self) -> str:
        return f"MlpGame(n={self.n_features}, hidden={self.hidden})"


def marginal_contribution(game: Game, i: int, s: int) -> int:
    """``F(s | {i}) - F(s)``; zero whenever ``i`` is already in ``s``."""
    n = game.n_features
    check_feature(i, n)
    check_mask(s, n)
    bit = 1 << i
    if s & bit:
        return 0
    return game.evaluate(s | bit) - game.evaluate(s)


def is_critical(game: Game, i: int, s: int) -> bool:
    return abs(marginal_contribution(game, i, s)) == 1


@dataclass(frozen=True)
class VotingConversion:
    """Result of :func:`linear_to_voting`.

    ``game`` is ``None`` exactly when ``constant_win`` is set: the shifted
    quota is non-positive, every coalition wins and every feature is dummy.
    """

    game: WeightedVotingGame | None
    polarity: tuple[str, ...]
    constant_win: bool = False
    weights: tuple[int, ...] = ()
    quota: int = 0

    @property
    def complement_mask(self) -> int:
        return mask_from_bits([p == COMPLEMENTED for p in self.polarity])

    def map_coalition(self, mask: int) -> int:
        """Translate an original coalition into the voting game's coalition."""
        return mask ^ self.complement_mask

    def evaluate_original(self, mask: int) -> int:
        if self.constant_win:
            return 1
        return self.game.evaluate(self.map_coalition(mask))


def linear_to_voting(model: LinearThresholdGame, scale: int) -> VotingConversion:
    """Exact conversion of a linear threshold model into a weighted voting game.

    Each weight and the bias are multiplied by ``scale`` and must land on an
    integer exactly; negative weights are handled by complementing that
    feature. Swing counts are preserved feature by feature.
    """
    if int(scale) != scale or scale < 1:
        raise ArgumentError(f"scale must be a positive integer, got {scale}")
    scale = int(scale)

    def integral(value: Decimal, what: str) -> int:
        scaled = value * scale
        if scaled != scaled.to_integral_value():
            raise PrecisionError(f"{what} = {value} times scale {scale} is {scaled}, not an integer")
        return int(scaled)

    ints = [integral(w, f"weight[{j}]") for j, w in enumerate(model.weights)]
    bias = integral(model.bias, "bias")
    weights = []
    polarity = []
    for w in ints:
        if w < 0:
            # x -> 1 - x turns w*x into -w*(1-x) + w.
            weights.append(-w)
            bias += w
            polarity.append(COMPLEMENTED)
        else:
            weights.append(w)
            polarity.append(DIRECT)
    quota = -bias
    if quota <= 0:
        return VotingConversion(None, tuple(polarity), True, tuple(weights), quota)
    return VotingConversion(WeightedVotingGame(weights, quota), tuple(polarity), False, tuple(weights), quota)
