"""Banzhaf power indices as feature importance for binary classifiers."""

from banzhaf.errors import (
    ArgumentError,
    BanzhafError,
    CapacityError,
    DataParseError,
    ModelParseError,
    PrecisionError,
    TrainingError,
)
from banzhaf.game import (
    Game,
    LinearThresholdGame,
    MlpGame,
    TruthTableGame,
    WeightedVotingGame,
    is_critical,
    linear_to_voting,
    marginal_contribution,
)
from banzhaf.exact import ExactResult, build_truth_table, exact_banzhaf, find_dummies
from banzhaf.voting import gf_banzhaf, weight_distribution
from banzhaf.sampling import (
    EstimateResult,
    ProductDistribution,
    empirical_banzhaf,
    monte_carlo_banzhaf,
    required_samples,
    weighted_banzhaf,
)
from banzhaf.pruning import PruneCertificate, PrunedGame, prune_dummies, verify_lossless

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BanzhafError",
    "CapacityError",
    "DataParseError",
    "EstimateResult",
    "ExactResult",
    "Game",
    "LinearThresholdGame",
    "MlpGame",
    "ModelParseError",
    "PrecisionError",
    "ProductDistribution",
    "PruneCertificate",
    "PrunedGame",
    "TrainingError",
    "TruthTableGame",
    "WeightedVotingGame",
    "build_truth_table",
    "empirical_banzhaf",
    "exact_banzhaf",
    "find_dummies",
    "gf_banzhaf",
    "is_critical",
    "linear_to_voting",
    "marginal_contribution",
    "monte_carlo_banzhaf",
    "prune_dummies",
    "required_samples",
    "verify_lossless",
    "weight_distribution",
    "weighted_banzhaf",
]
