import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from banzhaf.dataio import default_data_dir, fetch_spect, load_spect, spect_available  # noqa: E402
from banzhaf.game import TruthTableGame, WeightedVotingGame  # noqa: E402


@pytest.fixture
def wvg211():
    return WeightedVotingGame([2, 1, 1], 3)


@pytest.fixture
def dictator3():
    return WeightedVotingGame([1, 0, 0], 1)


def random_table(rng, n):
    return TruthTableGame.from_outcomes(rng.integers(0, 2, size=1 << n))


@pytest.fixture(scope="session")
def spect_dir():
    path = default_data_dir()
    if not spect_available(path):
        try:
            fetch_spect(path, log=lambda m: None)
        except Exception as exc:  # pragma: no cover - network dependent
            if os.environ.get("BANZHAF_REQUIRE_SPECT"):
                raise
            pytest.skip(f"SPECT unavailable: {exc}")
    return path


@pytest.fixture(scope="session")
def spect(spect_dir):
    return load_spect(spect_dir)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
