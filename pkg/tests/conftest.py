from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from levelblend.corpus import GameId, ingest_paths

FIXTURES = Path(__file__).parent / "fixtures"
VGLC_FIXTURES = FIXTURES / "vglc"
GOLDEN = FIXTURES / "golden"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Acceptance-criterion results, echoed in the terminal summary.
CRITERIA: list[tuple[str, str, str]] = []


def record(criterion: str, passed: bool | None, detail: str) -> None:
    status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
    CRITERIA.append((criterion, status, detail))
    print(f"{criterion}: {status} {detail}")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for criterion, status, detail in CRITERIA:
            terminalreporter.write_line(f"{criterion}: {status} {detail}")


@pytest.fixture(scope="session")
def fixture_corpora():
    return {g: ingest_paths([VGLC_FIXTURES / g.value], g) for g in GameId}


@pytest.fixture(scope="session")
def zelda_corpus(fixture_corpora):
    return fixture_corpora[GameId.ZELDA]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def full_corpus_root() -> Path | None:
    """Directory of real VGLC data (``<root>/<game>/*.txt``), if supplied."""
    root = os.environ.get("LEVELBLEND_VGLC")
    return Path(root) if root else None
