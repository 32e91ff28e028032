from __future__ import annotations

from pathlib import Path

import pytest

from bbhighlights.gamelog import load_game_log
from bbhighlights.llm import LLMRequestConfig, MockBackend
from bbhighlights.sabermetrics import build_we_table, load_table
from bbhighlights.synthetic import generate_corpus

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


@pytest.fixture(scope="session")
def corpus20():
    return generate_corpus(20, seed=1)


@pytest.fixture(scope="session")
def table20(corpus20):
    return build_we_table(corpus20)


@pytest.fixture(scope="session")
def golden_table():
    return load_table(GOLDEN / "we_table.json")


@pytest.fixture(scope="session")
def ten_play():
    return load_game_log(DATA / "ten_play.jsonl")


@pytest.fixture
def mock():
    return MockBackend()


@pytest.fixture
def llm_config():
    return LLMRequestConfig()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
