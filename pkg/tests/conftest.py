import os
import sys

import pytest

from prunedmcts.exact import solve
from prunedmcts.games import MiniGo, RandomRewardGame, TicTacToe

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def ttt():
    return TicTacToe()


@pytest.fixture(scope="session")
def ttt_solution(ttt):
    return solve(ttt, gamma=0.99)


@pytest.fixture(scope="session")
def rrg():
    return RandomRewardGame(branching=3, depth=3, r_max=1.0, seed=0)


@pytest.fixture(scope="session")
def rrg_solution(rrg):
    return solve(rrg, gamma=0.9)


@pytest.fixture(scope="session")
def go3():
    return MiniGo(3, "simple", 12)


@pytest.fixture(scope="session")
def go3_solution(go3):
    # about 15 s and 0.6 GB; shared by the bound tests
    return solve(go3, gamma=0.99)


@pytest.fixture(scope="session")
def fake_uci():
    return [sys.executable, os.path.join(FIXTURES, "fake_uci.py")]


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
