"""Shared fixtures: session-scoped games, random profiles, verdict summary."""
from __future__ import annotations

import numpy as np
import pytest

from regret_forge.exploitability import StrategyProfile
from regret_forge.poker import build_kuhn, build_leduc, build_royal
from regret_forge.tree import compile_game

#: one line per acceptance check, echoed in the terminal summary so the
#: verdicts stay visible even when every test passes under capture
VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def kuhn():
    return build_kuhn()


@pytest.fixture(scope="session")
def leduc():
    return build_leduc()


@pytest.fixture(scope="session")
def royal():
    return build_royal()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260814)


def random_profile(game, rng: np.random.Generator) -> StrategyProfile:
    """A fully mixed random strategy profile covering every information set."""
    cg = compile_game(game)
    table = {}
    for i, key in enumerate(cg.infoset_keys):
        n = int(cg.infoset_n_actions[i])
        row = rng.random(n) + 1e-3
        table[key] = row / row.sum()
    return StrategyProfile(table)
