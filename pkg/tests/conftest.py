import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fsnkit import fixtures
from fsnkit.graph import LeaderProfile, random_strongly_connected

# Perron vectors printed for G7 (4 decimals)
G7_V_CLFN = (0.3242, 0.3741, 0.3829, 0.4419, 0.2861, 0.4372, 0.3741)
G7_V_DLFN = (0.3305, 0.3675, 0.3923, 0.4363, 0.2956, 0.4348, 0.3675)
G7_V_LEADER_1 = (0.3005, 0.3314, 0.3976, 0.4385, 0.4203, 0.4038, 0.3314)
G7_V_LEADER_6 = (0.3836, 0.4256, 0.3625, 0.4021, 0.3407, 0.2853, 0.4256)
G7_V_LEADERS_27 = (0.4004, 0.2247, 0.3825, 0.4890, 0.4393, 0.4004, 0.2247)
# kept arrows (src, dst) of the G7 FSN with leaders {1, 5}
G7_FSN_ARROWS = {(1, 2), (1, 7), (3, 4), (5, 3), (2, 3), (7, 6)}


def random_instance(seed, n_min=2, n_max=12, max_leaders=None, p=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.05, 0.5)) if p is None else p
    net = random_strongly_connected(n, p, seed)
    top = n if max_leaders is None else min(n, max_leaders)
    k = int(rng.integers(1, top + 1))
    leaders = rng.choice(np.arange(1, n + 1), size=k, replace=False)
    return net, LeaderProfile.from_leaders(n, [int(i) for i in leaders], 0.1)


@pytest.fixture
def g7():
    return fixtures.g7()


@pytest.fixture
def g7_loops():
    return fixtures.g7().with_self_loops()


@pytest.fixture
def leaders15():
    return fixtures.g7_leaders()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
