from pathlib import Path

import numpy as np
import pytest

from posswitch import make_iru, make_ordered

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"

NONH_A2 = [np.array([[2.0, 4.0], [1.0, 2.0]]), np.array([[2.0, 1.0], [4.0, 2.0]])]
RUNNING_ROWS = [[[1.0, 2.0], [2.0, 1.0]], [[1.0, 1.0], [3.0, 0.1]]]


def random_iru(rng, n=3, sizes=(2, 2, 2), low=0.1, high=1.0):
    return make_iru([rng.uniform(low, high, size=(k, n)) for k in sizes])


def random_chain(rng, n=3, length=3, low=0.05, high=1.0):
    base = rng.uniform(low, high, size=(n, n))
    mats = [base]
    for _ in range(length - 1):
        mats.append(mats[-1] + rng.uniform(0.01, 0.5, size=(n, n)))
    return make_ordered(mats)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def running_iru():
    return make_iru(RUNNING_ROWS)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
