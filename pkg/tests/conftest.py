import time

import numpy as np
import pytest

from zetamoments import zeta

_VERDICTS: list[str] = []


def record(label: str, ok: bool, detail: str = "") -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    print(line)
    _VERDICTS.append(line)
    return ok


@pytest.fixture
def verdict():
    return record


FIXTURE_SECONDS: dict[str, float] = {}


@pytest.fixture(scope="session")
def zeros_10k():
    t0 = time.perf_counter()
    zeros = zeta.find_zeros(max_count=10_000)
    FIXTURE_SECONDS["zeros_10k"] = time.perf_counter() - t0
    return zeros


@pytest.fixture(scope="session")
def derivs_10k(zeros_10k):
    """zeta, zeta', zeta'' at the first 10^4 zeros."""
    t0 = time.perf_counter()
    d = zeta.derivative_table(zeros_10k, 2)
    FIXTURE_SECONDS["derivs_10k"] = time.perf_counter() - t0
    return d


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
