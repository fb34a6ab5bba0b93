import os
from functools import lru_cache

import numpy as np
import pytest

from mixid.clic import clic
from mixid.simulate import simulate_confounded, simulate_direct_link

_CRITERIA = []


@lru_cache(maxsize=None)
def confounded(d, m, seed):
    return simulate_confounded(d, m, seed)


@lru_cache(maxsize=None)
def direct_link(states, seed):
    return simulate_direct_link(states, seed)


@lru_cache(maxsize=None)
def clic_confounded(d, m, seed):
    """CLIC on ``confounded(d, m, seed)`` with the true m and the same seed."""
    return clic(confounded(d, m, seed).data, m, seed=seed)


@lru_cache(maxsize=None)
def clic_direct_link(states, m, seed):
    return clic(direct_link(states, seed).data, m, seed=seed)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, passed, detail)``; ``None`` means skipped."""

    def record(number, passed, detail):
        _CRITERIA.append((number, None if passed is None else bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        tag = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"[{tag}] criterion {number}: {detail}")


# column positions of the "mean" features in the raw wdbc.data file
# (id, diagnosis, then radius, texture, perimeter, area, smoothness, compactness, ...)
WDBC_COLUMNS = {"texture": 3, "perimeter": 4, "area": 5, "compactness": 7}


def breast_features(*names):
    """Selected wdbc columns from ``$MIXID_BREAST_CSV``, or skip the test."""
    path = os.environ.get("MIXID_BREAST_CSV")
    if not path:
        pytest.skip("MIXID_BREAST_CSV not set")
    raw = np.genfromtxt(path, delimiter=",", dtype=str)
    return raw[:, [WDBC_COLUMNS[n] for n in names]].astype(float)
