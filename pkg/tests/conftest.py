from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import strategies as st

from sensorconflict import EvidenceFrame

WORKED_INTERVALS = [(0, 10), (2, 8), (3, 7), (4, 6)]

# Frozen from brute_force_conflict below (exact rationals).
WORKED_LATTICE = {
    (1, 2): Fraction(1, 5),
    (1, 3): Fraction(3, 10),
    (1, 4): Fraction(2, 5),
    (2, 3): Fraction(1, 6),
    (2, 4): Fraction(1, 3),
    (3, 4): Fraction(1, 4),
    (1, 2, 3): Fraction(1, 3),
    (1, 2, 4): Fraction(2, 5),
    (1, 3, 4): Fraction(7, 15),
    (2, 3, 4): Fraction(1, 3),
    (1, 2, 3, 4): Fraction(9, 20),
}


def brute_force_conflict(intervals, members):
    """Exact-rational evaluation over the distinct endpoints of the subset.

    Deliberately shares nothing with the library: distinct (not multiset)
    endpoints, Fraction arithmetic, explicit midpoint coverage loop.
    """
    members = tuple(members)
    if len(members) < 2:
        return Fraction(0)
    ivs = [(Fraction(intervals[m - 1][0]), Fraction(intervals[m - 1][1])) for m in members]
    points = sorted({p for iv in ivs for p in iv})
    if len(points) == 1:
        return Fraction(0)
    total = Fraction(0)
    for a, b in zip(points, points[1:]):
        mid = (a + b) / 2
        covered = sum(1 for lo, hi in ivs if lo <= mid <= hi)
        total += (b - a) * (1 - Fraction(covered, len(members)))
    return total / (points[-1] - points[0])


def brute_force_lattice(intervals):
    n = len(intervals)
    return {
        s: brute_force_conflict(intervals, s)
        for k in range(1, n + 1)
        for s in combinations(range(1, n + 1), k)
    }


@pytest.fixture
def worked_frame():
    return EvidenceFrame.from_intervals(WORKED_INTERVALS)


@st.composite
def interval_lists(draw, min_size=1, max_size=5, lo=-1000, hi=1000, integer=False):
    n = draw(st.integers(min_size, max_size))
    if integer:
        pt = st.integers(lo, hi)
    else:
        pt = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    out = []
    for _ in range(n):
        a, b = draw(pt), draw(pt)
        out.append((min(a, b), max(a, b)))
    return out


def random_frame(rng, n):
    centers = rng.uniform(-10, 10, n)
    widths = rng.exponential(3.0, n)
    return EvidenceFrame.from_intervals(
        [(c - w / 2, c + w / 2) for c, w in zip(centers, widths)]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    key = marker.args
    ok = _acceptance.get(key, True) and report.passed
    if report.when == "setup" and report.passed:
        ok = _acceptance.get(key, True)
    _acceptance[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_acceptance.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}")
