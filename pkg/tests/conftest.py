import itertools
from fractions import Fraction

import numpy as np
import pytest

from ldl.model import ObservedEfficiencies, PostselectedCorrelation, Scenario

CHSH = Scenario.binary()


def exact_table(shape, fill=0):
    t = np.empty(shape, dtype=object)
    t.ravel()[:] = [Fraction(fill)] * t.size
    return t


def pr_box() -> PostselectedCorrelation:
    t = exact_table((2, 2, 2, 2))
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if (a ^ b) == (x & y):
            t[x, y, a, b] = Fraction(1, 2)
    return PostselectedCorrelation(CHSH, t)


def deterministic_point(a0, a1, b0, b1) -> PostselectedCorrelation:
    """Local deterministic strategy, written out directly (independent of vertex code)."""
    t = exact_table((2, 2, 2, 2))
    alice, bob = (a0, a1), (b0, b1)
    for x, y in itertools.product(range(2), repeat=2):
        t[x, y, alice[x], bob[y]] = Fraction(1)
    return PostselectedCorrelation(CHSH, t)


def all_deterministic_points():
    return [deterministic_point(*s) for s in itertools.product(range(2), repeat=4)]


def ideal_hardy(q=Fraction(1, 10)) -> PostselectedCorrelation:
    """Hand-built table with the Hardy zeros and P(00|00) = q; other entries spread evenly."""
    t = exact_table((2, 2, 2, 2))
    zeros = {(0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 0, 0)}
    for x, y in itertools.product(range(2), repeat=2):
        cells = [(a, b) for a, b in itertools.product(range(2), repeat=2) if (x, y, a, b) not in zeros]
        if (x, y) == (0, 0):
            t[0, 0, 0, 0] = q
            rest = [c for c in cells if c != (0, 0)]
            for a, b in rest:
                t[0, 0, a, b] = (1 - q) / len(rest)
        else:
            for a, b in cells:
                t[x, y, a, b] = Fraction(1, len(cells))
    return PostselectedCorrelation(CHSH, t)


def unit_effs(scenario=CHSH, eta=1):
    return ObservedEfficiencies.uniform(scenario, Fraction(eta))


@pytest.fixture
def chsh():
    return CHSH


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        name = report.nodeid.split("::test_criterion_")[1]
        _CRITERIA[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[0])):
        outcome, dur = _CRITERIA[name]
        num, _, label = name.partition("_")
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict}  {label.replace('_', ' ')}  ({dur:.2f}s)")
