from __future__ import annotations

import warnings
from fractions import Fraction

import pytest

from freud_sextic import PrecisionContext, WeightParams, gamma_stieltjes

GRID = [
    (1, 0, 0),
    (1, 0, Fraction(1, 2)),
    (1, 1, Fraction(1, 2)),
    (1, -1, Fraction(3, 2)),
    (Fraction(1, 2), 2, Fraction(1, 4)),
]

ACCEPTANCE_LINES: dict = {}


def make_params(c, t, sigma, digits=120) -> WeightParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return WeightParams(c, t, sigma, PrecisionContext(digits))


@pytest.fixture(scope="session")
def grid_params():
    return [make_params(*pt) for pt in GRID]


@pytest.fixture(scope="session")
def grid_tables(grid_params):
    return [gamma_stieltjes(p, 30) for p in grid_params]


@pytest.fixture(scope="session")
def small():
    """(c=1, t=1, sigma=1/2) at 50 digits with N = 20, for fast unit tests."""
    p = make_params(1, 1, Fraction(1, 2), digits=50)
    return p, gamma_stieltjes(p, 20)


@pytest.fixture(scope="session")
def base50():
    p = make_params(1, 0, 0, digits=50)
    return p, gamma_stieltjes(p, 20)


def record(criterion, passed: bool, detail: str):
    """Criterion lines print in numeric order; float keys slot informational lines in between."""
    flag = "PASS" if passed else "FAIL"
    name = f"criterion {criterion:2d}" if isinstance(criterion, int) else "  (info)    "
    ACCEPTANCE_LINES[float(criterion)] = f"{name}: {flag}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
