import random
from fractions import Fraction

import pytest

from noregret import FairnessSpec, ItemRecord, ObjectiveSpec, Population, Schema, ThetaDomain, students


# Score table of the admissions example: U_theta = theta*IQ/10 + (1-theta)*grade
SCORE_TABLE = {
    "1/2": {"A": 10, "B": 11, "E": 10, "I": 10, "M": 8, "Z": 11},
    "0.35": {"A": 10, "B": "9.8", "E": "8.5", "I": "9.7", "M": "8.3", "Z": "10.1"},
    "0.2": {"A": 10, "B": "8.6", "E": "7.0", "I": "9.4", "M": "8.6", "Z": "9.2"},
}


@pytest.fixture
def pop():
    return students()


@pytest.fixture
def obj(pop):
    return ObjectiveSpec.mixture(pop.schema, "IQ", "grade")


@pytest.fixture
def mismatch():
    return FairnessSpec.mismatch("m", "f")


@pytest.fixture
def quota30():
    return FairnessSpec(labels=("m", "f"), quota_label="f", quota="0.3")


@pytest.fixture
def narrow():
    return ThetaDomain.interval(Fraction(1, 3), Fraction(2, 3))


def ids(selections):
    """Set of id-sets, for order-free comparison."""
    return {frozenset(s.ids) for s in selections}


def random_population(rng: random.Random, n=None, m=2, denominators=(1, 2, 3, 5)):
    n = n if n is not None else rng.randint(2, 10)
    names = [f"a{j}" for j in range(m)]
    items = []
    for i in range(n):
        attrs = tuple((a, Fraction(rng.randint(0, 20), rng.choice(denominators))) for a in names)
        group = "mf"[i] if i < 2 else rng.choice("mf")
        items.append(ItemRecord(f"x{i:02d}", attrs, group))
    divisors = {a: rng.choice([1, 2, 10]) for a in names}
    return Population(tuple(items), Schema(tuple(names), divisors))


def random_theta(rng: random.Random):
    return Fraction(rng.randint(0, 24), 24) if rng.random() < 0.5 else Fraction(rng.randint(1, 999), 1000)


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.outcome != "passed" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
