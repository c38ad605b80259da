"""Shared models and hypothesis strategies for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from flowjoin.groups import make_group
from flowjoin.model_spaces import EuclideanSpace, MetricTree, TreePoint

settings.register_profile(
    "flowjoin",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("flowjoin")


def tripod() -> MetricTree:
    """Three unit edges at the centre o; leaves a, b, c."""
    return MetricTree([("o", "a", 1), ("o", "b", 1), ("o", "c", 1)], root="o")


def leaf(name: str) -> TreePoint:
    return TreePoint(name, Fraction(0))


CENTER = TreePoint("o", Fraction(0))


@pytest.fixture(scope="session")
def free_group():
    return make_group("free", rank=2)


@pytest.fixture(scope="session")
def lattice():
    return make_group("lattice", dim=2)


@pytest.fixture(scope="session")
def sl2():
    return make_group("sl2", p=2, depth=8)


@pytest.fixture(scope="session")
def plane():
    return EuclideanSpace(2)


def small_fraction(lo: int = -6, hi: int = 6, denominator: int = 8):
    return st.builds(Fraction, st.integers(lo * denominator, hi * denominator), st.just(denominator))


def seeds():
    return st.integers(0, 2**31 - 1)


def tree_point(space, seed: int, radius: int = 4):
    return space.random_point(random.Random(seed), radius)


ACCEPTANCE_LINES: list = []


def acceptance_line(name: str, ok: bool, detail: str) -> None:
    """Record and print the one-line outcome of an acceptance criterion."""
    line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda text: int(text.split()[0][2:])):
            terminalreporter.write_line(line)
