"""Shared fixtures: the worked 2x2 instance and seeded random corpora."""

from __future__ import annotations

import numpy as np
import pytest

from lexmatch import build_instance, random_instance

# One pass/fail line per acceptance criterion, printed after the run.
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def two_by_two():
    """Two students, two schools, one seat each; utilities ranked
    u[0][0] > u[0][1] > u[1][0] > u[1][1].  The greedy solver should give
    student 0 school 0; the egalitarian one should swap."""
    return build_instance(2, 2, [1, 1], [[4.0, 3.0], [2.0, 1.0]])


def make_corpus(count: int, max_students: int, max_schools: int, master_seed: int):
    """Deterministic list of strict random instances with random shapes and
    capacities (both scarce and surplus regimes occur)."""
    shape_rng = np.random.default_rng(master_seed)
    corpus = []
    for k in range(count):
        n = int(shape_rng.integers(1, max_students + 1))
        m = int(shape_rng.integers(1, min(n, max_schools) + 1))
        corpus.append(random_instance(n, m, master_seed * 1_000_000 + k))
    return corpus


@pytest.fixture(scope="session")
def medium_corpus():
    """500 instances, up to 50 students and 8 schools."""
    return make_corpus(500, 50, 8, master_seed=2024)


@pytest.fixture(scope="session")
def small_corpus():
    """200 instances small enough for full enumeration (up to 7 students)."""
    return make_corpus(200, 7, 7, master_seed=515)
