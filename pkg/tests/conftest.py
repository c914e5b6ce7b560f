import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rkkse.operator import KseProblem  # noqa: E402
from rkkse.solver import solve  # noqa: E402


@pytest.fixture(scope="session")
def paper_problem():
    return KseProblem.paper_config(alpha=0.5)


_SOLVE_CACHE = {}


@pytest.fixture(scope="session")
def solved():
    """Memoized paper-configuration solves shared across test modules."""

    def get(alpha=0.5, n=8, scheme="diagonal-grid", sweeps=12):
        key = (alpha, n, scheme, sweeps)
        if key not in _SOLVE_CACHE:
            problem = KseProblem.paper_config(alpha=alpha)
            _SOLVE_CACHE[key] = solve(problem, n, scheme=scheme, sweeps=sweeps)
        return _SOLVE_CACHE[key]

    return get
