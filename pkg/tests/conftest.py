import functools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geosphere.geodesic import build_icosphere  # noqa: E402


@functools.lru_cache(maxsize=None)
def sphere(order):
    return build_icosphere(order)


@pytest.fixture(scope="session")
def spheres():
    return sphere


@pytest.fixture
def rng():
    return np.random.default_rng(20190601)


def random_unit(rng, n):
    p = rng.normal(size=(n, 3))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
