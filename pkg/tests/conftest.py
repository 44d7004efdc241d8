import numpy as np
import pytest
from hypothesis import settings

from dslab.grid import GridSpec
from dslab.spinor import catalog_solution

settings.register_profile("dslab", max_examples=25, deadline=None, derandomize=True)
settings.load_profile("dslab")


@pytest.fixture
def g32():
    return GridSpec(32, 32)


@pytest.fixture
def g64():
    return GridSpec(64, 64)


@pytest.fixture
def wave64(g64):
    return catalog_solution("wave", g64, c=np.sqrt(2), k=1 + 1j, m=1 - 1j)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
