import numpy as np
import pytest

from weighted_multipliers.fields import SampledField, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(grid, rng, real=False):
    """Complex Gaussian samples on ``grid``."""
    v = rng.standard_normal(grid.shape)
    if not real:
        v = v + 1j * rng.standard_normal(grid.shape)
    return SampledField(grid, v)


def random_weight(grid, rng):
    return SampledField(grid, rng.lognormal(0.0, 1.0, grid.shape), "weight")


@pytest.fixture
def grid1d():
    return make_grid(256, 16.0)


@pytest.fixture
def grid2d():
    return make_grid(32, 8.0, dim=2)


# acceptance results, filled by test_acceptance and printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
