"""Shared fixtures.

The heavy relaxation runs used by the acceptance gate live as
module-scoped fixtures inside tests/test_acceptance.py so that the unit
test files stay cheap to run on their own; here only the small shared
objects are defined.
"""
import pytest

from frsne import ConvergenceCriterion, InitialCondition, PhysicsParams, make_grid
from frsne.evolution import config_for
from frsne.relaxation import relax


@pytest.fixture(scope="session")
def params():
    """Natural units, purely dissipative coupling (alpha = pi/2)."""
    return PhysicsParams()


@pytest.fixture(scope="session")
def coarse_grid():
    return make_grid(500, 40.0)


@pytest.fixture(scope="session")
def coarse_run(params, coarse_grid):
    """Converged soliton on a cheap 500-point grid (a few seconds).

    Accurate to a few 1e-4 relative; unit tests use it wherever a
    genuinely stationary complex profile is needed.
    """
    cfg = config_for(coarse_grid, params)
    crit = ConvergenceCriterion()
    psi, report, records = relax(InitialCondition.gaussian(1.0), coarse_grid,
                                 params, cfg, crit)
    assert report.converged
    return psi, report, records


@pytest.fixture(scope="session")
def soliton(coarse_run):
    return coarse_run[0]
