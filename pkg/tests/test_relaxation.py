"""Relaxation driver: initial states, stopping rule, reports, covariance."""
import math

import numpy as np
import pytest

from frsne import (
    ConvergenceCriterion,
    InitialCondition,
    PhysicsParams,
    RadialWavefunction,
    make_grid,
)
from frsne.core import GridMismatchError, norm_sq
from frsne.evolution import config_for
from frsne.relaxation import relax, relax_state, shape_distance


def test_initial_condition_validation():
    with pytest.raises(ValueError):
        InitialCondition(kind="delta")
    grid = make_grid(500, 40.0)
    with pytest.raises(ValueError):
        # radius + 6 edge widths must fit within r_max / 4
        InitialCondition.smoothed_rectangle(radius=9.0, edge_width=0.5).build(grid)


def test_initial_states_are_normalized():
    grid = make_grid(500, 40.0)
    for init in (InitialCondition.gaussian(1.0),
                 InitialCondition.smoothed_rectangle(3.0, 0.5),
                 InitialCondition.two_gaussian_superposition(1.0, 3.0, 0.5)):
        psi = init.build(grid)
        assert norm_sq(psi) == pytest.approx(1.0, abs=1e-12)
        assert np.all(psi.values.imag == 0.0)
        assert np.all(psi.values.real >= 0.0)


def test_criterion_validation():
    with pytest.raises(ValueError):
        ConvergenceCriterion(window=0.0)
    with pytest.raises(ValueError):
        ConvergenceCriterion(tol_shape=-1e-7)


def test_shape_distance_is_phase_blind(soliton):
    rotated = RadialWavefunction(soliton.grid, soliton.values * np.exp(0.4j))
    assert shape_distance(soliton, rotated) < 1e-15
    other = RadialWavefunction(make_grid(600, 40.0), np.ones(600))
    with pytest.raises(GridMismatchError):
        shape_distance(soliton, other)


def test_coarse_relaxation_reproduces_stationary_constants(coarse_run):
    psi, report, records = coarse_run
    assert report.converged
    assert report.spread_r0 == pytest.approx(5.5501, rel=5e-3)
    assert report.energy_e0 == pytest.approx(0.0356, rel=1e-2)
    assert report.spread_p0 == pytest.approx(0.2668, rel=5e-3)
    assert report.correlation_r0 == pytest.approx(0.6753, rel=5e-3)
    # stationary state rotates as exp(-i E0 t / hbar)
    assert report.phase_drift == pytest.approx(-report.energy_e0, rel=1e-2)


def test_records_are_regular_and_normalized(coarse_run):
    _, _, records = coarse_run
    times = np.array([r.time for r in records])
    assert np.allclose(np.diff(times), times[1] - times[0], rtol=1e-9)
    assert max(abs(r.norm_sq - 1.0) for r in records) < 1e-12


def test_short_budget_reports_non_convergence(params):
    grid = make_grid(128, 40.0)
    cfg = config_for(grid, params)
    crit = ConvergenceCriterion(max_time=5.0)
    _, report, records = relax(InitialCondition.gaussian(1.0), grid, params,
                               cfg, crit)
    assert not report.converged
    assert records[-1].time >= 5.0


def test_relax_state_accepts_prebuilt_states(soliton, params):
    # restarting from the converged profile passes the criterion at the
    # first opportunity (one trailing window)
    cfg = config_for(soliton.grid, params)
    crit = ConvergenceCriterion()
    _, report, records = relax_state(soliton, params, cfg, crit)
    assert report.converged
    assert records[-1].time <= crit.window + 1.0


def test_mass_rescaling_covariance(coarse_run):
    # hbar = G = 1, M = 2: lengths shrink 8x, times 32x.  Running the
    # same physics on the correspondingly shrunk grid and criterion must
    # reproduce the dimensionless report to rounding accuracy.
    _, ref_report, _ = coarse_run
    p = PhysicsParams(mass=2.0)
    grid = make_grid(500, 40.0 * p.length_unit)
    amp_scale = p.length_unit**-1.5  # |psi| carries length^{-3/2}
    crit = ConvergenceCriterion(
        window=50.0 * p.time_unit,
        tol_spread=1e-4,
        tol_shape=1e-7 * amp_scale / p.time_unit,
        max_time=1500.0 * p.time_unit,
    )
    cfg = config_for(grid, p)
    _, report, _ = relax(InitialCondition.gaussian(1.0 * p.length_unit), grid,
                         p, cfg, crit, sample_interval=0.5 * p.time_unit)
    assert report.converged
    for name in ("spread_r0", "energy_e0", "spread_p0", "correlation_r0"):
        assert getattr(report, name) == pytest.approx(
            getattr(ref_report, name), rel=1e-12), name
    assert report.phase_drift == pytest.approx(ref_report.phase_drift, rel=1e-10)
