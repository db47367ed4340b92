"""Numerical laboratory for the frictional Schrodinger-Newton equation."""

from .core import (
    ObservableRecord,
    PhysicsParams,
    RadialGrid,
    RadialWavefunction,
    StationaryReport,
    make_gaussian,
    make_grid,
    norm_sq,
    normalize,
    regrid,
)
from .evolution import EvolutionConfig, config_for, rhs, step
from .meanfield import PotentialProfile, compute_potential, potential_expectation
from .observables import (
    PhaseProfile,
    correlation_matrix_isotropy,
    correlation_r0,
    kinetic_energy,
    phase_drift_rate,
    phase_profile,
    spread_p,
    spread_r,
)
from .relaxation import (
    ConvergenceCriterion,
    InitialCondition,
    relax,
    relax_state,
    shape_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
