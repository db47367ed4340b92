"""Radial grids, wavefunctions, physical parameters and the unit system.

Internally every computation runs in the dimensionless system hbar = G = M = 1;
``PhysicsParams`` carries the physical values only so that reported constants
can be expressed in the natural units hbar^2/(G M^3) (length) and
G^2 M^5 / hbar^2 (energy).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FOUR_PI = 4.0 * math.pi


class GridMismatchError(ValueError):
    """Two objects defined on different radial grids were combined."""


class InstabilityError(RuntimeError):
    """The explicit integrator produced non-finite amplitudes."""


@dataclass(frozen=True)
class PhysicsParams:
    """Action scale, gravitational coupling, mass and coupling phase.

    ``alpha`` is the phase of the complex coupling G*exp(-i*alpha):
    alpha = 0 is the reversible self-gravitating Schrodinger equation,
    alpha = pi/2 the purely dissipative (frictional) one.  alpha = pi
    (pure repulsion) is rejected.
    """

    hbar: float = 1.0
    newton_g: float = 1.0
    mass: float = 1.0
    alpha: float = math.pi / 2

    def __post_init__(self) -> None:
        for name in ("hbar", "newton_g", "mass"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not (np.isfinite(self.alpha) and 0.0 <= self.alpha < math.pi):
            raise ValueError(
                f"alpha must lie in [0, pi); got {self.alpha!r} "
                "(alpha = pi, pure repulsion, is excluded)"
            )

    @property
    def length_unit(self) -> float:
        """Natural length scale hbar^2 / (G M^3)."""
        return self.hbar**2 / (self.newton_g * self.mass**3)

    @property
    def energy_unit(self) -> float:
        """Natural energy scale G^2 M^5 / hbar^2."""
        return self.newton_g**2 * self.mass**5 / self.hbar**2

    @property
    def time_unit(self) -> float:
        """Natural time scale hbar / energy_unit."""
        return self.hbar / self.energy_unit

    @property
    def momentum_unit(self) -> float:
        """Natural momentum scale hbar / length_unit."""
        return self.hbar / self.length_unit


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid staggered half a step off the origin.

    Nodes sit at r_j = (j + 1/2) h with h = r_max / n_points, so r = 0 is
    never a sample point and the 2 psi'/r coordinate singularity is never
    evaluated.
    """

    n_points: int
    r_max: float
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_points < 16:
            raise ValueError(f"n_points must be >= 16, got {self.n_points}")
        if not (np.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive and finite, got {self.r_max!r}")
        h = self.r_max / self.n_points
        nodes = (np.arange(self.n_points) + 0.5) * h
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def spacing(self) -> float:
        return self.r_max / self.n_points

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.n_points == other.n_points and self.r_max == other.r_max


def make_grid(n_points: int, r_max: float) -> RadialGrid:
    """Build the staggered radial grid; rejects n_points < 16."""
    return RadialGrid(n_points=int(n_points), r_max=float(r_max))


@dataclass(frozen=True)
class RadialWavefunction:
    """Complex radial samples psi(r_j) of a spherically symmetric 3D state."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} does not match grid with "
                f"{self.grid.n_points} points"
            )
        object.__setattr__(self, "values", values)


def volume_integral(grid: RadialGrid, samples: np.ndarray) -> float | complex:
    """Midpoint quadrature of the 3D volume integral 4 pi sum f(r_j) r_j^2 h."""
    return FOUR_PI * grid.spacing * np.sum(samples * grid.nodes**2)


def norm_sq(psi: RadialWavefunction) -> float:
    """Squared norm 4 pi sum |psi_j|^2 r_j^2 h."""
    return float(volume_integral(psi.grid, np.abs(psi.values) ** 2))


def normalize(psi: RadialWavefunction) -> RadialWavefunction:
    """Rescale to unit norm; the phase profile is untouched."""
    n2 = norm_sq(psi)
    if not np.isfinite(n2) or n2 <= 0.0:
        raise ValueError(f"cannot normalize state with squared norm {n2!r}")
    return RadialWavefunction(psi.grid, psi.values / math.sqrt(n2))


def make_gaussian(grid: RadialGrid, sigma: float) -> RadialWavefunction:
    """Normalized real Gaussian psi(r) ~ exp(-r^2 / 4 sigma^2).

    |psi|^2 then has per-coordinate variance sigma^2, so the standard
    spread (Delta r) of the state equals sigma.  sigma above r_max/4 is
    rejected: the truncated tail would corrupt the normalization.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if sigma > grid.r_max / 4:
        raise ValueError(
            f"sigma = {sigma} exceeds r_max/4 = {grid.r_max / 4}; "
            "tail truncation would corrupt the normalization"
        )
    values = np.exp(-grid.nodes**2 / (4.0 * sigma**2)).astype(np.complex128)
    return normalize(RadialWavefunction(grid, values))


def require_normalized(psi: RadialWavefunction, tol: float = 1e-6) -> None:
    n2 = norm_sq(psi)
    if abs(n2 - 1.0) > tol:
        raise ValueError(f"state is not normalized: norm^2 = {n2!r}")


def require_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(
            f"grid mismatch: ({a.grid.n_points}, {a.grid.r_max}) vs "
            f"({b.grid.n_points}, {b.grid.r_max})"
        )


def regrid(psi: RadialWavefunction, grid: RadialGrid) -> RadialWavefunction:
    """Linear-interpolate a state onto a new grid and renormalize.

    Used to warm-start a relaxation on a finer or coarser grid from an
    already converged profile; nodes outside the old range get zero.
    """
    old = psi.grid.nodes
    re = np.interp(grid.nodes, old, psi.values.real, left=psi.values.real[0], right=0.0)
    im = np.interp(grid.nodes, old, psi.values.imag, left=psi.values.imag[0], right=0.0)
    return normalize(RadialWavefunction(grid, re + 1j * im))


@dataclass(frozen=True)
class ObservableRecord:
    """Scalar diagnostics sampled at one instant of an evolution."""

    time: float
    norm_sq: float
    spread_r: float
    spread_p: float
    kinetic_energy: float
    phase_at_ref: float


@dataclass(frozen=True)
class StationaryReport:
    """Converged-state summary in dimensionless natural units.

    ``spread_r0`` is in units hbar^2/(G M^3), ``energy_e0`` in
    G^2 M^5 / hbar^2, ``spread_p0`` in G M^3 / hbar, ``phase_drift`` in
    inverse natural time units; ``correlation_r0`` is dimensionless.
    """

    spread_r0: float
    energy_e0: float
    spread_p0: float
    correlation_r0: float
    phase_drift: float
    converged: bool
    iterations: int
    residual: float
