"""Right-hand side of the complex-coupling equation and explicit time stepping.

The general coupling G exp(-i alpha) splits the mean field into a unitary
part (weight cos alpha, no counter term: a real constant there is pure
gauge) and a dissipative part (weight sin alpha, with the counter term
<V_psi> restoring the norm):

    dpsi/dt = (i hbar / 2M)(2 psi'/r + psi'')
              - (i cos(alpha)/hbar) V_psi psi
              - (sin(alpha)/hbar) (V_psi - <V_psi>) psi

At alpha = 0 this is the reversible self-gravitating Schrodinger equation,
at alpha = pi/2 the purely frictional one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import rk4_advance
from .core import (
    InstabilityError,
    PhysicsParams,
    RadialGrid,
    RadialWavefunction,
    require_normalized,
)
from .meanfield import compute_potential


@dataclass(frozen=True)
class EvolutionConfig:
    """Time step and stepping policy for the explicit RK4 integrator."""

    dt: float
    stability_factor: float = 0.5
    renormalize_each_step: bool = True
    max_steps: int = 100_000_000

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (0 < self.stability_factor <= 1):
            raise ValueError("stability_factor must lie in (0, 1]")


def stability_ceiling(grid: RadialGrid, params: PhysicsParams) -> float:
    """Largest admissible explicit time step, dt_max = M h^2 / hbar."""
    return params.mass * grid.spacing**2 / params.hbar


def config_for(
    grid: RadialGrid,
    params: PhysicsParams,
    stability_factor: float = 0.5,
    renormalize_each_step: bool = True,
    max_steps: int = 100_000_000,
) -> EvolutionConfig:
    """Evolution config with dt = c * M h^2 / hbar for stability factor c."""
    return EvolutionConfig(
        dt=stability_factor * stability_ceiling(grid, params),
        stability_factor=stability_factor,
        renormalize_each_step=renormalize_each_step,
        max_steps=max_steps,
    )


def rhs(psi: RadialWavefunction, params: PhysicsParams) -> np.ndarray:
    """dpsi/dt of the complex-coupling equation, sampled on the grid.

    The kinetic term is evaluated through u = r psi, whose second
    derivative equals r (2 psi'/r + psi''); ghost values antisymmetric
    through r = 0 and the outer wall match the staggered grid.
    """
    require_normalized(psi)
    grid = psi.grid
    h = grid.spacing
    u = grid.nodes * psi.values
    um = np.concatenate(([-u[0]], u[:-1]))
    up = np.concatenate((u[1:], [-u[-1]]))
    lap_u = (up - 2.0 * u + um) / h**2
    pot = compute_potential(psi, params)
    kinetic = (1j * params.hbar / (2.0 * params.mass)) * lap_u / grid.nodes
    cos_a, sin_a = math.cos(params.alpha), math.sin(params.alpha)
    unitary = (-1j * cos_a / params.hbar) * pot.values * psi.values
    dissipative = (-sin_a / params.hbar) * (pot.values - pot.expectation) * psi.values
    return kinetic + unitary + dissipative


def _advance_inplace(
    u: np.ndarray,
    grid: RadialGrid,
    params: PhysicsParams,
    cfg: EvolutionConfig,
    n_steps: int,
) -> None:
    if not np.all(np.isfinite(u)):
        raise InstabilityError("non-finite amplitudes in the state")
    ceiling = stability_ceiling(grid, params)
    if cfg.dt > ceiling * (1 + 1e-12):
        raise ValueError(
            f"dt = {cfg.dt} violates the explicit stability ceiling "
            f"M h^2 / hbar = {ceiling}"
        )
    ok = rk4_advance(
        u,
        grid.nodes,
        grid.spacing,
        cfg.dt,
        n_steps,
        params.hbar,
        params.mass,
        params.newton_g * params.mass**2,
        math.cos(params.alpha),
        math.sin(params.alpha),
        cfg.renormalize_each_step,
    )
    if not ok:
        raise InstabilityError(
            "non-finite amplitudes during time stepping; the explicit scheme "
            f"requires dt <= M h^2 / hbar = {ceiling} (got dt = {cfg.dt})"
        )


def advance(
    psi: RadialWavefunction,
    params: PhysicsParams,
    cfg: EvolutionConfig,
    n_steps: int,
) -> RadialWavefunction:
    """Advance by n_steps RK4 steps on u = r psi; returns the new state."""
    require_normalized(psi, tol=1e-3)
    u = (psi.grid.nodes * psi.values).astype(np.complex128)
    _advance_inplace(u, psi.grid, params, cfg, n_steps)
    return RadialWavefunction(psi.grid, u / psi.grid.nodes)


def step(
    psi: RadialWavefunction, params: PhysicsParams, cfg: EvolutionConfig
) -> RadialWavefunction:
    """One RK4 step; the potential is recomputed at every stage."""
    return advance(psi, params, cfg, 1)
