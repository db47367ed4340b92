"""Newtonian mean-field potential of a radial state and its expectation.

The spherically reduced self-potential is

    V(r) = -4 pi G M^2 integral |psi(r')|^2 r'^2 / max(r, r') dr'

which splits at r into an interior monopole part and an exterior part.
Both pieces are running sums over the grid, so the whole profile costs
O(N) per evaluation; the O(N^2) direct kernel sum lives in the test
suite as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FOUR_PI,
    PhysicsParams,
    RadialGrid,
    RadialWavefunction,
    require_normalized,
    require_same_grid,
    volume_integral,
)


@dataclass(frozen=True)
class PotentialProfile:
    """Mean-field potential samples and the norm-restoring counter term."""

    grid: RadialGrid
    values: np.ndarray
    expectation: float


def _prefix_sums(grid: RadialGrid, density: np.ndarray):
    """Running quadratures of rho r^2 (inward) and rho r (outward tail)."""
    h = grid.spacing
    r = grid.nodes
    interior = np.cumsum(density * r**2) * h
    tail = np.cumsum((density * r)[::-1])[::-1] * h
    # the node's own contribution belongs to the interior part (max(r, r) = r)
    tail_above = np.concatenate([tail[1:], [0.0]])
    return interior, tail_above


def compute_potential(
    psi: RadialWavefunction, params: PhysicsParams
) -> PotentialProfile:
    """Mean-field potential profile of a normalized state.

    Requires |norm^2 - 1| <= 1e-6; the potential enters the evolution
    multiplied by the state itself, so an unnormalized input would bias
    the coupling strength silently.
    """
    require_normalized(psi)
    density = np.abs(psi.values) ** 2
    interior, tail = _prefix_sums(psi.grid, density)
    gm2 = params.newton_g * params.mass**2
    values = -FOUR_PI * gm2 * (interior / psi.grid.nodes + tail)
    expectation = float(volume_integral(psi.grid, density * values))
    return PotentialProfile(grid=psi.grid, values=values, expectation=expectation)


def potential_expectation(psi: RadialWavefunction, pot: PotentialProfile) -> float:
    """Counter term <V_psi> = 4 pi sum |psi_j|^2 V(r_j) r_j^2 h."""
    require_same_grid(psi, pot)
    return float(volume_integral(psi.grid, np.abs(psi.values) ** 2 * pot.values))
