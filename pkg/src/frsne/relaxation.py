"""Relaxation driver: evolve an initial state until it settles.

Convergence is declared when two independent signals both pass: the
relative fluctuation of the standard spread over a trailing time window,
and the instantaneous shape-change rate of |psi|.  The spread criterion
alone can pass momentarily at a node of a slow oscillation; the shape
rate guards against that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import observables
from .core import (
    ObservableRecord,
    PhysicsParams,
    RadialGrid,
    RadialWavefunction,
    StationaryReport,
    normalize,
)
from .evolution import EvolutionConfig, _advance_inplace


@dataclass(frozen=True)
class InitialCondition:
    """Real, nonnegative, spherically symmetric starting profile."""

    kind: str
    sigma: float = 1.0
    sigma2: float = 3.0
    weight: float = 0.5
    radius: float = 3.0
    edge_width: float = 0.5

    KINDS = ("gaussian", "smoothed_rectangle", "two_gaussian_superposition")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown initial condition kind {self.kind!r}")

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> "InitialCondition":
        return cls(kind="gaussian", sigma=sigma)

    @classmethod
    def smoothed_rectangle(
        cls, radius: float = 3.0, edge_width: float = 0.5
    ) -> "InitialCondition":
        return cls(kind="smoothed_rectangle", radius=radius, edge_width=edge_width)

    @classmethod
    def two_gaussian_superposition(
        cls, sigma1: float = 1.0, sigma2: float = 3.0, weight: float = 0.5
    ) -> "InitialCondition":
        return cls(kind="two_gaussian_superposition", sigma=sigma1, sigma2=sigma2,
                   weight=weight)

    def build(self, grid: RadialGrid) -> RadialWavefunction:
        from .core import make_gaussian

        r = grid.nodes
        if self.kind == "gaussian":
            return make_gaussian(grid, self.sigma)
        if self.kind == "smoothed_rectangle":
            if self.radius <= 0 or self.edge_width <= 0:
                raise ValueError("radius and edge_width must be positive")
            if self.radius + 6.0 * self.edge_width > grid.r_max / 4:
                raise ValueError(
                    "smoothed rectangle is not contained within r_max/4; "
                    "enlarge the grid or shrink the profile"
                )
            values = 1.0 / (1.0 + np.exp((r - self.radius) / self.edge_width))
            return normalize(RadialWavefunction(grid, values.astype(np.complex128)))
        # two-Gaussian superposition, both components normalized first
        g1 = make_gaussian(grid, self.sigma).values.real
        g2 = make_gaussian(grid, self.sigma2).values.real
        values = (1.0 - self.weight) * g1 + self.weight * g2
        return normalize(RadialWavefunction(grid, values.astype(np.complex128)))


@dataclass(frozen=True)
class ConvergenceCriterion:
    """Stopping rule for the relaxation loop (all in internal units)."""

    window: float = 50.0
    tol_spread: float = 1e-4
    tol_shape: float = 1e-7
    max_time: float = 1500.0

    def __post_init__(self) -> None:
        for name in ("window", "tol_spread", "tol_shape", "max_time"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def shape_distance(a: RadialWavefunction, b: RadialWavefunction) -> float:
    """Phase-blind profile distance max_j | |a_j| - |b_j| |.

    Stationary states differ by a rotating global phase, so uniqueness of
    the attractor is a statement about |psi| only.
    """
    from .core import require_same_grid

    require_same_grid(a, b)
    return float(np.max(np.abs(np.abs(a.values) - np.abs(b.values))))


def _sample(
    psi: RadialWavefunction, params: PhysicsParams, t: float, ref_index: int
) -> ObservableRecord:
    ekin = observables.kinetic_energy(psi, params)
    return ObservableRecord(
        time=t,
        norm_sq=float(np.real(4 * np.pi * psi.grid.spacing
                              * np.sum(np.abs(psi.values) ** 2 * psi.grid.nodes**2))),
        spread_r=observables.spread_r(psi),
        spread_p=math.sqrt(2.0 * params.mass * ekin),
        kinetic_energy=ekin,
        phase_at_ref=observables.phase_at(psi, ref_index),
    )


def relax_state(
    psi0: RadialWavefunction,
    params: PhysicsParams,
    cfg: EvolutionConfig,
    crit: ConvergenceCriterion,
    sample_interval: float = 0.5,
    ref_index: int = 0,
) -> tuple[RadialWavefunction, StationaryReport, list[ObservableRecord]]:
    """Evolve psi0 until the convergence criterion passes or time runs out."""
    grid = psi0.grid
    psi = normalize(psi0)
    steps_per_sample = max(1, int(round(sample_interval / cfg.dt)))
    interval = steps_per_sample * cfg.dt

    u = (grid.nodes * psi.values).astype(np.complex128)
    records = [_sample(psi, params, 0.0, ref_index)]
    prev_amp = np.abs(psi.values)
    t = 0.0
    iterations = 0
    converged = False
    shape_rate = math.inf

    while t < crit.max_time and iterations < cfg.max_steps:
        _advance_inplace(u, grid, params, cfg, steps_per_sample)
        t += interval
        iterations += steps_per_sample
        psi = RadialWavefunction(grid, u / grid.nodes)
        records.append(_sample(psi, params, t, ref_index))

        amp = np.abs(psi.values)
        shape_rate = float(np.max(np.abs(amp - prev_amp))) / interval
        prev_amp = amp

        if t >= crit.window:
            tail = [rec.spread_r for rec in records
                    if rec.time >= t - crit.window - 1e-9]
            fluct = (max(tail) - min(tail)) / (sum(tail) / len(tail))
            if fluct < crit.tol_spread and shape_rate < crit.tol_shape:
                converged = True
                break

    report = _build_report(psi, params, records, crit, converged, iterations,
                           shape_rate)
    return psi, report, records


def relax(
    init: InitialCondition,
    grid: RadialGrid,
    params: PhysicsParams,
    cfg: EvolutionConfig,
    crit: ConvergenceCriterion,
    sample_interval: float = 0.5,
) -> tuple[RadialWavefunction, StationaryReport, list[ObservableRecord]]:
    """Build the initial state on the grid and relax it to stationarity."""
    return relax_state(init.build(grid), params, cfg, crit, sample_interval)


def _build_report(
    psi: RadialWavefunction,
    params: PhysicsParams,
    records: list[ObservableRecord],
    crit: ConvergenceCriterion,
    converged: bool,
    iterations: int,
    residual: float,
) -> StationaryReport:
    t_end = records[-1].time
    tail = [(rec.time, rec.phase_at_ref) for rec in records
            if rec.time >= t_end - crit.window - 1e-9]
    if len(tail) >= 10:
        drift = observables.phase_drift_rate(tail) * params.time_unit
    else:
        drift = float("nan")
    ekin = observables.kinetic_energy(psi, params)
    return StationaryReport(
        spread_r0=observables.spread_r(psi) / params.length_unit,
        energy_e0=ekin / params.energy_unit,
        spread_p0=math.sqrt(2.0 * params.mass * ekin) / params.momentum_unit,
        correlation_r0=observables.correlation_r0(psi, params),
        phase_drift=drift,
        converged=converged,
        iterations=iterations,
        residual=residual,
    )
