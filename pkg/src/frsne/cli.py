"""Command-line front end: relaxation runs, coupling-phase sweeps, two-body
reports, all emitted as deterministic CSV/JSON artifacts.

Config files are flat ``key = value`` text; command-line flags override
file values.  Data files never contain timestamps, so identical configs
produce byte-identical outputs; wall-clock info goes to meta.json only.

Exit codes: 0 success, 2 non-convergence, 3 config error, 4 numerical
instability.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    InstabilityError,
    PhysicsParams,
    RadialWavefunction,
    make_grid,
    normalize,
)
from .evolution import config_for
from .observables import phase_profile, spread_r
from .relaxation import ConvergenceCriterion, InitialCondition, relax
from .twobody import (
    MIN_SEPARATION_RATIO,
    newton_force,
    sweep_alpha,
    verify_acceleration_identity,
)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_CONFIG = 3
EXIT_UNSTABLE = 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Full run description; defaults reproduce the reference runs."""

    n_points: int = 2000
    r_max: float = 40.0
    alpha: float = math.pi / 2
    hbar: float = 1.0
    newton_g: float = 1.0
    mass: float = 1.0
    stability_factor: float = 0.5
    max_steps: int = 100_000_000
    window: float = 50.0
    tol_spread: float = 1e-4
    tol_shape: float = 1e-7
    max_time: float = 1500.0
    init_kind: str = "gaussian"
    sigma: float = 1.0
    sigma2: float = 3.0
    weight: float = 0.5
    radius: float = 3.0
    edge_width: float = 0.5
    sample_interval: float = 0.5
    out_dir: str = "."

    def params(self) -> PhysicsParams:
        return PhysicsParams(hbar=self.hbar, newton_g=self.newton_g,
                             mass=self.mass, alpha=self.alpha)

    def grid(self):
        return make_grid(self.n_points, self.r_max)

    def criterion(self) -> ConvergenceCriterion:
        return ConvergenceCriterion(window=self.window,
                                    tol_spread=self.tol_spread,
                                    tol_shape=self.tol_shape,
                                    max_time=self.max_time)

    def initial_condition(self) -> InitialCondition:
        if self.init_kind == "gaussian":
            return InitialCondition.gaussian(self.sigma)
        if self.init_kind == "smoothed_rectangle":
            return InitialCondition.smoothed_rectangle(self.radius, self.edge_width)
        if self.init_kind == "two_gaussian_superposition":
            return InitialCondition.two_gaussian_superposition(
                self.sigma, self.sigma2, self.weight)
        raise ConfigError(f"init_kind: unknown kind {self.init_kind!r}")


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _parse_value(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from exc


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Config file plus flag overrides; flags win."""
    values: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        for lineno, line in enumerate(p.read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    try:
        cfg.params()
        cfg.grid()
        cfg.criterion()
        cfg.initial_condition()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) if isinstance(c, str) else _fmt(c)
                              for c in row))
    path.write_text("\n".join(lines) + "\n")


def _write_meta(out: Path, cfg: RunConfig, wall: float, command: str) -> None:
    meta = {"command": command, "config": dataclasses.asdict(cfg),
            "wall_seconds": wall}
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def _unit_system(params: PhysicsParams) -> dict:
    return {
        "hbar": params.hbar,
        "newton_g": params.newton_g,
        "mass": params.mass,
        "length_unit": params.length_unit,
        "energy_unit": params.energy_unit,
        "time_unit": params.time_unit,
        "momentum_unit": params.momentum_unit,
    }


def write_profile_csv(path: Path, psi: RadialWavefunction) -> None:
    chi = phase_profile(psi).chi
    rows = zip(psi.grid.nodes, np.abs(psi.values) ** 2, chi)
    _write_csv(path, ["r", "abs_psi_sq", "phase"], rows)


def read_profile_csv(path: Path) -> RadialWavefunction:
    """Rebuild a radial state from a stationary_profile.csv file."""
    raw = np.genfromtxt(path, delimiter=",", names=True)
    r = np.atleast_1d(raw["r"])
    h = r[1] - r[0]
    n = r.size
    if abs(r[0] - 0.5 * h) > 1e-9 * h:
        raise ConfigError(f"{path}: nodes are not staggered off the origin")
    grid = make_grid(n, n * h)
    phase = np.nan_to_num(np.atleast_1d(raw["phase"]), nan=0.0)
    amp = np.sqrt(np.clip(np.atleast_1d(raw["abs_psi_sq"]), 0.0, None))
    return normalize(RadialWavefunction(grid, amp * np.exp(1j * phase)))


def cmd_relax(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    grid = cfg.grid()
    evo = config_for(grid, params, stability_factor=cfg.stability_factor,
                     max_steps=cfg.max_steps)
    t0 = time.time()
    psi, report, records = relax(cfg.initial_condition(), grid, params, evo,
                                 cfg.criterion(), cfg.sample_interval)
    wall = time.time() - t0

    _write_csv(
        out / "spread_vs_time.csv",
        ["time", "norm_sq", "spread_r", "spread_p", "kinetic_energy",
         "phase_at_ref"],
        ((r.time, r.norm_sq, r.spread_r, r.spread_p, r.kinetic_energy,
          r.phase_at_ref) for r in records),
    )
    write_profile_csv(out / "stationary_profile.csv", psi)
    payload = {k: (v.item() if hasattr(v, "item") else v)
               for k, v in dataclasses.asdict(report).items()}
    payload["units"] = _unit_system(params)
    (out / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    _write_meta(out, cfg, wall, "relax")
    if not report.converged:
        print(f"not converged within max_time = {cfg.max_time}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"converged after {report.iterations} steps: "
          f"spread_r0 = {report.spread_r0:.6g}, energy_e0 = {report.energy_e0:.6g}")
    return EXIT_OK


def cmd_sweep_alpha(cfg: RunConfig, alphas: list[float]) -> int:
    if not alphas:
        print("empty alpha list", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    rows = sweep_alpha(alphas, cfg.grid(), cfg.params(), cfg.criterion(),
                       init=cfg.initial_condition(),
                       stability_factor=cfg.stability_factor,
                       sample_interval=cfg.sample_interval)
    wall = time.time() - t0
    _write_csv(
        out / "geff_vs_alpha.csv",
        ["alpha", "r0_measured", "geff_over_g_measured",
         "geff_over_g_constant_r0", "status"],
        ((r.alpha, r.r0_measured, r.geff_over_g_measured,
          r.geff_over_g_constant_r0,
          "converged" if r.converged else "not_converged") for r in rows),
    )
    _write_meta(out, cfg, wall, "sweep-alpha")
    bad = [r.alpha for r in rows if not r.converged]
    if bad:
        print(f"non-converged phases: {bad}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_twobody(cfg: RunConfig, separation: float, direction: np.ndarray,
                profile_path: str | None) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    t0 = time.time()
    if profile_path is not None:
        psi = read_profile_csv(Path(profile_path))
    else:
        evo = config_for(cfg.grid(), params,
                         stability_factor=cfg.stability_factor,
                         max_steps=cfg.max_steps)
        psi, report, _ = relax(cfg.initial_condition(), cfg.grid(), params,
                               evo, cfg.criterion(), cfg.sample_interval)
        if not report.converged:
            print("relaxation did not converge; no two-body report",
                  file=sys.stderr)
            return EXIT_NOT_CONVERGED
    spread = spread_r(psi)
    if separation <= MIN_SEPARATION_RATIO * spread:
        print(
            f"separation {separation} violates the far-field condition: "
            f"packet spread {spread:.4g} must be << separation "
            f"(ratio > {MIN_SEPARATION_RATIO})",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    norm = np.linalg.norm(direction)
    if norm == 0:
        print("direction must be a nonzero vector", file=sys.stderr)
        return EXIT_CONFIG
    unit = direction / norm
    r1 = np.zeros(3)
    r2 = separation * unit
    force = newton_force(r1, r2, params)
    acc1, rhs, residual = verify_acceleration_identity(psi, force, params)
    payload = {
        "separation": separation,
        "direction": unit.tolist(),
        "force_on_body1": force.tolist(),
        "acceleration_body1": rhs.tolist(),
        "acceleration_body2": (-rhs).tolist(),
        "identity_residual": residual,
        "units": _unit_system(params),
    }
    (out / "twobody.json").write_text(json.dumps(payload, indent=2) + "\n")
    _write_meta(out, cfg, time.time() - t0, "twobody")
    return EXIT_OK


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="key = value config file")
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--n-points", dest="n_points", type=int, default=None)
    sub.add_argument("--r-max", dest="r_max", type=float, default=None)
    sub.add_argument("--sigma", type=float, default=None)
    sub.add_argument("--max-time", dest="max_time", type=float, default=None)
    sub.add_argument("--init-kind", dest="init_kind", default=None,
                     choices=list(InitialCondition.KINDS))
    sub.add_argument("--stability-factor", dest="stability_factor",
                     type=float, default=None)
    sub.add_argument("--out-dir", dest="out_dir", default=None)


def _overrides(args: argparse.Namespace) -> dict:
    keys = ("alpha", "n_points", "r_max", "sigma", "max_time", "init_kind",
            "stability_factor", "out_dir")
    return {k: getattr(args, k) for k in keys}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="frsne",
        description="Frictional Schrodinger-Newton relaxation laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    p_relax = subs.add_parser("relax", help="relax one state to stationarity")
    _add_common_flags(p_relax)

    p_sweep = subs.add_parser("sweep-alpha",
                              help="effective coupling vs phase table")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--alphas", required=True,
                         help="comma-separated phases in (0, pi)")

    p_two = subs.add_parser("twobody", help="induced-gravity report")
    _add_common_flags(p_two)
    p_two.add_argument("--separation", type=float, required=True)
    p_two.add_argument("--direction", default="1,0,0",
                       help="comma-separated 3-vector")
    p_two.add_argument("--profile", default=None,
                       help="reuse a stationary_profile.csv instead of relaxing")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        if args.command == "relax":
            return cmd_relax(cfg)
        if args.command == "sweep-alpha":
            alphas = [float(s) for s in args.alphas.split(",") if s.strip()]
            return cmd_sweep_alpha(cfg, alphas)
        direction = np.array([float(s) for s in args.direction.split(",")])
        if direction.shape != (3,):
            raise ConfigError("direction must have three components")
        return cmd_twobody(cfg, args.separation, direction, args.profile)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":
    sys.exit(main())
