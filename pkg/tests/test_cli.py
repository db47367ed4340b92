"""Command-line interface: config handling, artifacts, exit codes."""
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from frsne.cli import (
    EXIT_CONFIG,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_UNSTABLE,
    ConfigError,
    load_config,
    main,
    read_profile_csv,
    write_profile_csv,
)
from frsne.core import InstabilityError

FAST = ["--n-points", "500", "--r-max", "40"]


def test_load_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# comment lines and blanks are ignored\n"
        "\n"
        "n_points = 300\n"
        "alpha = 0.7  # trailing comments too\n"
        "init_kind = smoothed_rectangle\n"
    )
    cfg = load_config(str(cfg_file), {"alpha": 0.9, "r_max": None})
    assert cfg.n_points == 300
    assert cfg.alpha == 0.9  # flag wins over file
    assert cfg.init_kind == "smoothed_rectangle"
    assert cfg.r_max == 40.0  # untouched default


def test_load_config_rejects_unknown_keys_and_bad_values(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n_pts = 300\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(str(bad), {})
    bad.write_text("n_points = many\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(str(bad), {})
    bad.write_text("just some text\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_config(str(bad), {})
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "missing.cfg"), {})


def test_load_config_validates_physics(tmp_path):
    with pytest.raises(ConfigError):
        load_config(None, {"n_points": 8})
    with pytest.raises(ConfigError):
        load_config(None, {"alpha": math.pi})


def test_relax_artifacts_and_determinism(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        rc = main(["relax", *FAST, "--out-dir", str(out)])
        assert rc == EXIT_OK
    for name in ("spread_vs_time.csv", "stationary_profile.csv", "report.json"):
        a = (outs[0] / name).read_bytes()
        b = (outs[1] / name).read_bytes()
        assert a == b, f"{name} is not deterministic"

    report = json.loads((outs[0] / "report.json").read_text())
    assert report["converged"] is True
    assert report["spread_r0"] == pytest.approx(5.5501, rel=2e-2)
    assert report["units"]["length_unit"] == 1.0

    header = (outs[0] / "spread_vs_time.csv").read_text().splitlines()[0]
    assert header == "time,norm_sq,spread_r,spread_p,kinetic_energy,phase_at_ref"
    meta = json.loads((outs[0] / "meta.json").read_text())
    assert meta["command"] == "relax"
    assert meta["config"]["n_points"] == 500


def test_profile_round_trip(tmp_path, soliton):
    path = tmp_path / "profile.csv"
    write_profile_csv(path, soliton)
    back = read_profile_csv(path)
    assert back.grid.n_points == soliton.grid.n_points
    assert back.grid.r_max == pytest.approx(soliton.grid.r_max, rel=1e-12)
    assert np.max(np.abs(np.abs(back.values) - np.abs(soliton.values))) < 1e-12
    # phases agree where the profile file carries them (above the floor)
    peak = int(np.argmax(np.abs(soliton.values)))
    assert np.angle(back.values[peak]) == pytest.approx(
        np.angle(soliton.values[peak]), abs=1e-10)


def test_twobody_reuses_profile(tmp_path):
    out = tmp_path / "run"
    assert main(["relax", *FAST, "--out-dir", str(out)]) == EXIT_OK
    profile = out / "stationary_profile.csv"

    two = tmp_path / "two"
    rc = main(["twobody", "--separation", "100", "--direction", "0,1,0",
               "--profile", str(profile), "--out-dir", str(two)])
    assert rc == EXIT_OK
    payload = json.loads((two / "twobody.json").read_text())
    force = np.array(payload["force_on_body1"])
    acc = np.array(payload["acceleration_body1"])
    assert np.array_equal(np.array(payload["acceleration_body2"]), -acc)
    assert np.linalg.norm(acc) == pytest.approx(
        1.3506 * np.linalg.norm(force), rel=2e-2)
    assert payload["identity_residual"] < 1e-6

    # separations inside the packet's far-field validity margin are refused
    rc = main(["twobody", "--separation", "20", "--profile", str(profile),
               "--out-dir", str(two)])
    assert rc == EXIT_CONFIG


def test_exit_code_non_convergence(tmp_path):
    rc = main(["relax", *FAST, "--max-time", "5",
               "--out-dir", str(tmp_path)])
    assert rc == EXIT_NOT_CONVERGED
    # the partial artifacts are still written for post-mortem inspection
    assert (tmp_path / "report.json").is_file()
    assert json.loads((tmp_path / "report.json").read_text())["converged"] is False


def test_exit_code_config_error(tmp_path):
    assert main(["relax", "--n-points", "8", "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["twobody", "--separation", "100", "--direction", "1,2",
                 "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["sweep-alpha", "--alphas", ",", "--out-dir", str(tmp_path)]) == EXIT_CONFIG


def test_exit_code_instability(tmp_path, monkeypatch):
    import frsne.cli as cli

    def boom(*args, **kwargs):
        raise InstabilityError("synthetic blow-up")

    monkeypatch.setattr(cli, "relax", boom)
    assert main(["relax", *FAST, "--out-dir", str(tmp_path)]) == EXIT_UNSTABLE


def test_sweep_alpha_artifacts(tmp_path):
    # a deliberately tiny budget: the row must be flagged, not dropped
    rc = main(["sweep-alpha", "--alphas", "1.2", *FAST, "--max-time", "5",
               "--out-dir", str(tmp_path)])
    assert rc == EXIT_NOT_CONVERGED
    lines = (tmp_path / "geff_vs_alpha.csv").read_text().splitlines()
    assert lines[0] == ("alpha,r0_measured,geff_over_g_measured,"
                        "geff_over_g_constant_r0,status")
    cells = lines[1].split(",")
    assert float(cells[0]) == 1.2
    assert float(cells[3]) == pytest.approx(
        math.cos(1.2) + 2.0 * 0.6753 * math.sin(1.2), rel=1e-12)
    assert cells[4] == "not_converged"


def test_help_exits_cleanly():
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


def test_module_entry_point_smoke():
    proc = subprocess.run([sys.executable, "-m", "frsne.cli", "relax", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "--n-points" in proc.stdout
