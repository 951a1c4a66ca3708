"""Scenario harness: smoke runs, output files, determinism, configuration."""

import json

import numpy as np
import pytest

from thermrom.config import example_config_text, load_config
from thermrom.errors import ConfigError
from thermrom.metrics import error_uniform
from thermrom.scenarios import (
    ScenarioConfig,
    compare_methods,
    modal_subset_indices,
    run_scenario,
    scenario_twodof,
    write_twodof_outputs,
)


SMOKE = dict(eps=5e-3, cycles=1, steps_per_cycle=20, n_elements=12, db_points=5,
             k_modes=2, seed=11)


@pytest.fixture(scope="module")
def smoke_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("smoke")
    cfg = ScenarioConfig(scenario="curved-nonlinear", method="mms-o1",
                         save_states=True, **SMOKE)
    bundle = run_scenario(cfg, out_dir=out)
    return cfg, bundle, out


def test_smoke_runs_and_writes_declared_files(smoke_bundle):
    cfg, bundle, out = smoke_bundle
    assert (out / "summary.json").exists()
    assert (out / "errors.csv").exists()
    assert (out / "probes_hfm.csv").exists()
    assert (out / "probes_mms-o1.csv").exists()
    assert (out / "states_hfm.npz").exists()
    assert (out / "states_mms-o1.npz").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["scenario"] == "curved-nonlinear"
    assert "E_uniform" in summary["methods"]["mms-o1"]


def test_smoke_probe_csv_time_axis(smoke_bundle):
    # non-dimensional time: one forcing cycle spans 2 pi units
    cfg, bundle, out = smoke_bundle
    rows = (out / "probes_hfm.csv").read_text().strip().splitlines()
    assert rows[0] == "t_scaled,axial,transverse"
    t_last = float(rows[-1].split(",")[0])
    assert t_last == pytest.approx(2.0 * np.pi * cfg.cycles, rel=1e-9)


def test_hfm_error_against_itself_is_zero(smoke_bundle):
    cfg, bundle, out = smoke_bundle
    ref = bundle.results["hfm"].displacement
    assert error_uniform(ref, ref) == 0.0


@pytest.mark.parametrize("scenario", ["straight-linear", "curved-linear"])
def test_all_scenarios_smoke(scenario, tmp_path):
    cfg = ScenarioConfig(scenario=scenario, method="modal-pod", basis_size=2,
                         **SMOKE)
    bundle = run_scenario(cfg, out_dir=tmp_path)
    assert "modal-pod" in bundle.errors
    assert np.isfinite(bundle.errors["modal-pod"]["E_uniform"])


def test_compare_determinism_bit_identical(tmp_path):
    cfg = ScenarioConfig(scenario="curved-nonlinear", save_states=True, **SMOKE)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    compare_methods(cfg, methods=("hfm", "mms-o1", "modal-pod"), out_dir=out_a)
    compare_methods(cfg, methods=("hfm", "mms-o1", "modal-pod"), out_dir=out_b)
    for path_a in sorted(out_a.iterdir()):
        path_b = out_b / path_a.name
        if path_a.suffix == ".json":
            # runtimes are the one legitimately non-deterministic output
            sa = json.loads(path_a.read_text())
            sb = json.loads(path_b.read_text())
            for row in (*sa["methods"].values(), *sb["methods"].values()):
                row.pop("runtime_s")
            assert sa == sb
        else:
            assert path_a.read_bytes() == path_b.read_bytes(), path_a.name


def test_modal_subset_presets():
    cfg = ScenarioConfig(scenario="curved-nonlinear", **SMOKE)
    assert modal_subset_indices(cfg, 19) == (3, 6, 12)
    cfg = ScenarioConfig(scenario="curved-linear", **SMOKE)
    assert modal_subset_indices(cfg, 19) == (1, 11, 17)
    cfg = ScenarioConfig(scenario="curved-linear", modal_subset=(2, 5, 7), **SMOKE)
    assert modal_subset_indices(cfg, 19) == (1, 4, 6)
    cfg = ScenarioConfig(scenario="straight-linear", **SMOKE)
    idx = modal_subset_indices(cfg, 19)
    assert len(idx) == 3 and all(0 <= j < 19 for j in idx)


def test_scenario_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="bent-spoon")
    with pytest.raises(ConfigError):
        ScenarioConfig(method="magic")
    with pytest.raises(ConfigError):
        ScenarioConfig(cycles=0)
    with pytest.raises(ConfigError):
        ScenarioConfig(steps_per_cycle=10)
    with pytest.raises(ConfigError):
        ScenarioConfig(eps=-1.0)


def test_default_cycles_follow_thermal_span():
    cfg = ScenarioConfig(scenario="straight-linear", eps=1e-2)
    assert cfg.resolved_cycles(2.0 * np.pi) == 100
    cfg = ScenarioConfig(scenario="curved-nonlinear", eps=1e-3)
    assert cfg.resolved_cycles(np.pi) == 500


def test_twodof_demo_bundle(tmp_path):
    result = scenario_twodof(0.01, cycles=3, steps_per_cycle=30)
    assert result.full.displacement.shape == (91, 2)
    assert result.rom_displacement.shape == (91, 2)
    assert np.isfinite(result.uniform_error)
    assert result.eigenvalues.shape == (91, 2)
    out = write_twodof_outputs(result, tmp_path)
    assert (out / "summary.json").exists()
    assert (out / "probes_hfm.csv").exists()
    assert (out / "errors.csv").exists()


def test_twodof_frozen_temperature_tracks():
    # fixed temperature on the stable branch: the single-mode model tracks
    # the response up to the quasi-static second-mode content (the forcing
    # at 1.5 rad/s sits well below both natural frequencies here)
    result = scenario_twodof(1e-6, cycles=20, frozen_temperature=-0.29)
    assert result.uniform_error < 0.15


def test_twodof_fixed_vs_adaptive(tmp_path):
    adaptive = scenario_twodof(0.01, cycles=3, steps_per_cycle=30)
    fixed = scenario_twodof(0.01, cycles=3, steps_per_cycle=30,
                            reduction="fixed-1-mode")
    assert fixed.reduction == "fixed-1-mode"
    assert np.isfinite(fixed.uniform_error)
    assert adaptive.reduction == "adaptive-1-mode"


# -- configuration files ------------------------------------------------------------

def test_example_config_parses(tmp_path):
    path = tmp_path / "example.ini"
    path.write_text(example_config_text())
    cfg = load_config(path)
    assert cfg.scenario == "curved-nonlinear"
    assert cfg.eps == 1e-3
    assert cfg.seed == 2024


def test_config_scenario_section_overrides(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("""
[run]
scenario = straight-linear
eps = 1e-3
cycles = 7

[straight-linear]
eps = 2e-2
""")
    cfg = load_config(path)
    assert cfg.eps == 2e-2
    assert cfg.cycles == 7


def test_config_cli_overrides_win(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nscenario = curved-linear\neps = 1e-3\n")
    cfg = load_config(path, overrides={"eps": 5e-3, "seed": 42})
    assert cfg.eps == 5e-3
    assert cfg.seed == 42


def test_config_unknown_key_rejected(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nscenario = curved-linear\npulse_heigth = 10\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_config_bad_value_rejected(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nscenario = curved-linear\ncycles = soon\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/path.ini")
