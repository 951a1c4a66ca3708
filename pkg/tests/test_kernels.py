"""Backend equivalence and dispatch of the assembly kernels."""

import subprocess
import sys

import numpy as np
import pytest

from thermrom import kernels


needs_numba = pytest.mark.skipif(not kernels.numba_available(),
                                 reason="numba not importable")


def _random_state(model, rng, scale=2e-4):
    return scale * rng.standard_normal(model.dof_count)


@needs_numba
@pytest.mark.parametrize("nonlinear", [True, False])
def test_backends_agree(beam_curved_nl, beam_curved_lin, rng, nonlinear):
    model = beam_curved_nl if nonlinear else beam_curved_lin
    u = _random_state(model, rng)
    x_c = 0.037
    old = kernels.get_backend()
    try:
        kernels.set_backend("numba")
        f_nb, k_nb = model.force_and_tangent(u, x_c)
        e_nb = model.strain_energy(u, x_c)
        kernels.set_backend("numpy")
        f_np, k_np = model.force_and_tangent(u, x_c)
        e_np = model.strain_energy(u, x_c)
    finally:
        kernels.set_backend(old)
    f_scale = np.max(np.abs(f_nb))
    k_scale = np.max(np.abs(k_nb))
    assert np.max(np.abs(f_nb - f_np)) < 1e-12 * f_scale
    assert np.max(np.abs(k_nb - k_np)) < 1e-12 * k_scale
    assert abs(e_nb - e_np) < 1e-12 * max(abs(e_nb), 1.0)


def test_force_matches_force_and_tangent(beam_curved_nl, rng):
    u = _random_state(beam_curved_nl, rng)
    f1 = beam_curved_nl.internal_force(u, 0.02)
    f2, _ = beam_curved_nl.force_and_tangent(u, 0.02)
    np.testing.assert_allclose(f1, f2, rtol=1e-13)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_env_flag_disables_numba():
    code = (
        "import os; os.environ['THERMROM_NUMBA'] = '0';"
        "from thermrom import kernels;"
        "print(kernels.get_backend())"
    )
    out = subprocess.run([sys.executable, "-c", code],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_energy_gradient_is_force(beam_curved_nl, rng):
    # directional derivative of the strain energy equals the internal force
    model = beam_curved_nl
    u = _random_state(model, rng)
    du = rng.standard_normal(model.dof_count)
    du /= np.linalg.norm(du)
    h = 1e-7
    de = (model.strain_energy(u + h * du, 0.04)
          - model.strain_energy(u - h * du, 0.04)) / (2.0 * h)
    f = model.internal_force(u, 0.04)
    assert abs(de - f @ du) < 1e-5 * max(abs(de), 1e-12)


def test_energy_gradient_is_force_linear_mode(beam_curved_lin, rng):
    model = beam_curved_lin
    u = _random_state(model, rng)
    du = rng.standard_normal(model.dof_count)
    du /= np.linalg.norm(du)
    h = 1e-7
    de = (model.strain_energy(u + h * du, 0.04)
          - model.strain_energy(u - h * du, 0.04)) / (2.0 * h)
    f = model.internal_force(u, 0.04)
    assert abs(de - f @ du) < 1e-5 * max(abs(de), 1e-12)


def test_numpy_backend_runs_scenario_end_to_end(tmp_path):
    # the fallback path drives the whole pipeline, not just single calls
    from thermrom.scenarios import ScenarioConfig, run_scenario

    old = kernels.get_backend()
    try:
        kernels.set_backend("numpy")
        cfg = ScenarioConfig(scenario="curved-nonlinear", method="mms-o1",
                             eps=5e-3, cycles=1, steps_per_cycle=20,
                             n_elements=12, db_points=5, k_modes=2, seed=3)
        bundle = run_scenario(cfg, out_dir=tmp_path)
        assert np.isfinite(bundle.errors["mms-o1"]["E_uniform"])
    finally:
        kernels.set_backend(old)
