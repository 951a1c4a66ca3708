"""Seeded perturbation loading: determinism, normalization, spectrum."""

import numpy as np
import pytest

from thermrom.errors import ContractError
from thermrom.forcing import lowpass_filter, make_perturbation


@pytest.fixture(scope="module")
def setup(beam_curved_nl):
    from thermrom.spectral import solve_equilibrium, vibration_modes

    model = beam_curved_nl
    u = solve_equilibrium(model, 0.05)
    omega, phi = vibration_modes(model, u, 0.05, 5)
    l0 = model.uniform_transverse_load(1e3)
    times = 2e-6 * np.arange(2001)
    return model, l0, phi, omega, times


def test_same_seed_bit_identical(setup):
    model, l0, phi, omega, times = setup
    a = make_perturbation(l0, phi, omega[2], times, 99, 1.0e4, mass=model.mass())
    b = make_perturbation(l0, phi, omega[2], times, 99, 1.0e4, mass=model.mass())
    assert a.l1.tobytes() == b.l1.tobytes()
    assert a.amplitude.tobytes() == b.amplitude.tobytes()


def test_different_seed_differs(setup):
    model, l0, phi, omega, times = setup
    a = make_perturbation(l0, phi, omega[2], times, 1, 1.0e4, mass=model.mass())
    b = make_perturbation(l0, phi, omega[2], times, 2, 1.0e4, mass=model.mass())
    assert not np.array_equal(a.l1, b.l1)


def test_norm_equality(setup):
    model, l0, phi, omega, times = setup
    f = make_perturbation(l0, phi, omega[2], times, 7, 1.0e4, mass=model.mass())
    assert np.linalg.norm(f.l1) == pytest.approx(np.linalg.norm(l0), rel=1e-12)


def test_shape_in_mass_weighted_mode_span(setup):
    model, l0, phi, omega, times = setup
    f = make_perturbation(l0, phi, omega[2], times, 7, 1.0e4, mass=model.mass())
    # consistent load of a mode-combination field: M @ span(phi)
    basis = model.mass() @ phi
    coeffs, *_ = np.linalg.lstsq(basis, f.l1, rcond=None)
    assert np.linalg.norm(basis @ coeffs - f.l1) <= 1e-10 * np.linalg.norm(f.l1)
    # mass weighting keeps the excitation confined to the combined modes
    other = np.linalg.norm(f.l1 @ phi) / np.linalg.norm(f.l1)
    assert other > 0.0


def test_amplitude_range_and_spectrum(setup):
    model, l0, phi, omega, times = setup
    f = make_perturbation(l0, phi, omega[2], times, 11, 1.0e4, mass=model.mass())
    a = f.amplitude
    assert a.min() == pytest.approx(0.0, abs=1e-15)
    assert a.max() == pytest.approx(1.0, rel=1e-12)
    # discrete power above the cutoff is negligible (transform oracle)
    dt = times[1] - times[0]
    spectrum = np.fft.rfft(a)
    freqs = 2.0 * np.pi * np.fft.rfftfreq(a.size, d=dt)
    power_above = np.sum(np.abs(spectrum[freqs > f.cutoff]) ** 2)
    assert power_above <= 1e-10 * np.sum(np.abs(spectrum) ** 2)


def test_lowpass_fullband_identity():
    rng = np.random.default_rng(0)
    x = rng.uniform(size=257)
    y = lowpass_filter(x, 1e-3, np.inf)
    np.testing.assert_allclose(y, x, atol=1e-12)


def test_amplitude_lookup_requires_grid_time(setup):
    model, l0, phi, omega, times = setup
    f = make_perturbation(l0, phi, omega[2], times, 3, 1.0e4, mass=model.mass())
    assert f.amplitude_at(times[5]) == f.amplitude[5]
    with pytest.raises(ContractError):
        f.amplitude_at(times[5] + 0.3 * (times[1] - times[0]))


def test_full_load_composition(setup):
    model, l0, phi, omega, times = setup
    f = make_perturbation(l0, phi, omega[2], times, 3, 1.0e4, mass=model.mass())
    t = times[10]
    eps = 1e-3
    expected = l0 * np.sin(1.0e4 * t) + eps * f.l1 * f.amplitude[10]
    np.testing.assert_allclose(f.full_load(t, eps), expected, rtol=1e-12)
