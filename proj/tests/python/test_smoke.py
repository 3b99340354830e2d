import math

import numpy as np
import pytest

import epchain


def test_hamiltonian_matches_numpy_spectrum():
    spec = epchain.ModelSpec(sites=6, gamma=0.5)
    h = epchain.hamiltonian(spec)
    assert h.shape == (6, 6)
    assert h[0, 0] == 0.5j and h[5, 5] == -0.5j
    ours = epchain.eig(h)
    ref = np.sort_complex(np.linalg.eigvals(h))
    assert np.allclose(ours["eigenvalues"], ref, atol=1e-12)
    v = ours["vectors"]
    assert np.allclose(h @ v, v * ours["eigenvalues"], atol=1e-10)


def test_w_chain_boundary_is_one():
    spec = epchain.ModelSpec(sites=6)
    assert epchain.numeric_boundary(spec, 0.0) == pytest.approx(1.0, rel=1e-5)
    k, gamma = epchain.scattering_ep(6)
    assert gamma == pytest.approx(1.0, rel=1e-10)


def test_broken_phase_detection():
    assert not epchain.is_broken(epchain.ModelSpec(sites=6, gamma=0.9))
    spec = epchain.ModelSpec(sites=6, gamma=1.2)
    assert epchain.is_broken(spec)
    kappa, energy = epchain.broken_pair_kappa(6, 1.2)
    assert epchain.max_im_epsilon(spec) == pytest.approx(energy.imag, rel=1e-8)


def test_evolution_converges_to_w():
    spec = epchain.ModelSpec(sites=6, gamma=1.2)
    init = epchain.site_state(spec, 1)
    w = epchain.target_state("w", 6)
    trace = epchain.evolve(spec, init, w, 200.0, 400)
    f = trace["fidelities"]
    assert len(f) == 401 and trace["times"][-1] == pytest.approx(200.0)
    dom = epchain.dominant_state(spec)
    assert f[-1] == pytest.approx(abs(np.vdot(w, dom)), abs=1e-6)
    assert f[-1] > 0.9


def test_sweep_grid_shape():
    grid = epchain.sweep(epchain.ModelSpec(sites=4), "0:2:lin:3", "0.1:2:lin:4", threads=1)
    assert grid["max_im_eps"].shape == (3, 4)
    assert not grid["broken"][:, 0].any()
    assert grid["failures"] == 0


def test_epts_against_scan():
    g = epchain.epts_gamma(6, 10.0)
    assert g == pytest.approx(epchain.numeric_boundary(epchain.ModelSpec(sites=6, potential=10.0), 10.0), rel=1e-3)
    assert math.isfinite(epchain.perturbative_boundary(6, 10.0))


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        epchain.ModelSpec(sites=1)
    with pytest.raises(epchain.ConfigError):
        epchain.evolve(epchain.ModelSpec(sites=6), np.ones(5), np.ones(6), 1.0, 10)
    with pytest.raises(epchain.NoDominantState):
        epchain.dominant_state(epchain.ModelSpec(sites=6, gamma=0.5))
