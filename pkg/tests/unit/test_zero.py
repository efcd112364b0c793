import numpy as np
import pytest

from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.modes.zero import (
    ZeroModeState,
    aggregate_El,
    energy_El,
    energy_El_aux,
    evolve_zero,
    good_unknown_residual,
    heat_profile,
    rhs_zero,
    zero_grid,
    zero_mode_matrix,
)
from couette_lab.symbols import FluidParams

pytestmark = pytest.mark.unit


def test_grid_excludes_zero():
    etas = zero_grid(1.0, 0.25)
    assert etas.tolist() == [-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0]
    assert zero_grid(6.0, 0.01).size == 1200
    with pytest.raises(InadmissibleParametersError):
        zero_grid(0.1, 0.5)


def test_state_rejects_zero_eta():
    with pytest.raises(InadmissibleParametersError):
        ZeroModeState(1.0, 0.0, 0.0, 0.0)
    assert ZeroModeState(0.0, 2j, 0.0, 2.0).v0y == pytest.approx(1.0)


def test_rhs_and_batched_matrix():
    params = FluidParams(2.0, 1e-2, 1e-3)
    state = ZeroModeState(1.0, 2.0, 3.0, 1.5)
    d = rhs_zero(0.0, state, params)
    assert d[0] == pytest.approx(-2.0)
    assert d[1] == pytest.approx(1.5**2 / 4.0 - params.mu * 1.5**2 * 2.0)
    assert d[2] == pytest.approx(2.0 - 1e-2 * 1.5**2 * 3.0)
    assert zero_mode_matrix(np.array([1.0, 2.0, 3.0]), params).shape == (3, 3, 3)


def test_identity_at_time_zero():
    etas = zero_grid(2.0, 0.5)
    states = np.arange(etas.size * 3, dtype=np.complex128).reshape(-1, 3)
    run = evolve_zero(etas, states, FluidParams(1.0, 1e-2), [0.0, 1.0])
    assert np.allclose(run.states[0], states)
    assert run.states.shape == (2, etas.size, 3)


def test_inviscid_invariants():
    params = FluidParams(1.5)
    etas = np.array([-2.0, 0.5, 3.0])
    rng = np.random.default_rng(3)
    states = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    run = evolve_zero(etas, states, params, np.linspace(0.0, 20.0, 9))
    wave = np.abs(run.alpha) ** 2 + etas**2 * np.abs(run.rho) ** 2 / params.mach**2
    assert np.allclose(wave, wave[0], rtol=1e-10)
    assert np.allclose(run.good(), run.good()[0], atol=1e-10)


def test_good_unknown_residual_small():
    params = FluidParams(1.0, 1e-2, 5e-3)
    etas = zero_grid(3.0, 0.1)
    rng = np.random.default_rng(5)
    states = rng.normal(size=(etas.size, 3)) + 1j * rng.normal(size=(etas.size, 3))
    run = evolve_zero(etas, states, params, [0.0, 5.0, 50.0])
    assert good_unknown_residual(run) < 1e-10


def test_heat_profile_keeps_good_unknown_zero():
    params = FluidParams(1.0, 1e-2)
    etas = zero_grid(6.0, 0.05)
    run = evolve_zero(etas, heat_profile(etas, params), params, [0.0, 100.0])
    assert np.max(np.abs(run.good())) < 1e-10


def test_evolve_zero_rejects():
    params = FluidParams(1.0, 1e-2)
    with pytest.raises(InadmissibleParametersError):
        evolve_zero([0.0, 1.0], np.zeros((2, 3)), params, [0.0])
    with pytest.raises(InadmissibleParametersError):
        evolve_zero([1.0], np.zeros((2, 3)), params, [0.0])
    with pytest.raises(InadmissibleParametersError):
        evolve_zero([1.0], np.zeros((1, 3)), params, [-1.0])


def test_energies():
    params = FluidParams(1.0, 1e-2)
    etas = zero_grid(1.0, 0.5)
    run = evolve_zero(etas, heat_profile(etas, params), params, [0.0, 10.0])
    e0 = energy_El(run, 0)
    assert e0.shape == (2, etas.size)
    agg = aggregate_El(run, 1, 0.5)
    assert agg == pytest.approx(run.aggregate(1, 0.5))
    assert np.all(energy_El_aux(run, 1) > 0)
    with pytest.raises(InadmissibleParametersError):
        energy_El(run, -1)


def test_aggregate_is_trapezoid_per_branch():
    params = FluidParams(1.0, 1e-2)
    d = 0.25
    etas = zero_grid(2.0, d)
    run = evolve_zero(etas, heat_profile(etas, params), params, [0.0, 5.0])
    e = energy_El(run, 1)
    neg, pos = etas < 0, etas > 0
    # the slab [-d, d] around the excluded eta = 0 node adds d/2 to each inner node
    expected = (
        np.trapezoid(e[:, neg], etas[neg], axis=1)
        + np.trapezoid(e[:, pos], etas[pos], axis=1)
        + 0.5 * d * (e[:, etas == -d][:, 0] + e[:, etas == d][:, 0])
    )
    assert aggregate_El(run, 1, d) == pytest.approx(expected, rel=1e-12)
    assert aggregate_El(run, 1, d) < e.sum(axis=1) * d
