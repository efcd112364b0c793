import numpy as np
import pytest
from scipy.linalg import expm

from couette_lab.base import SolverConfig
from couette_lab.exceptions import InadmissibleParametersError, IntegrationError
from couette_lab.integrator import (
    LinearSystem,
    fundamental_matrix_picard,
    integrate,
    solution_operator,
)
from couette_lab.modes.inviscid import symmetrized_system
from couette_lab.symbols import Frequency

pytestmark = pytest.mark.unit

ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=np.complex128)


def rotation_system(**kwargs) -> LinearSystem:
    return LinearSystem(dim=2, matrix_fn=lambda t: ROTATION, **kwargs)


def test_harmonic_oscillator():
    traj = integrate(rotation_system(), [1.0, 0.0], 0.0, 10.0, 1e-10)
    t = traj.times
    assert t[0] == 0.0 and t[-1] == 10.0
    assert np.all(np.diff(t) > 0)
    expected = np.stack([np.cos(t), -np.sin(t)], axis=1)
    assert np.max(np.abs(traj.states - expected)) < 1e-7
    assert traj.stats.accepted == len(traj.step_times) - 1
    assert traj.stats.max_error <= 1.0


def test_forced_decay():
    sys = LinearSystem(
        dim=2,
        matrix_fn=lambda t: np.diag([-1.0, -2.0]).astype(np.complex128),
        forcing_fn=lambda t: np.array([1.0, 0.0], dtype=np.complex128),
    )
    times = np.linspace(0.0, 5.0, 11)
    traj = integrate(sys, [3.0, 1.0], 0.0, 5.0, 1e-10, sample_times=times)
    assert np.array_equal(traj.times, times)
    assert np.allclose(traj.states[:, 0], 1.0 + 2.0 * np.exp(-times), atol=1e-8)
    assert np.allclose(traj.states[:, 1], np.exp(-2.0 * times), atol=1e-8)


def test_sample_times_do_not_change_steps():
    plain = integrate(rotation_system(), [1.0, 0.0], 0.0, 20.0, 1e-8)
    sampled = integrate(rotation_system(), [1.0, 0.0], 0.0, 20.0, 1e-8, sample_times=np.linspace(0, 20, 37))
    assert np.array_equal(plain.step_times, sampled.step_times)
    assert len(sampled) == 37


def test_dense_evaluation():
    traj = integrate(rotation_system(), [1.0, 0.0], 0.0, 6.0, 1e-10, keep_dense=True)
    assert traj.has_dense
    ts = np.array([0.0, 0.3, 2.7, 6.0])
    values = traj.evaluate(ts)
    assert np.allclose(values[:, 0], np.cos(ts), atol=1e-7)
    assert np.allclose(values[:, 1], -np.sin(ts), atol=1e-7)
    with pytest.raises(InadmissibleParametersError):
        traj.evaluate([7.0])


def test_evaluate_requires_dense():
    traj = integrate(rotation_system(), [1.0, 0.0], 0.0, 1.0)
    with pytest.raises(InadmissibleParametersError):
        traj.evaluate([0.5])


def test_step_cap_follows_hint():
    sys = rotation_system(stiffness_hint=lambda t: 100.0)
    traj = integrate(sys, [1.0, 0.0], 0.0, 1.0)
    # c_osc / hint = 0.002
    assert traj.stats.accepted >= 500


@pytest.mark.parametrize(
    "kwargs",
    [
        {"t0": 1.0, "t1": 1.0},
        {"t0": 0.0, "t1": 1.0, "sample_times": [2.0]},
        {"t0": 0.0, "t1": 1.0, "rel_tol": 0.0},
    ],
)
def test_integrate_rejects(kwargs):
    with pytest.raises(InadmissibleParametersError):
        integrate(rotation_system(), [1.0, 0.0], **kwargs)


def test_bad_dimension():
    with pytest.raises(InadmissibleParametersError):
        LinearSystem(dim=5, matrix_fn=lambda t: np.eye(5))
    with pytest.raises(InadmissibleParametersError):
        integrate(rotation_system(), [1.0, 0.0, 0.0], 0.0, 1.0)


def test_step_budget():
    config = SolverConfig(max_steps=5)
    with pytest.raises(IntegrationError) as exc:
        integrate(rotation_system(), [1.0, 0.0], 0.0, 100.0, config=config)
    assert exc.value.code == "integration"
    assert exc.value.t < 100.0
    assert "t" in exc.value.details and "h" in exc.value.details


def test_picard_matches_matrix_exponential():
    result = fundamental_matrix_picard(rotation_system(), 0.0, 2.0, n_terms=30)
    assert np.max(np.abs(result.matrix - expm(2.0 * ROTATION))) < 1e-9
    assert result.last_term_norm < 1e-15


def test_picard_trivial_cases():
    assert np.array_equal(fundamental_matrix_picard(rotation_system(), 1.0, 1.0, 5).matrix, np.eye(2))
    forced = rotation_system(forcing_fn=lambda t: np.zeros(2, dtype=np.complex128))
    with pytest.raises(InadmissibleParametersError):
        fundamental_matrix_picard(forced, 0.0, 1.0, 5)


def test_solution_operator():
    phi = solution_operator(rotation_system(), 0.0, 3.0, 1e-10)
    assert np.max(np.abs(phi - expm(3.0 * ROTATION))) < 1e-7
    back = solution_operator(rotation_system(), 3.0, 0.0, 1e-10)
    assert np.max(np.abs(back @ phi - np.eye(2))) < 1e-7

    diag = LinearSystem(dim=3, matrix_fn=lambda t: np.diag([-1.0, -2.0, -3.0]).astype(np.complex128))
    phi3 = solution_operator(diag, 0.0, 1.0, 1e-10)
    assert np.allclose(phi3, np.diag(np.exp([-1.0, -2.0, -3.0])), atol=1e-8)


def test_tighter_tolerance_never_increases_error():
    sys = symmetrized_system(Frequency(1, 2.0), 1.0)
    oracle = fundamental_matrix_picard(sys, 0.0, 4.0, n_terms=100, quad_points=20, panels=8)
    assert oracle.last_term_norm < 1e-12
    errors = [
        float(np.max(np.abs(solution_operator(sys, 0.0, 4.0, rtol) - oracle.matrix)))
        for rtol in (1e-6, 5e-7, 2.5e-7)
    ]
    assert errors[0] < 1e-4
    assert all(b <= a for a, b in zip(errors, errors[1:])), errors
