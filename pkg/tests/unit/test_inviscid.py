import math

import numpy as np
import pytest

from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.harness.fitting import fit_power_law
from couette_lab.integrator import LinearSystem, integrate
from couette_lab.modes.inviscid import (
    InviscidInit,
    SymmetrizerCoeffs,
    det_defect,
    energy_symmetrized,
    energy_reference,
    gamma_curve,
    matrix_L,
    mode_displacement,
    mode_system,
    perturb_generic,
    perturb_generic_detailed,
    phase_rhs,
    rhs_inviscid,
    solve_mode,
    sym_to_weights,
    vector_F,
    weights_to_sym,
    wkb_envelope,
)
from couette_lab.symbols import Frequency, p

pytestmark = pytest.mark.unit

REFERENCE = Frequency(3, 21.0)


def test_from_xi():
    init = InviscidInit.from_xi(20, 50, 5)
    assert init.Omega_in == -15
    assert init.Xi_in == 5
    assert init.size == 50


def test_rhs_matches_system():
    init = InviscidInit.from_xi(1 + 1j, 2.0, 3.0)
    sys = mode_system(REFERENCE, 2.0, init.Xi_in)
    state = np.array([init.R_in, init.A_in])
    for t in (0.0, 6.5, 40.0):
        assert np.allclose(sys.rhs(t, state), rhs_inviscid(t, state, REFERENCE, 2.0, init.Xi_in))


def test_symmetrizer():
    for t in (0.0, 7.0, 100.0):
        assert np.trace(matrix_L(t, REFERENCE, 1.0)) == pytest.approx(0.0, abs=1e-15)
    Z1, Z2 = weights_to_sym(2.0, 3.0, 4.0, REFERENCE, 1.5)
    R, A = sym_to_weights(Z1, Z2, 4.0, REFERENCE, 1.5)
    assert complex(R) == pytest.approx(2.0)
    assert complex(A) == pytest.approx(3.0)
    assert vector_F(7.0, REFERENCE)[1] == pytest.approx(-2.0 * 9 / 9**1.75)


def test_energy_coercive():
    # |a| / beta_s <= 1/12 at M = 1, k = 3
    rng = np.random.default_rng(1)
    for t in np.linspace(0.0, 30.0, 16):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        e = energy_symmetrized((z[0], z[1]), t, REFERENCE, 1.0)
        ref = energy_reference((z[0], z[1]), t, REFERENCE, 1.0)
        assert 11 / 12 * ref <= e <= 13 / 12 * ref


def test_coefficients_and_phase():
    c = SymmetrizerCoeffs.at(7.0, REFERENCE, 1.0)
    assert c.a == 0.0
    assert c.b == pytest.approx(3.0)
    assert c.d == pytest.approx(3.0 + 2 * 9 / 27)
    assert c.zeta == pytest.approx(math.sqrt(c.d / c.b))
    assert phase_rhs(0.0, 7.0, REFERENCE, 1.0) == pytest.approx(c.d)
    assert phase_rhs(math.pi / 2, 7.0, REFERENCE, 1.0) == pytest.approx(c.b)
    assert wkb_envelope(7.0, REFERENCE) == pytest.approx(math.sqrt(3.0))


def test_solve_mode_matches_symmetrized_system():
    f = Frequency(1, 2.0)
    M = 1.0
    init = InviscidInit.from_xi(1.0, 0.5, 2.0)
    times = np.array([0.0, 5.0, 10.0, 20.0])
    run = solve_mode(init, f, M, 20.0, 1e-10, times)

    sym = LinearSystem(
        dim=2,
        matrix_fn=lambda t: matrix_L(t, f, M).astype(np.complex128),
        forcing_fn=lambda t: vector_F(t, f).astype(np.complex128) * init.Xi_in,
    )
    z0 = np.array([complex(z) for z in weights_to_sym(init.R_in, init.A_in, 0.0, f, M)])
    traj = integrate(sym, z0, 0.0, 20.0, 1e-10, sample_times=times)
    Z1, Z2 = run.sym()
    assert np.allclose(Z1, traj.states[:, 0], atol=1e-7)
    assert np.allclose(Z2, traj.states[:, 1], atol=1e-7)
    assert run.conservation_defect() <= 1e-15


def test_zero_data_stays_zero():
    run = solve_mode(InviscidInit(), REFERENCE, 1.0, 10.0)
    assert np.all(run.R == 0) and np.all(run.A == 0)


def test_solve_mode_rejects():
    with pytest.raises(InadmissibleParametersError):
        solve_mode(InviscidInit(), REFERENCE, 1.0, 0.0)
    with pytest.raises(InadmissibleParametersError):
        solve_mode(InviscidInit(), REFERENCE, 0.0, 1.0)


def test_fundamental_matrix_has_unit_determinant():
    assert det_defect(REFERENCE, 5.0, 30.0) < 1e-5


def test_gamma_curve_reconstructs_solution():
    f = Frequency(1, 2.0)
    M = 1.0
    init = InviscidInit.from_xi(1.0, 0.5, 2.0)
    curve = gamma_curve(init, f, M, 20.0, tail_target=1e-2)
    assert curve.times[0] == 0.0 and curve.times[-1] >= 20.0
    assert np.allclose(curve.values[0], curve.z_in)

    times = np.array([5.0, 10.0, 20.0])
    run = solve_mode(init, f, M, 20.0, 1e-10, times)
    Z1, Z2 = run.sym()
    z = curve.z_at(times)
    assert np.allclose(z[:, 0], Z1, atol=1e-5)
    assert np.allclose(z[:, 1], Z2, atol=1e-5)


def test_gamma_without_forcing_is_constant():
    init = InviscidInit(1.0, 2.0, -1.0)
    curve = gamma_curve(init, REFERENCE, 1.0, 10.0)
    assert curve.tail_bound == 0.0
    assert np.array_equal(curve.limit, curve.z_in)


def test_mode_displacement():
    a = InviscidInit(1.0, 0.0, 0.0)
    assert mode_displacement(a, a, REFERENCE) == 0.0
    assert mode_displacement(a, InviscidInit(), REFERENCE) == pytest.approx(1.0)


def test_perturb_zero_data_uses_alpha_shift():
    f = Frequency(1, 0.5)
    eps = 1e-3
    result = perturb_generic_detailed(InviscidInit(), f, 1.0, eps, 10.0)
    bound = eps * math.exp(-f.p0)
    assert result.alpha_shift
    assert result.direction is None
    assert result.bound == pytest.approx(bound)
    assert result.inf_gamma == pytest.approx(bound)
    assert result.passed
    assert result.init.Xi_in == 0
    assert result.init.A_in == pytest.approx(eps * f.p0**0.75 * math.exp(-f.p0))
    assert result.displacement <= 2 * eps


def test_perturb_generic_rejects_bad_eps():
    with pytest.raises(InadmissibleParametersError):
        perturb_generic(InviscidInit(), REFERENCE, 1.0, 0.0, 10.0)


def test_sqrt_p_weighted_norm_grows_without_forcing():
    times = np.geomspace(50.0, 500.0, 400)
    run = solve_mode(InviscidInit.from_xi(1.0, 1.0, 0.0), REFERENCE, 50.0, 500.0, sample_times=times)
    growth = np.sqrt(p(times, REFERENCE)) * run.z_norm() ** 2
    assert fit_power_law(times, growth, (50.0, 500.0), quantity="sqrt(p)|Z|^2").fitted >= 0.9


@pytest.mark.slow
@pytest.mark.parametrize("mach", [5.0, 50.0])
def test_band_ratio_settles_by_horizon_500(mach):
    times = np.linspace(0.0, 1000.0, 20_001)
    run = solve_mode(InviscidInit.from_xi(0.3 + 1j, -0.7, 0.0), Frequency(2, 7.5), mach, 1000.0, sample_times=times)
    zn = run.z_norm()
    half = times <= 500.0
    assert zn.max() / zn.min() == pytest.approx(zn[half].max() / zn[half].min(), rel=0.05)
