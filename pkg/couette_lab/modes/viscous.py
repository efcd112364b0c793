"""Per-mode viscous dynamics, the good unknown and the weighted energies.

    R' = -A
    A' = (p'/p) A - mu p A + (p/M^2) R - (2k^2/p) Omega
    Omega' = A - nu p Omega

Energies are observables evaluated along trajectories of this system; the
weights never feed back into the dynamics.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from couette_lab.base import SolverConfig
from couette_lab.constants import WeightScheme
from couette_lab.exceptions import InadmissibleParametersError, QuadratureError
from couette_lab.integrator import LinearSystem, StepStats, Trajectory, integrate
from couette_lab.symbols import (
    FluidParams,
    Frequency,
    L_nu,
    WeightParams,
    dt_p,
    mult_m,
    mult_w,
    p,
)
from couette_lab.types import ComplexArray, RealArray, RealLike

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ViscousState:
    """(R, A, Omega) of one mode."""

    R_hat: complex = 0j
    A_hat: complex = 0j
    Omega_hat: complex = 0j

    @property
    def Xi_hat(self) -> complex:
        return self.R_hat + self.Omega_hat

    @property
    def size(self) -> float:
        return max(abs(self.R_hat), abs(self.A_hat), abs(self.Omega_hat))

    def as_array(self) -> ComplexArray:
        return np.array([self.R_hat, self.A_hat, self.Omega_hat], dtype=np.complex128)

    def to_good(self, params: FluidParams) -> GoodState:
        g = self.R_hat + self.Omega_hat - params.shear_visc * params.mach**2 * self.A_hat
        return GoodState(self.R_hat, self.A_hat, g)


@dataclass(frozen=True)
class GoodState:
    """(R, A, G) with the good unknown G = Xi - nu M^2 A."""

    R_hat: complex = 0j
    A_hat: complex = 0j
    G_hat: complex = 0j

    def as_array(self) -> ComplexArray:
        return np.array([self.R_hat, self.A_hat, self.G_hat], dtype=np.complex128)

    def to_viscous(self, params: FluidParams) -> ViscousState:
        omega = self.G_hat + params.shear_visc * params.mach**2 * self.A_hat - self.R_hat
        return ViscousState(self.R_hat, self.A_hat, omega)


@dataclass
class WeightedTriple:
    """Weighted variables (Z1, Z2, Z3) of one scheme; scalars or arrays."""

    Z1: complex | ComplexArray
    Z2: complex | ComplexArray
    Z3: complex | ComplexArray
    scheme: str


def _viscous_matrix(t: float, f: Frequency, params: FluidParams) -> ComplexArray:
    k2 = f.k**2
    pv = k2 + (f.eta - f.k * t) ** 2
    dp = -2.0 * f.k * (f.eta - f.k * t)
    return np.array(
        [
            [0.0, -1.0, 0.0],
            [pv / params.mach**2, dp / pv - params.mu * pv, -2.0 * k2 / pv],
            [0.0, 1.0, -params.shear_visc * pv],
        ],
        dtype=np.complex128,
    )


def _good_matrix(t: float, f: Frequency, params: FluidParams) -> ComplexArray:
    k2 = f.k**2
    M2 = params.mach**2
    nu, mu = params.shear_visc, params.mu
    pv = k2 + (f.eta - f.k * t) ** 2
    dp = -2.0 * f.k * (f.eta - f.k * t)
    q = k2 / pv
    return np.array(
        [
            [0.0, -1.0, 0.0],
            [pv / M2 + 2.0 * q, dp / pv - mu * pv - 2.0 * nu * M2 * q, -2.0 * q],
            [
                -2.0 * nu * M2 * q,
                nu * (mu - nu) * M2 * pv - nu * M2 * dp / pv + 2.0 * nu**2 * M2**2 * q,
                -nu * pv + 2.0 * nu * M2 * q,
            ],
        ],
        dtype=np.complex128,
    )


def rhs_viscous(
    t: float,
    state: ViscousState | ComplexArray,
    f: Frequency,
    params: FluidParams,
) -> ComplexArray:
    """(dR, dA, dOmega)."""
    z = state.as_array() if isinstance(state, ViscousState) else np.asarray(state, dtype=np.complex128)
    return _viscous_matrix(t, f, params) @ z


def rhs_good(
    t: float,
    state: GoodState | ComplexArray,
    f: Frequency,
    params: FluidParams,
) -> ComplexArray:
    """(dR, dA, dG) with Omega eliminated through Omega = G + nu M^2 A - R."""
    z = state.as_array() if isinstance(state, GoodState) else np.asarray(state, dtype=np.complex128)
    return _good_matrix(t, f, params) @ z


def _hint(f: Frequency, params: FluidParams):
    k2 = f.k**2
    return lambda t: math.sqrt(k2 + (f.eta - f.k * t) ** 2) / params.mach


def viscous_system(f: Frequency, params: FluidParams) -> LinearSystem:
    return LinearSystem(dim=3, matrix_fn=lambda t: _viscous_matrix(t, f, params), stiffness_hint=_hint(f, params))


def good_system(f: Frequency, params: FluidParams) -> LinearSystem:
    return LinearSystem(dim=3, matrix_fn=lambda t: _good_matrix(t, f, params), stiffness_hint=_hint(f, params))


def reduced_system(f: Frequency, params: FluidParams, Xi: complex) -> LinearSystem:
    """The nu = 0 system on (R, A) with Omega = Xi - R and lambda-damping."""
    if params.shear_visc != 0:
        raise InadmissibleParametersError("reduced system requires nu = 0", code="viscous")
    k2 = f.k**2
    lam = params.bulk_visc
    M = params.mach

    def matrix(t: float) -> ComplexArray:
        pv = k2 + (f.eta - f.k * t) ** 2
        dp = -2.0 * f.k * (f.eta - f.k * t)
        return np.array([[0.0, -1.0], [pv / M**2 + 2.0 * k2 / pv, dp / pv - lam * pv]], dtype=np.complex128)

    def forcing(t: float) -> ComplexArray:
        pv = k2 + (f.eta - f.k * t) ** 2
        return np.array([0.0, -(2.0 * k2 / pv) * Xi], dtype=np.complex128)

    return LinearSystem(
        dim=2,
        matrix_fn=matrix,
        forcing_fn=forcing if Xi != 0 else None,
        stiffness_hint=_hint(f, params),
    )


@dataclass
class ViscousRun:
    """Samples of one viscous mode.

    Attributes:
        frequency: The mode.
        params: Mach number and viscosities.
        init: Initial data.
        times: Sample times.
        R: Density coefficients.
        A: Divergence coefficients.
        Omega: Vorticity coefficients.
        stats: Integrator statistics.
    """

    frequency: Frequency
    params: FluidParams
    init: ViscousState
    times: RealArray
    R: ComplexArray
    A: ComplexArray
    Omega: ComplexArray
    stats: StepStats
    trajectory: Trajectory | None = field(default=None, repr=False)
    formulation: str = "viscous"

    def xi(self) -> ComplexArray:
        return self.R + self.Omega

    def good(self) -> ComplexArray:
        return self.R + self.Omega - self.params.shear_visc * self.params.mach**2 * self.A

    def weighted(
        self,
        scheme: str = WeightScheme.P_WEIGHT,
        s: float = 0.0,
        wp: WeightParams | None = None,
        w_exponent: float = 0.75,
    ) -> WeightedTriple:
        return weighted_triple(
            self.R, self.A, self.good(), self.times, self.frequency, self.params,
            scheme, s=s, wp=wp, w_exponent=w_exponent,
        )

    def energy(
        self,
        scheme: str = WeightScheme.P_WEIGHT,
        s: float = 0.0,
        wp: WeightParams | None = None,
        w_exponent: float = 0.75,
        delta: float = 1.0,
    ) -> RealArray:
        """Energy time series of the requested scheme."""
        triple = self.weighted(scheme, s=s, wp=wp, w_exponent=w_exponent)
        match scheme:
            case WeightScheme.P_WEIGHT:
                e = energy_E(triple, self.times, self.frequency, self.params, delta=delta)
            case WeightScheme.W_WEIGHT:
                e = energy_Ew(triple, self.times, self.frequency, self.params)
            case WeightScheme.TILDE_LAMBDA0:
                e = energy_E_tilde(triple, self.times, self.frequency, self.params, delta=delta)
            case _:
                raise InadmissibleParametersError(f"unknown weight scheme {scheme!r}", code="scheme")
        return np.atleast_1d(np.asarray(e, dtype=np.float64))

    def velocity(self) -> RealArray:
        """|v| of the mode: sqrt((|A|^2 + |Omega|^2) / p)."""
        pv = np.asarray(p(self.times, self.frequency))
        return np.sqrt((np.abs(self.A) ** 2 + np.abs(self.Omega) ** 2) / pv)


def weighted_triple(
    R: ComplexArray | complex,
    A: ComplexArray | complex,
    G: ComplexArray | complex,
    t: RealLike,
    f: Frequency,
    params: FluidParams,
    scheme: str,
    *,
    s: float = 0.0,
    wp: WeightParams | None = None,
    w_exponent: float = 0.75,
) -> WeightedTriple:
    """Weighted variables of one scheme.

    P_WEIGHT:      <k,eta>^s m^-1 (p^-1/4 R / M, p^-3/4 A, p^-3/4 G)
    W_WEIGHT:      <k,eta>^s m^-1 w^-e (p^1/2 R / M, A, G), e = w_exponent
    TILDE_LAMBDA0: P_WEIGHT with the third entry <k,eta>^s m^-1 G

    Raises:
        InadmissibleParametersError: If nu = 0, on an unknown scheme, or for
            TILDE_LAMBDA0 with lambda != 0.
    """
    nu = params.shear_visc
    if not nu > 0:
        raise InadmissibleParametersError("weighted variables need nu > 0", code="weights")
    M = params.mach
    pv = np.asarray(p(t, f))
    pre = f.bracket**s / np.asarray(mult_m(t, f, nu))
    R, A, G = np.asarray(R), np.asarray(A), np.asarray(G)
    match scheme:
        case WeightScheme.P_WEIGHT:
            return WeightedTriple(pre * pv**-0.25 * R / M, pre * pv**-0.75 * A, pre * pv**-0.75 * G, scheme)
        case WeightScheme.W_WEIGHT:
            w = np.asarray(mult_w(t, f, nu, wp or WeightParams()))
            wpre = pre * w**-w_exponent
            return WeightedTriple(wpre * np.sqrt(pv) * R / M, wpre * A, wpre * G, scheme)
        case WeightScheme.TILDE_LAMBDA0:
            if params.bulk_visc != 0:
                raise InadmissibleParametersError("TILDE_LAMBDA0 scheme requires lambda = 0", code="weights")
            return WeightedTriple(pre * pv**-0.25 * R / M, pre * pv**-0.75 * A, pre * G, scheme)
        case _:
            raise InadmissibleParametersError(f"unknown weight scheme {scheme!r}", code="weights")


def default_gamma(params: FluidParams, delta: float = 1.0) -> float:
    """gamma = delta M nu^(1/3) / 4."""
    return delta * params.mach * params.shear_visc ** (1.0 / 3.0) / 4.0


def _functional(triple: WeightedTriple, t: RealLike, f: Frequency, M: float, gamma: float) -> RealLike:
    pv = np.asarray(p(t, f))
    dp = np.asarray(dt_p(t, f))
    Z1, Z2, Z3 = np.asarray(triple.Z1), np.asarray(triple.Z2), np.asarray(triple.Z3)
    cross = np.real(np.conj(Z1) * Z2)
    e = 0.5 * (
        (1.0 + M**2 * dp**2 / pv**3) * np.abs(Z1) ** 2
        + np.abs(Z2) ** 2
        + np.abs(Z3) ** 2
        + 0.5 * M * dp / pv**1.5 * cross
        - 2.0 * gamma * pv**-0.5 * cross
    )
    return float(e) if np.ndim(e) == 0 else e


def energy_bounds(triple: WeightedTriple, t: RealLike, f: Frequency, M: float) -> tuple[RealLike, RealLike]:
    """(lower, upper) coercivity bounds of the weighted energies.

    lower = (1/4)[(1 + M^2 p'^2/p^3)|Z1|^2 + |Z2|^2 + 2|Z3|^2]
    upper = (1 + M^2 p'^2/p^3)|Z1|^2 + |Z2|^2 + |Z3|^2
    """
    pv = np.asarray(p(t, f))
    dp = np.asarray(dt_p(t, f))
    a1 = (1.0 + M**2 * dp**2 / pv**3) * np.abs(np.asarray(triple.Z1)) ** 2
    a2 = np.abs(np.asarray(triple.Z2)) ** 2
    a3 = np.abs(np.asarray(triple.Z3)) ** 2
    return 0.25 * (a1 + a2 + 2.0 * a3), a1 + a2 + a3


def energy_E(
    triple: WeightedTriple,
    t: RealLike,
    f: Frequency,
    params: FluidParams,
    gamma: float | None = None,
    *,
    delta: float = 1.0,
) -> RealLike:
    """Energy of the P_WEIGHT variables.

    E = 1/2 [(1 + M^2 p'^2/p^3)|Z1|^2 + |Z2|^2 + |Z3|^2
             + (M/2)(p'/p^(3/2)) Re(conj(Z1) Z2) - 2 gamma p^(-1/2) Re(conj(Z1) Z2)]

    Raises:
        InadmissibleParametersError: On a different scheme or gamma outside (0, 1/4].
    """
    if triple.scheme != WeightScheme.P_WEIGHT:
        raise InadmissibleParametersError(f"energy_E needs P_WEIGHT variables, got {triple.scheme}", code="energy")
    gamma = default_gamma(params, delta) if gamma is None else gamma
    if not 0 < gamma <= 0.25:
        raise InadmissibleParametersError(f"gamma must lie in (0, 1/4], got {gamma}", code="energy")
    return _functional(triple, t, f, params.mach, gamma)


def energy_Ew(triple: WeightedTriple, t: RealLike, f: Frequency, params: FluidParams) -> RealLike:
    """Energy of the W_WEIGHT variables with cross coefficient -(M nu^(1/3)/2) p^(-1/2)."""
    if triple.scheme != WeightScheme.W_WEIGHT:
        raise InadmissibleParametersError(f"energy_Ew needs W_WEIGHT variables, got {triple.scheme}", code="energy")
    if not params.shear_visc > 0:
        raise InadmissibleParametersError("energy_Ew needs nu > 0", code="energy")
    return _functional(triple, t, f, params.mach, default_gamma(params))


def energy_E_tilde(
    triple: WeightedTriple,
    t: RealLike,
    f: Frequency,
    params: FluidParams,
    gamma: float | None = None,
    *,
    delta: float = 1.0,
) -> RealLike:
    """`energy_E` evaluated on the TILDE_LAMBDA0 variables."""
    if triple.scheme != WeightScheme.TILDE_LAMBDA0:
        raise InadmissibleParametersError(
            f"energy_E_tilde needs TILDE_LAMBDA0 variables, got {triple.scheme}", code="energy"
        )
    gamma = default_gamma(params, delta) if gamma is None else gamma
    if not 0 < gamma <= 0.25:
        raise InadmissibleParametersError(f"gamma must lie in (0, 1/4], got {gamma}", code="energy")
    return _functional(triple, t, f, params.mach, gamma)


def solve_viscous(
    init: ViscousState,
    f: Frequency,
    params: FluidParams,
    horizon: float,
    sample_times: RealArray | list[float] | None = None,
    config: SolverConfig | None = None,
    *,
    reduced: bool = False,
    keep_dense: bool = False,
) -> ViscousRun:
    """Integrate one viscous mode on [0, horizon].

    The absolute tolerance is config.decay_floor times the data size, so the
    error control stays relative while the solution decays.

    Args:
        init: Initial (R, A, Omega).
        f: Frequency.
        params: Mach number and viscosities (nu = lambda = 0 is accepted).
        horizon: End time (> 0).
        sample_times: Output times; default is every accepted step.
        config: Solver settings.
        reduced: Use the closed (R, A) system; requires nu = 0.
        keep_dense: Keep dense output (needed by `duhamel_xi`).

    Raises:
        InadmissibleParametersError: If horizon <= 0.
        IntegrationError: Propagated from the integrator.
    """
    config = config or SolverConfig()
    if not horizon > 0:
        raise InadmissibleParametersError(f"horizon must be > 0, got {horizon}", code="horizon")
    scale = init.size or 1.0
    atol = config.decay_floor * scale
    if reduced:
        xi = init.Xi_hat
        traj = integrate(
            reduced_system(f, params, xi), [init.R_hat, init.A_hat], 0.0, horizon,
            None, atol, sample_times, config=config, keep_dense=keep_dense,
        )
        R, A = traj.states[:, 0], traj.states[:, 1]
        omega = xi - R
        formulation = "reduced"
    else:
        traj = integrate(
            viscous_system(f, params), init.as_array(), 0.0, horizon,
            None, atol, sample_times, config=config, keep_dense=keep_dense,
        )
        R, A, omega = traj.states[:, 0], traj.states[:, 1], traj.states[:, 2]
        formulation = "viscous"
    logger.debug(
        "viscous mode k=%d eta=%g M=%g nu=%g lambda=%g: %d steps (%s)",
        f.k, f.eta, params.mach, params.shear_visc, params.bulk_visc, traj.stats.accepted, formulation,
    )
    return ViscousRun(
        frequency=f,
        params=params,
        init=init,
        times=traj.times,
        R=R,
        A=A,
        Omega=omega,
        stats=traj.stats,
        trajectory=traj if keep_dense else None,
        formulation=formulation,
    )


def solve_good(
    init: GoodState,
    f: Frequency,
    params: FluidParams,
    horizon: float,
    sample_times: RealArray | list[float] | None = None,
    config: SolverConfig | None = None,
) -> ViscousRun:
    """Integrate the (R, A, G) formulation; Omega is recovered as G + nu M^2 A - R."""
    config = config or SolverConfig()
    if not horizon > 0:
        raise InadmissibleParametersError(f"horizon must be > 0, got {horizon}", code="horizon")
    vs = init.to_viscous(params)
    traj = integrate(
        good_system(f, params), init.as_array(), 0.0, horizon,
        None, config.decay_floor * (vs.size or 1.0), sample_times, config=config,
    )
    R, A, G = traj.states[:, 0], traj.states[:, 1], traj.states[:, 2]
    return ViscousRun(
        frequency=f,
        params=params,
        init=vs,
        times=traj.times,
        R=R,
        A=A,
        Omega=G + params.shear_visc * params.mach**2 * A - R,
        stats=traj.stats,
        formulation="good",
    )


def duhamel_xi(run: ViscousRun, t: float, *, nodes: int = 8, tol: float = 1e-10, max_refinements: int = 4) -> complex:
    """Xi(t) = e^(-L(t)) Xi_in + nu int_0^t e^(-(L(t) - L(tau))) p(tau) R(tau) dtau.

    R is read from the run's dense output; each integrator step is one
    Gauss-Legendre panel, with node doubling until the relative change is
    below `tol`.

    Raises:
        InadmissibleParametersError: If the run has no dense output or t is out of range.
        QuadratureError: If the node doubling does not converge.
    """
    traj = run.trajectory
    if traj is None or not traj.has_dense:
        raise InadmissibleParametersError("duhamel_xi needs a run made with keep_dense=True", code="duhamel")
    if not 0.0 <= t <= traj.step_times[-1]:
        raise InadmissibleParametersError(f"t={t} outside the integrated range", code="duhamel")
    f = run.frequency
    nu = run.params.shear_visc
    L_t = float(L_nu(t, f, nu))
    free = math.exp(-L_t) * run.init.Xi_hat
    if t == 0.0 or nu == 0.0:
        return complex(free)

    edges = traj.step_times[traj.step_times < t]
    edges = np.append(edges, t)
    lo, hi = edges[:-1], edges[1:]

    def panels(n: int) -> complex:
        x, w = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (hi - lo)
        s = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
        R = traj.evaluate(s.ravel())[:, 0].reshape(s.shape)
        kernel = np.exp(-(L_t - np.asarray(L_nu(s, f, nu)))) * np.asarray(p(s, f))
        return complex(nu * np.sum((kernel * R) @ w * half))

    value = panels(nodes)
    for _ in range(max_refinements):
        nodes *= 2
        finer = panels(nodes)
        change = abs(finer - value)
        value = finer
        if change <= tol * (abs(value) + abs(free) + 1e-300):
            return complex(free + value)
    raise QuadratureError(
        f"duhamel quadrature did not converge at t={t}",
        code="duhamel",
        details={"k": f.k, "eta": f.eta, "nu": nu},
    )


def data_size(init: ViscousState, f: Frequency, params: FluidParams) -> float:
    """|R| sqrt(p(0)) / M + |A| + |Xi - nu M^2 A| at t = 0."""
    nu, M = params.shear_visc, params.mach
    return (
        abs(init.R_hat) * math.sqrt(f.p0) / M
        + abs(init.A_hat)
        + abs(init.Xi_hat - nu * M**2 * init.A_hat)
    )


def transient_amplitude(run: ViscousRun) -> float:
    """max_t (|v| + |R| / M) divided by `data_size` of the initial data."""
    size = data_size(run.init, run.frequency, run.params)
    if size == 0:
        return 0.0
    series = run.velocity() + np.abs(run.R) / run.params.mach
    return float(series.max() / size)
