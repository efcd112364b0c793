"""Per-mode inviscid dynamics in the moving frame.

Unknowns (R, A) with the conserved Xi = R + Omega:

    R' = -A
    A' = (p'/p) A + (p/M^2 + 2k^2/p) R - (2k^2/p) Xi

The symmetrized variables Z = (R / (M p^(1/4)), A / p^(3/4)) obey Z' = L Z + F Xi
with a trace-free L, so the homogeneous solution operator has det 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate

from couette_lab.base import SolverConfig
from couette_lab.constants import Defaults
from couette_lab.exceptions import (
    GenericityError,
    InadmissibleParametersError,
    QuadratureError,
)
from couette_lab.integrator import (
    LinearSystem,
    StepStats,
    Trajectory,
    fundamental_system,
    integrate,
    stacked_to_matrix,
)
from couette_lab.symbols import Frequency, dt_p, japanese_bracket, p
from couette_lab.types import ComplexArray, RealArray, RealLike

logger = logging.getLogger(__name__)


def _require_mach(M: float) -> None:
    if not (M > 0 and math.isfinite(M)):
        raise InadmissibleParametersError(f"mach must be > 0, got {M}", code="mach")


@dataclass(frozen=True)
class InviscidInit:
    """Initial data of one inviscid mode.

    Attributes:
        R_in: Density coefficient at t = 0.
        A_in: Divergence coefficient at t = 0.
        Omega_in: Vorticity coefficient at t = 0.
    """

    R_in: complex = 0j
    A_in: complex = 0j
    Omega_in: complex = 0j

    @classmethod
    def from_xi(cls, R_in: complex, A_in: complex, Xi_in: complex) -> InviscidInit:
        """Build data from (R, A, Xi); Omega is Xi - R."""
        return cls(complex(R_in), complex(A_in), complex(Xi_in) - complex(R_in))

    @property
    def Xi_in(self) -> complex:
        return self.R_in + self.Omega_in

    @property
    def size(self) -> float:
        """max(|R|, |A|, |Omega|), or 0 for zero data."""
        return max(abs(self.R_in), abs(self.A_in), abs(self.Omega_in))


@dataclass(frozen=True)
class SymState:
    """Symmetrized pair Z = (R / (M p^(1/4)), A / p^(3/4))."""

    Z1: complex
    Z2: complex

    def as_array(self) -> ComplexArray:
        return np.array([self.Z1, self.Z2], dtype=np.complex128)

    @property
    def norm(self) -> float:
        return math.hypot(abs(self.Z1), abs(self.Z2))


def weights_to_sym(
    R: complex | ComplexArray,
    A: complex | ComplexArray,
    t: RealLike,
    f: Frequency,
    M: float,
) -> tuple[ComplexArray, ComplexArray]:
    """(R, A) -> (Z1, Z2) at time(s) t."""
    pv = np.asarray(p(t, f))
    return np.asarray(R) / (M * pv**0.25), np.asarray(A) / pv**0.75


def sym_to_weights(
    Z1: complex | ComplexArray,
    Z2: complex | ComplexArray,
    t: RealLike,
    f: Frequency,
    M: float,
) -> tuple[ComplexArray, ComplexArray]:
    """(Z1, Z2) -> (R, A) at time(s) t."""
    pv = np.asarray(p(t, f))
    return np.asarray(Z1) * M * pv**0.25, np.asarray(Z2) * pv**0.75


@dataclass(frozen=True)
class SymmetrizerCoeffs:
    """Coefficients of the homogeneous energy.

    Attributes:
        a: p' / (4p).
        b: sqrt(p) / M.
        d: sqrt(p) / M + 2 M k^2 / p^(3/2).
        zeta: sqrt(d / b).
        beta_s: sqrt(b d).
    """

    a: float
    b: float
    d: float
    zeta: float
    beta_s: float

    @classmethod
    def at(cls, t: float, f: Frequency, M: float) -> SymmetrizerCoeffs:
        a, b, d, zeta, beta_s = _coeffs(t, f, M)
        return cls(float(a), float(b), float(d), float(zeta), float(beta_s))


def _coeffs(t: RealLike, f: Frequency, M: float) -> tuple[RealLike, ...]:
    pv = np.asarray(p(t, f))
    a = np.asarray(dt_p(t, f)) / (4.0 * pv)
    b = np.sqrt(pv) / M
    d = b + 2.0 * M * f.k**2 / pv**1.5
    return a, b, d, np.sqrt(d / b), np.sqrt(b * d)


def rhs_inviscid(
    t: float,
    state: tuple[complex, complex] | ComplexArray,
    f: Frequency,
    M: float,
    Xi_in: complex,
) -> ComplexArray:
    """(dR, dA) of the inviscid mode system."""
    R, A = state[0], state[1]
    pv = float(p(t, f))
    k2 = f.k**2
    dA = float(dt_p(t, f)) / pv * A + (pv / M**2 + 2.0 * k2 / pv) * R - (2.0 * k2 / pv) * Xi_in
    return np.array([-A, dA], dtype=np.complex128)


def matrix_L(t: float, f: Frequency, M: float) -> RealArray:
    """Trace-free matrix of the symmetrized system."""
    pv = float(p(t, f))
    a = float(dt_p(t, f)) / (4.0 * pv)
    b = math.sqrt(pv) / M
    return np.array(
        [[-a, -b], [b + 2.0 * M * f.k**2 / pv**1.5, a]],
        dtype=np.float64,
    )


def vector_F(t: RealLike, f: Frequency) -> RealArray:
    """Forcing (0, -2k^2 / p^(7/4)) of the symmetrized system; shape (..., 2)."""
    pv = np.asarray(p(t, f))
    out = np.zeros(pv.shape + (2,), dtype=np.float64)
    out[..., 1] = -2.0 * f.k**2 / pv**1.75
    return out


def mode_system(f: Frequency, M: float, Xi_in: complex) -> LinearSystem:
    """The (R, A) system as a LinearSystem."""
    _require_mach(M)
    k2 = f.k**2
    Xi = complex(Xi_in)

    def matrix(t: float) -> ComplexArray:
        pv = k2 + (f.eta - f.k * t) ** 2
        dp = -2.0 * f.k * (f.eta - f.k * t)
        return np.array([[0.0, -1.0], [pv / M**2 + 2.0 * k2 / pv, dp / pv]], dtype=np.complex128)

    def forcing(t: float) -> ComplexArray:
        pv = k2 + (f.eta - f.k * t) ** 2
        return np.array([0.0, -(2.0 * k2 / pv) * Xi], dtype=np.complex128)

    return LinearSystem(
        dim=2,
        matrix_fn=matrix,
        forcing_fn=forcing if Xi != 0 else None,
        stiffness_hint=lambda t: math.sqrt(k2 + (f.eta - f.k * t) ** 2) / M,
    )


def symmetrized_system(f: Frequency, M: float) -> LinearSystem:
    """Homogeneous Z' = L Z as a LinearSystem."""
    _require_mach(M)
    return LinearSystem(
        dim=2,
        matrix_fn=lambda t: matrix_L(t, f, M).astype(np.complex128),
        stiffness_hint=lambda t: math.sqrt(float(p(t, f))) / M,
    )


@dataclass
class InviscidRun:
    """Samples of one inviscid mode.

    Attributes:
        frequency: The mode.
        mach: Mach number.
        init: Initial data.
        times: Sample times.
        R: Density coefficients at `times`.
        A: Divergence coefficients at `times`.
        stats: Integrator statistics.
    """

    frequency: Frequency
    mach: float
    init: InviscidInit
    times: RealArray
    R: ComplexArray
    A: ComplexArray
    stats: StepStats
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def omega(self) -> ComplexArray:
        """Vorticity reconstructed as Xi - R."""
        return self.init.Xi_in - self.R

    def sym(self) -> tuple[ComplexArray, ComplexArray]:
        return weights_to_sym(self.R, self.A, self.times, self.frequency, self.mach)

    def z_norm(self) -> RealArray:
        Z1, Z2 = self.sym()
        return np.sqrt(np.abs(Z1) ** 2 + np.abs(Z2) ** 2)

    def energy(self) -> RealArray:
        Z1, Z2 = self.sym()
        return np.asarray(energy_symmetrized((Z1, Z2), self.times, self.frequency, self.mach))

    def band(self) -> tuple[float, float]:
        """(sup |Z|, inf |Z|) over the samples."""
        zn = self.z_norm()
        return float(zn.max()), float(zn.min())

    def conservation_defect(self) -> float:
        """max |R + Omega - Xi| / |Xi| (absolute when Xi = 0)."""
        xi = self.init.Xi_in
        defect = np.abs(self.R + self.omega - xi)
        return float(defect.max() / (abs(xi) or 1.0))


def solve_mode(
    init: InviscidInit,
    f: Frequency,
    M: float,
    horizon: float,
    tol: float | None = None,
    sample_times: RealArray | list[float] | None = None,
    *,
    config: SolverConfig | None = None,
    keep_dense: bool = False,
) -> InviscidRun:
    """Integrate one inviscid mode on [0, horizon].

    Args:
        init: Initial data.
        f: Frequency.
        M: Mach number (> 0).
        horizon: End time (> 0).
        tol: Relative tolerance (default: config.rtol).
        sample_times: Output times; default is every accepted step.
        config: Solver settings.
        keep_dense: Keep dense output on the returned trajectory.

    Returns:
        InviscidRun with (R, A) samples; Omega is reconstructed as Xi - R.

    Raises:
        InadmissibleParametersError: If horizon <= 0 or M <= 0.
        IntegrationError: Propagated from the integrator.
    """
    config = config or SolverConfig()
    if not horizon > 0:
        raise InadmissibleParametersError(f"horizon must be > 0, got {horizon}", code="horizon")
    sys = mode_system(f, M, init.Xi_in)
    scale = max(init.size, abs(init.Xi_in)) or 1.0
    traj = integrate(
        sys,
        [init.R_in, init.A_in],
        0.0,
        horizon,
        tol,
        config.atol * scale,
        sample_times,
        config=config,
        keep_dense=keep_dense,
    )
    logger.debug(
        "inviscid mode k=%d eta=%g M=%g: %d steps to t=%g",
        f.k, f.eta, M, traj.stats.accepted, horizon,
    )
    return InviscidRun(
        frequency=f,
        mach=M,
        init=init,
        times=traj.times,
        R=traj.states[:, 0],
        A=traj.states[:, 1],
        stats=traj.stats,
        trajectory=traj if keep_dense else None,
    )


def energy_symmetrized(
    Z: SymState | tuple[complex | ComplexArray, complex | ComplexArray],
    t: RealLike,
    f: Frequency,
    M: float,
) -> RealLike:
    """zeta |Z1|^2 + |Z2|^2 / zeta + 2 (a / beta_s) Re(Z1 conj(Z2))."""
    Z1, Z2 = (Z.Z1, Z.Z2) if isinstance(Z, SymState) else Z
    Z1 = np.asarray(Z1)
    Z2 = np.asarray(Z2)
    a, _, _, zeta, beta_s = _coeffs(t, f, M)
    e = zeta * np.abs(Z1) ** 2 + np.abs(Z2) ** 2 / zeta + 2.0 * (a / beta_s) * np.real(Z1 * np.conj(Z2))
    return float(e) if np.ndim(e) == 0 else e


def energy_reference(
    Z: SymState | tuple[complex | ComplexArray, complex | ComplexArray],
    t: RealLike,
    f: Frequency,
    M: float,
) -> RealLike:
    """zeta |Z1|^2 + |Z2|^2 / zeta, the coercivity reference of `energy_symmetrized`."""
    Z1, Z2 = (Z.Z1, Z.Z2) if isinstance(Z, SymState) else Z
    _, _, _, zeta, _ = _coeffs(t, f, M)
    e = zeta * np.abs(np.asarray(Z1)) ** 2 + np.abs(np.asarray(Z2)) ** 2 / zeta
    return float(e) if np.ndim(e) == 0 else e


def phase_rhs(theta: RealLike, t: RealLike, f: Frequency, M: float) -> RealLike:
    """Angular velocity sqrt(p)/M + (2Mk^2/p^(3/2)) cos^2(theta) + (p'/(4p)) sin(2 theta)."""
    a, b, d, _, _ = _coeffs(t, f, M)
    theta = np.asarray(theta, dtype=np.float64)
    out = b + (d - b) * np.cos(theta) ** 2 + a * np.sin(2.0 * theta)
    return float(out) if np.ndim(out) == 0 else out


def wkb_envelope(t: RealLike, f: Frequency) -> RealLike:
    """p^(1/4), the |R| envelope scale for M << 1 and Xi = 0."""
    out = np.asarray(p(t, f)) ** 0.25
    return float(out) if np.ndim(out) == 0 else out


def det_defect(f: Frequency, M: float, horizon: float, *, config: SolverConfig | None = None) -> float:
    """max over accepted steps of |det Phi_L(t, 0) - 1|."""
    config = config or SolverConfig()
    traj = integrate(
        fundamental_system(symmetrized_system(f, M)),
        [1.0, 0.0, 0.0, 1.0],
        0.0,
        horizon,
        config=config,
    )
    phi = stacked_to_matrix(traj.states)
    det = phi[:, 0, 0] * phi[:, 1, 1] - phi[:, 0, 1] * phi[:, 1, 0]
    return float(np.max(np.abs(det - 1.0)))


@dataclass
class GammaResult:
    """Gamma at one time together with its limit.

    Attributes:
        value: Gamma(t).
        limit: Estimate of Gamma at infinity.
        tail_bound: Bound on |limit - Gamma(T)| at the last integrated time T.
    """

    value: ComplexArray
    limit: ComplexArray
    tail_bound: float


@dataclass
class GammaCurve:
    """Gamma(t) = Z_in + Xi int_0^t Phi_L(0, s) F(s) ds on the integrated panels.

    Attributes:
        frequency: The mode.
        mach: Mach number.
        z_in: Symmetrized initial data.
        xi_in: Conserved Xi.
        times: Panel boundaries.
        values: Gamma at `times`, shape (n, 2).
        limit: Gamma at infinity (value at the last panel plus nothing; see tail_bound).
        tail_bound: Bound on the remaining integral beyond times[-1].
        nodes: Gauss nodes per panel used by the accepted quadrature.
    """

    frequency: Frequency
    mach: float
    z_in: ComplexArray
    xi_in: complex
    times: RealArray
    values: ComplexArray
    limit: ComplexArray
    tail_bound: float
    nodes: int
    _phi: Trajectory | None = field(default=None, repr=False)

    def at(self, times: RealArray | list[float]) -> ComplexArray:
        """Gamma at arbitrary times inside the integrated range, shape (n, 2)."""
        ts = np.atleast_1d(np.asarray(times, dtype=np.float64))
        if self._phi is None:
            return np.broadcast_to(self.z_in, (ts.size, 2)).copy()
        idx = np.clip(np.searchsorted(self.times, ts, side="right") - 1, 0, len(self.times) - 1)
        base = self.values[idx]
        start = self.times[idx]
        partial = _panel_integrals(self._phi, self.frequency, start, ts, self.nodes)
        return base + self.xi_in * partial

    def phi(self, times: RealArray | list[float]) -> ComplexArray:
        """Phi_L(t, 0) at the given times, shape (n, 2, 2)."""
        ts = np.atleast_1d(np.asarray(times, dtype=np.float64))
        if self._phi is None:
            return np.broadcast_to(np.eye(2, dtype=np.complex128), (ts.size, 2, 2)).copy()
        return stacked_to_matrix(self._phi.evaluate(ts))

    def z_at(self, times: RealArray | list[float]) -> ComplexArray:
        """Z(t) = Phi_L(t, 0) Gamma(t), shape (n, 2)."""
        return np.einsum("nij,nj->ni", self.phi(times), self.at(times))


def _panel_integrals(
    phi: Trajectory,
    f: Frequency,
    lo: RealArray,
    hi: RealArray,
    nodes: int,
) -> ComplexArray:
    """int_lo^hi Phi_L(0, s) F(s) ds per panel, shape (n, 2)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid[:, None] + half[:, None] * x[None, :]
    mats = stacked_to_matrix(phi.evaluate(s.ravel())).reshape(s.shape + (2, 2))
    det = mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
    # Phi(0, s) F(s) = F2(s) * second column of the inverse
    f2 = vector_F(s, f)[..., 1]
    col = np.stack([-mats[..., 0, 1], mats[..., 0, 0]], axis=-1) / det[..., None]
    integrand = f2[..., None] * col
    return np.einsum("q,nqi->ni", w, integrand) * half[:, None]


def _tail_integral(T: float, f: Frequency) -> float:
    """int_T^inf |F(s)| ds."""
    value, _ = sp_integrate.quad(
        lambda s: 2.0 * f.k**2 / float(p(s, f)) ** 1.75,
        T,
        np.inf,
        limit=200,
    )
    return float(value)


def _tail_horizon(f: Frequency, xi: float, sup_phi: float, target: float, floor: float, cap: float) -> float:
    # int_T^inf |F| ~ 0.8 |k|^(-3/2) (T - eta/k)^(-5/2) for T well past the critical time
    width = (0.8 * sup_phi * xi * abs(f.k) ** -1.5 / target) ** 0.4
    return min(cap, max(floor, f.critical_time + width))


def gamma_curve(
    init: InviscidInit,
    f: Frequency,
    M: float,
    horizon: float,
    tol: float | None = None,
    *,
    tail_target: float | None = None,
    config: SolverConfig | None = None,
) -> GammaCurve:
    """Gamma sampled on the integrator's panels up to (at least) `horizon`.

    Phi_L(s, 0) is integrated once with dense output; Phi_L(0, s) is its
    adjugate divided by the determinant. Each panel is integrated by
    Gauss-Legendre quadrature whose node count doubles until the relative
    change drops below `tol`. The integration is extended past `horizon` until
    sup|Phi_L(0, .)| |Xi| int_T^inf |F| falls below `tail_target`, or the
    configured cap is reached.

    Raises:
        QuadratureError: If the node doubling does not converge.
        IntegrationError: Propagated from the integrator.
    """
    config = config or SolverConfig()
    tol = config.rtol if tol is None else tol
    _require_mach(M)
    z1, z2 = weights_to_sym(init.R_in, init.A_in, 0.0, f, M)
    z_in = np.array([complex(z1), complex(z2)], dtype=np.complex128)
    xi = init.Xi_in

    if xi == 0:
        return GammaCurve(
            frequency=f,
            mach=M,
            z_in=z_in,
            xi_in=0j,
            times=np.array([0.0, horizon]),
            values=np.stack([z_in, z_in]),
            limit=z_in.copy(),
            tail_bound=0.0,
            nodes=config.quad_nodes,
        )

    scale = max(float(np.linalg.norm(z_in)), abs(xi))
    target = tol * scale if tail_target is None else tail_target
    end = _tail_horizon(f, abs(xi), 1.0, target, horizon, config.tail_horizon_cap)
    sys = fundamental_system(symmetrized_system(f, M))

    for _ in range(3):
        phi = integrate(sys, [1.0, 0.0, 0.0, 1.0], 0.0, end, tol, config.atol, config=config, keep_dense=True)
        mats = stacked_to_matrix(phi.states)
        sup_phi = float(np.max(np.linalg.norm(mats, ord=2, axis=(1, 2))))
        tail = sup_phi * abs(xi) * _tail_integral(end, f)
        if tail <= target or end >= config.tail_horizon_cap:
            break
        end = _tail_horizon(f, abs(xi), sup_phi, target, end * 1.5, config.tail_horizon_cap)
    if tail > target:
        logger.info(
            "gamma tail bound %.3e above target %.3e at horizon cap %g (k=%d eta=%g)",
            tail, target, end, f.k, f.eta,
        )

    edges = phi.step_times
    lo, hi = edges[:-1], edges[1:]
    nodes = config.quad_nodes
    panels = _panel_integrals(phi, f, lo, hi, nodes)
    for _ in range(config.max_quad_refinements):
        finer = _panel_integrals(phi, f, lo, hi, 2 * nodes)
        change = float(np.sum(np.abs(finer - panels)))
        reference = float(np.sum(np.abs(finer))) * abs(xi) + scale
        panels = finer
        nodes *= 2
        logger.debug("gamma quadrature: %d nodes/panel, change %.3e", nodes, change)
        if change * abs(xi) <= tol * reference:
            break
    else:
        raise QuadratureError(
            f"gamma quadrature did not converge after {config.max_quad_refinements} refinements",
            code="gamma",
            details={"k": f.k, "eta": f.eta, "mach": M},
        )

    cumulative = np.vstack([np.zeros((1, 2), dtype=np.complex128), np.cumsum(panels, axis=0)])
    values = z_in[None, :] + xi * cumulative
    return GammaCurve(
        frequency=f,
        mach=M,
        z_in=z_in,
        xi_in=xi,
        times=edges,
        values=values,
        limit=values[-1].copy(),
        tail_bound=tail,
        nodes=nodes,
        _phi=phi,
    )


def gamma_fn(
    t: float,
    init: InviscidInit,
    f: Frequency,
    M: float,
    tol: float | None = None,
    *,
    config: SolverConfig | None = None,
) -> GammaResult:
    """Gamma(t) and the Gamma-at-infinity estimate."""
    if t < 0:
        raise InadmissibleParametersError(f"t must be >= 0, got {t}", code="gamma")
    curve = gamma_curve(init, f, M, max(t, 1e-12), tol, config=config)
    return GammaResult(value=curve.at([t])[0], limit=curve.limit, tail_bound=curve.tail_bound)


def mode_displacement(a: InviscidInit, b: InviscidInit, f: Frequency, s1: float = 0.0, s2: float = 0.0) -> float:
    """Single-mode distance |dR| w + |dOmega| w + |dA| w <k>^(-3/2) <eta>^(-3/2), w = <k>^s1 <eta>^s2."""
    wk = float(japanese_bracket(f.k))
    we = float(japanese_bracket(f.eta))
    w = wk**s1 * we**s2
    return (
        abs(a.R_in - b.R_in) * w
        + abs(a.Omega_in - b.Omega_in) * w
        + abs(a.A_in - b.A_in) * wk ** (s1 - 1.5) * we ** (s2 - 1.5)
    )


@dataclass
class GenericPerturbation:
    """Outcome of `perturb_generic_detailed`.

    Attributes:
        init: Perturbed data (Xi unchanged).
        bound: eps * exp(-(k^2 + eta^2)).
        inf_gamma: Smallest sampled |Gamma_eps(t)| on the horizon.
        direction: Angle of the chosen direction, or None when no scan was needed.
        alpha_shift: Whether the alpha-only shift was applied.
        displacement: mode_displacement(original, perturbed).
    """

    init: InviscidInit
    bound: float
    inf_gamma: float
    direction: float | None
    alpha_shift: bool
    displacement: float

    @property
    def passed(self) -> bool:
        return self.inf_gamma >= 0.5 * self.bound


def _shift(init: InviscidInit, f: Frequency, M: float, eps: float, nu1: float, nu2: float) -> InviscidInit:
    p0 = f.p0
    damp = math.exp(-p0)
    d_rho = eps * M * p0**0.25 * damp * nu1
    d_alpha = eps * p0**0.75 * damp * nu2
    return InviscidInit(init.R_in + d_rho, init.A_in + d_alpha, init.Omega_in - d_rho)


def perturb_generic_detailed(
    init: InviscidInit,
    f: Frequency,
    M: float,
    eps: float,
    horizon: float,
    *,
    n_directions: int = Defaults.DIRECTION_SCAN,
    n_samples: int = 2000,
    config: SolverConfig | None = None,
) -> GenericPerturbation:
    """Shift the data so that |Gamma_eps| stays above eps e^(-(k^2+eta^2)) / 2.

    The shift moves Z_in by c * nu with c = eps e^(-(k^2+eta^2)) and nu a real
    unit vector, leaving Xi unchanged, so Gamma_eps = Gamma + c nu. When
    |Gamma at infinity| <= c/2 the alpha-only shift nu = (0, 1) is applied
    first. If the bound then fails on the sampled horizon, 16 equi-spaced
    directions are scanned and the one maximizing inf |Gamma_eps| is kept.

    Raises:
        InadmissibleParametersError: If eps <= 0 or horizon <= 0.
        GenericityError: If no direction reaches the bound.
    """
    if not (eps > 0 and horizon > 0):
        raise InadmissibleParametersError("eps and horizon must be > 0", code="perturb")
    config = config or SolverConfig()
    c = eps * math.exp(-f.p0)
    curve = gamma_curve(init, f, M, horizon, tail_target=max(c / 4.0, 1e-300), config=config)
    grid = np.union1d(curve.times[curve.times <= horizon], np.linspace(0.0, horizon, n_samples))
    gamma = curve.at(grid)

    current = init
    alpha_shift = False
    if np.linalg.norm(curve.limit) <= 0.5 * c:
        gamma = gamma + c * np.array([0.0, 1.0])
        current = _shift(current, f, M, eps, 0.0, 1.0)
        alpha_shift = True

    inf_gamma = float(np.min(np.linalg.norm(gamma, axis=1)))
    direction: float | None = None
    if inf_gamma < 0.5 * c:
        angles = 2.0 * math.pi * np.arange(n_directions) / n_directions
        scores = [
            float(np.min(np.linalg.norm(gamma + c * np.array([math.cos(th), math.sin(th)]), axis=1)))
            for th in angles
        ]
        best = int(np.argmax(scores))
        direction = float(angles[best])
        inf_gamma = scores[best]
        current = _shift(current, f, M, eps, math.cos(direction), math.sin(direction))

    result = GenericPerturbation(
        init=current,
        bound=c,
        inf_gamma=inf_gamma,
        direction=direction,
        alpha_shift=alpha_shift,
        displacement=mode_displacement(init, current, f),
    )
    if not result.passed:
        raise GenericityError(
            f"no direction keeps |Gamma| above {0.5 * c:.3e} (best {inf_gamma:.3e})",
            code="genericity",
            details={"k": f.k, "eta": f.eta, "mach": M, "eps": eps},
        )
    logger.debug(
        "perturb_generic k=%d eta=%g: inf|Gamma|=%.3e bound=%.3e direction=%s",
        f.k, f.eta, inf_gamma, c, direction,
    )
    return result


def perturb_generic(
    init: InviscidInit,
    f: Frequency,
    M: float,
    eps: float,
    horizon: float,
    *,
    config: SolverConfig | None = None,
) -> InviscidInit:
    """Perturbed data with |Gamma_eps| bounded away from zero; see `perturb_generic_detailed`."""
    return perturb_generic_detailed(init, f, M, eps, horizon, config=config).init
