"""The k = 0 channel: one autonomous 3x3 system per y-frequency eta.

    rho' = -alpha
    alpha' = -(nu + lambda) eta^2 alpha + (eta^2 / M^2) rho
    omega' = alpha - nu eta^2 omega

The system has constant coefficients, so evolution is the exact matrix
exponential (batched over eta).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.symbols import FluidParams
from couette_lab.types import ComplexArray, RealArray

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZeroModeState:
    """(rho0, alpha0, omega0) at one eta != 0."""

    rho0: complex
    alpha0: complex
    omega0: complex
    eta: float

    def __post_init__(self) -> None:
        if self.eta == 0:
            raise InadmissibleParametersError("zero-mode eta must be nonzero", code="zero_mode")

    @property
    def v0y(self) -> complex:
        return self.alpha0 / (1j * self.eta)

    def as_array(self) -> ComplexArray:
        return np.array([self.rho0, self.alpha0, self.omega0], dtype=np.complex128)


def zero_mode_matrix(eta: float | RealArray, params: FluidParams) -> RealArray:
    """System matrix for one eta (shape (3, 3)) or a batch (shape (n, 3, 3))."""
    e2 = np.square(np.asarray(eta, dtype=np.float64))
    mat = np.zeros(e2.shape + (3, 3), dtype=np.float64)
    mat[..., 0, 1] = -1.0
    mat[..., 1, 0] = e2 / params.mach**2
    mat[..., 1, 1] = -params.mu * e2
    mat[..., 2, 1] = 1.0
    mat[..., 2, 2] = -params.shear_visc * e2
    return mat


def rhs_zero(t: float, state: ZeroModeState, params: FluidParams) -> ComplexArray:
    """(drho0, dalpha0, domega0)."""
    return zero_mode_matrix(state.eta, params) @ state.as_array()


def zero_grid(eta_max: float, d_eta: float) -> RealArray:
    """eta = j d_eta for 1 <= |j| <= eta_max / d_eta, sorted; eta = 0 excluded."""
    if not (d_eta > 0 and eta_max >= d_eta):
        raise InadmissibleParametersError("need d_eta > 0 and eta_max >= d_eta", code="zero_mode")
    n = int(np.floor(eta_max / d_eta + 1e-9))
    j = np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)])
    return j * d_eta


@dataclass
class ZeroModeRun:
    """States of a set of zero modes at sample times.

    Attributes:
        etas: y-frequencies, shape (n,).
        times: Sample times, shape (T,).
        states: (rho0, alpha0, omega0), shape (T, n, 3).
        params: Mach number and viscosities.
    """

    etas: RealArray
    times: RealArray
    states: ComplexArray
    params: FluidParams

    @property
    def rho(self) -> ComplexArray:
        return self.states[..., 0]

    @property
    def alpha(self) -> ComplexArray:
        return self.states[..., 1]

    @property
    def omega(self) -> ComplexArray:
        return self.states[..., 2]

    def good(self) -> ComplexArray:
        """omega + rho - nu M^2 alpha, shape (T, n)."""
        p = self.params
        return self.omega + self.rho - p.shear_visc * p.mach**2 * self.alpha

    def energy(self, ell: int) -> RealArray:
        return energy_El(self, ell)

    def aggregate(self, ell: int, d_eta: float) -> RealArray:
        return aggregate_El(self, ell, d_eta)


def evolve_zero(
    etas: RealArray | list[float],
    states: ComplexArray,
    params: FluidParams,
    times: RealArray | list[float],
) -> ZeroModeRun:
    """Exact evolution exp(t A(eta)) applied to each initial state.

    Args:
        etas: Nonzero y-frequencies, shape (n,).
        states: Initial (rho0, alpha0, omega0), shape (n, 3).
        params: Mach number and viscosities.
        times: Sample times (>= 0).

    Raises:
        InadmissibleParametersError: If an eta is zero or shapes disagree.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=np.float64))
    states = np.asarray(states, dtype=np.complex128).reshape(-1, 3)
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    if np.any(etas == 0):
        raise InadmissibleParametersError("zero-mode eta must be nonzero", code="zero_mode")
    if states.shape[0] != etas.size:
        raise InadmissibleParametersError(
            f"{states.shape[0]} states for {etas.size} frequencies", code="zero_mode"
        )
    if np.any(times < 0):
        raise InadmissibleParametersError("times must be >= 0", code="zero_mode")

    mats = zero_mode_matrix(etas, params)
    out = np.empty((times.size, etas.size, 3), dtype=np.complex128)
    for i, t in enumerate(times):
        prop = expm(t * mats)
        out[i] = np.einsum("nij,nj->ni", prop, states)
    logger.debug("evolve_zero: %d frequencies, %d times", etas.size, times.size)
    return ZeroModeRun(etas=etas, times=times, states=out, params=params)


def energy_El(run: ZeroModeRun, ell: int) -> RealArray:
    """Per-mode E^ell = |eta^l a|^2 + |eta^(l-1) a|^2 + |eta^l G|^2 + (|eta^(l+1) r|^2 + |eta^l r|^2) / M^2.

    Returns shape (T, n).
    """
    if ell < 0:
        raise InadmissibleParametersError(f"ell must be >= 0, got {ell}", code="zero_mode")
    e = np.abs(run.etas)[None, :]
    a2 = np.abs(run.alpha) ** 2
    r2 = np.abs(run.rho) ** 2
    g2 = np.abs(run.good()) ** 2
    M2 = run.params.mach**2
    w = e ** (2 * ell)
    return w * a2 + w / e**2 * a2 + w * g2 + (w * e**2 * r2 + w * r2) / M2


def energy_El_aux(run: ZeroModeRun, ell: int) -> RealArray:
    """1/2 (E^ell - (mu / 2) Re(eta^(2l) rho conj(alpha))), shape (T, n)."""
    e = np.abs(run.etas)[None, :] ** (2 * ell)
    cross = np.real(e * run.rho * np.conj(run.alpha))
    return 0.5 * (energy_El(run, ell) - 0.5 * run.params.mu * cross)


def aggregate_El(run: ZeroModeRun, ell: int, d_eta: float) -> RealArray:
    """Trapezoid aggregate of E^ell over [-eta_max, eta_max] without the eta = 0 node, shape (T,).

    Interior nodes carry d_eta and the two outer nodes d_eta / 2.
    """
    e = np.abs(run.etas)
    weights = np.where(np.isclose(e, e.max()), 0.5 * d_eta, d_eta)
    return energy_El(run, ell) @ weights


def good_unknown_residual(run: ZeroModeRun) -> float:
    """max |G' - (-nu eta^2 G + lambda nu M^2 eta^2 alpha)| relative to the largest state derivative."""
    params = run.params
    nu, lam, M2 = params.shear_visc, params.bulk_visc, params.mach**2
    mats = zero_mode_matrix(run.etas, params)
    deriv = np.einsum("nij,tnj->tni", mats, run.states)
    dG = deriv[..., 2] + deriv[..., 0] - nu * M2 * deriv[..., 1]
    e2 = np.square(run.etas)[None, :]
    expected = -nu * e2 * run.good() + lam * nu * M2 * e2 * run.alpha
    scale = max(float(np.max(np.abs(deriv))), float(np.max(np.abs(expected))), 1e-300)
    return float(np.max(np.abs(dG - expected)) / scale)


def heat_profile(etas: RealArray, params: FluidParams, amplitude: float = 1.0) -> ComplexArray:
    """Initial states alpha = amplitude |eta|^(1/2) e^(-eta^2/2), rho = 0, omega with G(0) = 0.

    With G(0) = 0 and lambda = 0 the good unknown stays zero and the aggregate
    E^ell behaves like (1 + mu t)^(-ell) at late times.
    """
    etas = np.asarray(etas, dtype=np.float64)
    alpha = amplitude * np.sqrt(np.abs(etas)) * np.exp(-0.5 * etas**2)
    omega = params.shear_visc * params.mach**2 * alpha
    return np.stack([np.zeros_like(alpha), alpha, omega], axis=1).astype(np.complex128)
