"""Single-mode runs shared by `mode-run` and the sweep harness."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from couette_lab.base import SolverConfig
from couette_lab.constants import Defaults, SolverKind, WeightScheme
from couette_lab.exceptions import InsufficientSamplesError
from couette_lab.harness.fitting import RateReport, fit_exponential_rate, fit_power_law
from couette_lab.modes.inviscid import InviscidInit, solve_mode, weights_to_sym
from couette_lab.modes.viscous import ViscousRun, ViscousState, data_size, solve_viscous
from couette_lab.presets import ReferenceMode
from couette_lab.symbols import FluidParams, Frequency, WeightParams, p
from couette_lab.types import ComplexArray, RealArray

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "abs_R", "abs_A", "abs_Omega", "abs_Z", "E", "Ew", "growth", "velocity")


@dataclass(frozen=True)
class RunPoint:
    """Everything needed to run one mode; picklable.

    Attributes:
        k: x-frequency (nonzero).
        eta: y-frequency.
        mach: Mach number.
        nu: Shear viscosity.
        lam: Bulk viscosity.
        horizon: End time (>= 0).
        R_in: Initial density coefficient.
        A_in: Initial divergence coefficient.
        Xi_in: Initial R + Omega.
        rtol: Relative tolerance (default: config.rtol).
        n_samples: Equispaced output samples; None samples every accepted step.
        beta: Weight window parameter.
        delta_beta: Weight admissibility parameter.
        w_exponent: Exponent of w in the W_WEIGHT variables.
        config: Solver settings.
    """

    k: int = ReferenceMode.K
    eta: float = ReferenceMode.ETA
    mach: float = 1.0
    nu: float = 0.0
    lam: float = 0.0
    horizon: float = 50.0
    R_in: complex = 0j
    A_in: complex = 0j
    Xi_in: complex = complex(ReferenceMode.XI_IN)
    rtol: float | None = None
    n_samples: int | None = None
    beta: float = Defaults.BETA
    delta_beta: float = Defaults.DELTA_BETA
    w_exponent: float = 0.75
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def frequency(self) -> Frequency:
        return Frequency(self.k, self.eta)

    @property
    def params(self) -> FluidParams:
        return FluidParams(self.mach, self.nu, self.lam)

    @property
    def weights(self) -> WeightParams:
        return WeightParams(self.beta, self.delta_beta)

    @property
    def solver(self) -> str:
        return SolverKind.INVISCID if self.params.is_inviscid else SolverKind.VISCOUS

    @property
    def sort_key(self) -> tuple[int, float, float, float, float, float]:
        return (self.k, self.eta, self.nu, self.mach, self.lam, self.horizon)

    def axes(self) -> dict[str, float]:
        return {
            "k": self.k,
            "eta": self.eta,
            "mach": self.mach,
            "nu": self.nu,
            "lambda": self.lam,
            "horizon": self.horizon,
        }


@dataclass
class ModeSeries:
    """Time series of one mode run.

    `abs_Z` is the symmetrized norm (inviscid runs only); `E` and `Ew` are the
    P_WEIGHT and W_WEIGHT energies (nu > 0 only, E also needs M nu^(1/3) <= 1).
    Unavailable columns hold NaN.
    """

    point: RunPoint
    times: RealArray
    R: ComplexArray
    A: ComplexArray
    Omega: ComplexArray
    abs_Z: RealArray
    E: RealArray
    Ew: RealArray
    steps: int = 0

    @property
    def growth(self) -> RealArray:
        """|A| / sqrt(p) + |R| / M."""
        pv = np.asarray(p(self.times, self.point.frequency))
        return np.abs(self.A) / np.sqrt(pv) + np.abs(self.R) / self.point.mach

    @property
    def velocity(self) -> RealArray:
        pv = np.asarray(p(self.times, self.point.frequency))
        return np.sqrt((np.abs(self.A) ** 2 + np.abs(self.Omega) ** 2) / pv)

    def columns(self) -> dict[str, RealArray]:
        return {
            "t": self.times,
            "abs_R": np.abs(self.R),
            "abs_A": np.abs(self.A),
            "abs_Omega": np.abs(self.Omega),
            "abs_Z": self.abs_Z,
            "E": self.E,
            "Ew": self.Ew,
            "growth": self.growth,
            "velocity": self.velocity,
        }

    def data_size(self) -> float:
        pt = self.point
        init = ViscousState(pt.R_in, pt.A_in, pt.Xi_in - pt.R_in)
        return data_size(init, pt.frequency, pt.params)

    def transient_amplitude(self) -> float:
        """max_t (|v| + |R| / M) / data size."""
        size = self.data_size()
        if size == 0:
            return 0.0
        return float(np.max(self.velocity + np.abs(self.R) / self.point.mach) / size)

    def fits(self) -> list[RateReport]:
        """Envelope growth fit (inviscid) or E^w decay-rate fit (nu > 0) where the run is long enough."""
        pt = self.point
        out = []
        try:
            if pt.params.is_inviscid:
                lo = max(pt.horizon / 10.0, pt.frequency.critical_time + 1.0)
                out.append(
                    fit_power_law(self.times, self.growth, (lo, pt.horizon), quantity="growth", use_envelope=True)
                )
            elif pt.nu > 0:
                scale = pt.nu ** (-1.0 / 3.0)
                window = (2.0 * scale, min(6.0 * scale, pt.horizon))
                out.append(
                    fit_exponential_rate(
                        self.times,
                        self.Ew,
                        window,
                        quantity="Ew",
                        lower_bound=pt.nu ** (1.0 / 3.0) / 32.0,
                    )
                )
        except InsufficientSamplesError as e:
            logger.info("mode-run: fit skipped (%s)", e.message)
        return out

    def summary(self) -> dict[str, Any]:
        return {
            **self.point.axes(),
            "solver": self.point.solver,
            "steps": self.steps,
            "samples": int(self.times.size),
            "transient_amplitude": self.transient_amplitude(),
            "fits": [r.to_dict() for r in self.fits()],
        }


def _sample_times(point: RunPoint) -> RealArray | None:
    if point.n_samples is None:
        return None
    return np.linspace(0.0, point.horizon, max(point.n_samples, 2))


def _energies(run: ViscousRun, point: RunPoint) -> tuple[RealArray, RealArray]:
    n = run.times.size
    nan = np.full(n, np.nan)
    if not point.nu > 0:
        return nan, nan
    wp = point.weights
    Ew = run.energy(WeightScheme.W_WEIGHT, wp=wp, w_exponent=point.w_exponent)
    E = nan
    if point.mach * point.nu ** (1.0 / 3.0) <= 1.0:
        E = run.energy(WeightScheme.P_WEIGHT, wp=wp)
    return E, Ew


def run_point(point: RunPoint) -> ModeSeries:
    """Run one mode and collect its series.

    nu = lambda = 0 routes to the inviscid (R, A) solver; everything else to
    the viscous solver (the closed (R, A) variant when nu = 0).
    """
    f = point.frequency
    params = point.params
    if point.horizon == 0:
        times = np.zeros(1)
        R = np.array([point.R_in], dtype=np.complex128)
        A = np.array([point.A_in], dtype=np.complex128)
        Omega = np.array([point.Xi_in - point.R_in], dtype=np.complex128)
        Z1, Z2 = weights_to_sym(R, A, times, f, point.mach)
        abs_Z = np.sqrt(np.abs(Z1) ** 2 + np.abs(Z2) ** 2)
        nan = np.full(1, np.nan)
        return ModeSeries(point, times, R, A, Omega, abs_Z, nan, nan)

    config = point.config if point.rtol is None else point.config.with_rtol(point.rtol)
    samples = _sample_times(point)
    if params.is_inviscid:
        inv = solve_mode(
            InviscidInit.from_xi(point.R_in, point.A_in, point.Xi_in),
            f,
            point.mach,
            point.horizon,
            sample_times=samples,
            config=config,
        )
        nan = np.full(inv.times.size, np.nan)
        return ModeSeries(point, inv.times, inv.R, inv.A, inv.omega, inv.z_norm(), nan, nan, inv.stats.accepted)

    run = solve_viscous(
        ViscousState(point.R_in, point.A_in, point.Xi_in - point.R_in),
        f,
        params,
        point.horizon,
        sample_times=samples,
        config=config,
        reduced=point.nu == 0,
    )
    E, Ew = _energies(run, point)
    nan = np.full(run.times.size, np.nan)
    return ModeSeries(point, run.times, run.R, run.A, run.Omega, nan, E, Ew, run.stats.accepted)


def point_quantities(series: ModeSeries, names: tuple[str, ...]) -> dict[str, float]:
    """Scalar observables of a run, by name.

    Names: transient_amplitude, max_growth, final_growth, final_abs_R,
    final_abs_A, final_abs_Omega, energy_ratio (E^w(T) / E^w(0)).
    """
    out: dict[str, float] = {}
    for name in names:
        match name:
            case "transient_amplitude":
                out[name] = series.transient_amplitude()
            case "max_growth":
                out[name] = float(np.max(series.growth))
            case "final_growth":
                out[name] = float(series.growth[-1])
            case "final_abs_R":
                out[name] = float(abs(series.R[-1]))
            case "final_abs_A":
                out[name] = float(abs(series.A[-1]))
            case "final_abs_Omega":
                out[name] = float(abs(series.Omega[-1]))
            case "energy_ratio":
                e0 = float(series.Ew[0])
                out[name] = float(series.Ew[-1] / e0) if e0 > 0 else math.nan
            case _:
                out[name] = math.nan
    return out


QUANTITIES = (
    "transient_amplitude",
    "max_growth",
    "final_growth",
    "final_abs_R",
    "final_abs_A",
    "final_abs_Omega",
    "energy_ratio",
)
