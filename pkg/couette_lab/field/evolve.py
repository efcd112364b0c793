from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from couette_lab.base import SolverConfig
from couette_lab.constants import SolverKind
from couette_lab.field.grid import FieldMode, GridSpec, NormSpec, SpectralField, is_canonical
from couette_lab.field.norms import helmholtz_norms, sobolev_norm
from couette_lab.modes.inviscid import InviscidInit, solve_mode
from couette_lab.modes.viscous import ViscousState, solve_viscous
from couette_lab.modes.zero import evolve_zero
from couette_lab.symbols import FluidParams, Frequency
from couette_lab.types import ComplexArray, RealArray

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 501


@dataclass(frozen=True)
class ModeTask:
    """Self-contained, picklable description of one mode evolution."""

    k: int
    j: int
    eta: float
    state: tuple[complex, complex, complex]
    params: FluidParams
    horizon: float
    times: tuple[float, ...]
    config: SolverConfig = field(default_factory=SolverConfig)
    rtol: float | None = None

    @property
    def solver(self) -> str:
        if self.k == 0:
            return SolverKind.ZERO
        if self.params.is_inviscid:
            return SolverKind.INVISCID
        return SolverKind.VISCOUS


@dataclass
class ModeResult:
    """States of one mode at the task's sample times, shape (T, 3)."""

    k: int
    j: int
    states: ComplexArray
    solver: str
    steps: int = 0


def evolve_mode(task: ModeTask) -> ModeResult:
    """Evolve one mode with the solver its parameters route to."""
    times = np.asarray(task.times, dtype=np.float64)
    R0, A0, O0 = task.state
    if task.horizon == 0 or not any(task.state):
        # zero data stays zero; a zero horizon only has the initial sample
        states = np.empty((times.size, 3), dtype=np.complex128)
        states[:] = task.state
        return ModeResult(task.k, task.j, states, task.solver)

    config = task.config if task.rtol is None else task.config.with_rtol(task.rtol)
    match task.solver:
        case SolverKind.ZERO:
            run = evolve_zero([task.eta], np.array([task.state]), task.params, times)
            return ModeResult(task.k, task.j, run.states[:, 0, :], SolverKind.ZERO)
        case SolverKind.INVISCID:
            f = Frequency(task.k, task.eta)
            init = InviscidInit(R0, A0, O0)
            inv = solve_mode(init, f, task.params.mach, task.horizon, sample_times=times, config=config)
            states = np.stack([inv.R, inv.A, inv.omega], axis=1)
            return ModeResult(task.k, task.j, states, SolverKind.INVISCID, inv.stats.accepted)
        case _:
            f = Frequency(task.k, task.eta)
            vis = solve_viscous(
                ViscousState(R0, A0, O0),
                f,
                task.params,
                task.horizon,
                sample_times=times,
                config=config,
                reduced=task.params.shear_visc == 0,
            )
            states = np.stack([vis.R, vis.A, vis.Omega], axis=1)
            return ModeResult(task.k, task.j, states, SolverKind.VISCOUS, vis.stats.accepted)


def field_tasks(
    field: SpectralField,
    params: FluidParams,
    horizon: float,
    tol: float | None = None,
    sample_times: Sequence[float] | RealArray | None = None,
    *,
    config: SolverConfig | None = None,
) -> list[ModeTask]:
    """One task per populated canonical mode, sorted by (k, j)."""
    config = config or SolverConfig()
    if sample_times is None:
        times = tuple(float(t) for t in np.linspace(0.0, horizon, DEFAULT_SAMPLES)) if horizon > 0 else (0.0,)
    else:
        times = tuple(float(t) for t in np.sort(np.asarray(sample_times, dtype=np.float64)))
    d = field.grid.d_eta
    return [
        ModeTask(
            k=m.k,
            j=m.j,
            eta=m.j * d,
            state=(m.R, m.A, m.Omega),
            params=params,
            horizon=horizon,
            times=times,
            config=config,
            rtol=tol,
        )
        for m in field.canonical().modes()
    ]


@dataclass
class FieldRun:
    """Evolution of a field at common sample times.

    Attributes:
        grid: Lattice.
        params: Mach number and viscosities.
        times: Sample times, shape (T,).
        keys: Canonical modes, sorted by (k, j).
        states: (R, A, Omega) per time and canonical mode, shape (T, n, 3).
        solvers: Solver used per canonical mode.
    """

    grid: GridSpec
    params: FluidParams
    times: RealArray
    keys: list[tuple[int, int]]
    states: ComplexArray
    solvers: list[str]

    def snapshot(self, i: int) -> SpectralField:
        """Field at times[i], conjugate partners included."""
        modes = [
            FieldMode(k, j, complex(self.states[i, n, 0]), complex(self.states[i, n, 1]), complex(self.states[i, n, 2]))
            for n, (k, j) in enumerate(self.keys)
        ]
        snap = SpectralField.from_modes(self.grid, modes, float(self.times[i]))
        return snap.with_partners()

    def norm_series(self) -> dict[str, RealArray]:
        """Helmholtz norms at every sample time."""
        rows = [helmholtz_norms(self.snapshot(i)).to_dict() for i in range(len(self.times))]
        names = rows[0].keys() if rows else []
        return {name: np.array([r[name] for r in rows], dtype=np.float64) for name in names}

    def sobolev_series(self, spec: NormSpec, *, of: str = "rho", moving: bool = True) -> RealArray:
        return np.array(
            [sobolev_norm(self.snapshot(i), spec, of=of, moving=moving) for i in range(len(self.times))],
            dtype=np.float64,
        )

    def growth_series(self) -> RealArray:
        """||Q[v]|| + ||rho|| / M at every sample time."""
        series = self.norm_series()
        if not series:
            return np.zeros(len(self.times))
        return series["Q_norm"] + series["rho_norm"] / self.params.mach


def merge_results(
    field: SpectralField,
    params: FluidParams,
    tasks: Sequence[ModeTask],
    results: Sequence[ModeResult],
) -> FieldRun:
    """Deterministic merge in task order."""
    times = np.asarray(tasks[0].times if tasks else (field.time,), dtype=np.float64)
    n = len(tasks)
    states = np.zeros((times.size, n, 3), dtype=np.complex128)
    for i, res in enumerate(results):
        states[:, i, :] = res.states
    return FieldRun(
        grid=field.grid,
        params=params,
        times=times,
        keys=[(t.k, t.j) for t in tasks],
        states=states,
        solvers=[r.solver for r in results],
    )


def run_field(
    field: SpectralField,
    params: FluidParams,
    horizon: float,
    tol: float | None = None,
    sample_times: Sequence[float] | RealArray | None = None,
    *,
    config: SolverConfig | None = None,
) -> FieldRun:
    """Evolve every populated canonical mode serially and merge.

    Partners (-k, -j) are recovered by conjugation, so the evolved field stays
    exactly real. Use `CouetteLab.fields.run` for the parallel version.
    """
    if any(not is_canonical(k, j) for k, j in field.keys) and field.reality_defect() > 0:
        logger.warning("field is not conjugate-symmetric; only canonical modes are evolved")
    tasks = field_tasks(field, params, horizon, tol, sample_times, config=config)
    results = [evolve_mode(t) for t in tasks]
    logger.info("run_field: %d canonical modes to t=%g", len(tasks), horizon)
    return merge_results(field, params, tasks, results)
