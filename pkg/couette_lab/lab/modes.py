from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np

from couette_lab.base import SweepProgress
from couette_lab.harness.runs import ModeSeries, RunPoint, run_point
from couette_lab.modes.zero import ZeroModeRun, evolve_zero, heat_profile, zero_grid
from couette_lab.symbols import FluidParams, Frequency, MultiplierAudit, WeightParams, check_multiplier_inequalities
from couette_lab.types import ComplexArray, RealArray

if TYPE_CHECKING:
    from couette_lab.lab.client import CouetteLab

logger = logging.getLogger(__name__)


def _audit(task: tuple[Frequency, float, WeightParams, RealArray]) -> MultiplierAudit:
    f, nu, wp, t_grid = task
    return check_multiplier_inequalities(f, nu, wp, t_grid)


class ModesAPI:
    """Single-mode subclient."""

    DEFAULT_AUDIT_TIMES = 10_000

    def __init__(self, lab: CouetteLab) -> None:
        self._lab = lab

    def _with_config(self, point: RunPoint) -> RunPoint:
        return replace(point, config=self._lab.config)

    async def run(self, point: RunPoint) -> ModeSeries:
        """Run one mode with the lab's solver settings.

        Raises:
            IntegrationError: Propagated from the integrator.
        """
        (series,) = await self._lab.map(run_point, [self._with_config(point)], label="mode")
        return series  # type: ignore[return-value]

    async def run_many(
        self,
        points: Sequence[RunPoint],
        *,
        on_progress: Callable[[SweepProgress], None] | None = None,
    ) -> list[ModeSeries | BaseException]:
        """Run several modes; failed points come back as their exception."""
        return await self._lab.map(
            run_point,
            [self._with_config(p) for p in points],
            label="modes",
            return_exceptions=True,
            on_progress=on_progress,
        )

    async def audit(
        self,
        frequencies: Sequence[Frequency],
        nus: Sequence[float],
        wp: WeightParams | None = None,
        *,
        n_times: int = DEFAULT_AUDIT_TIMES,
        t_max: float | None = None,
    ) -> list[MultiplierAudit]:
        """Multiplier audits over frequencies x viscosities.

        The default time grid spans [0, max(eta/k, 0) + 2 beta nu^(-1/3)],
        i.e. past the end of the w window.
        """
        wp = wp or WeightParams()
        tasks = []
        for nu in nus:
            for f in frequencies:
                end = t_max if t_max is not None else max(f.critical_time, 0.0) + 2.0 * wp.beta * nu ** (-1.0 / 3.0)
                tasks.append((f, nu, wp, np.linspace(0.0, end, n_times)))
        audits = await self._lab.map(_audit, tasks, label="audit")
        return list(audits)  # type: ignore[arg-type]

    async def zero(
        self,
        params: FluidParams,
        times: RealArray | Sequence[float],
        *,
        eta_max: float = 6.0,
        d_eta: float = 0.01,
        states: ComplexArray | None = None,
    ) -> ZeroModeRun:
        """Zero modes on the grid 1 <= |j| <= eta_max / d_eta; default data is `heat_profile`."""
        etas = zero_grid(eta_max, d_eta)
        data = heat_profile(etas, params) if states is None else states
        return evolve_zero(etas, data, params, times)
