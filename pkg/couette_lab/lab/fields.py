from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING

from couette_lab.base import SweepProgress
from couette_lab.field.evolve import FieldRun, evolve_mode, field_tasks, merge_results
from couette_lab.field.grid import SpectralField
from couette_lab.symbols import FluidParams
from couette_lab.types import RealArray

if TYPE_CHECKING:
    from couette_lab.lab.client import CouetteLab

logger = logging.getLogger(__name__)


class FieldsAPI:
    """Field subclient: one work item per canonical mode."""

    def __init__(self, lab: CouetteLab) -> None:
        self._lab = lab

    async def run(
        self,
        field: SpectralField,
        params: FluidParams,
        horizon: float,
        tol: float | None = None,
        sample_times: Sequence[float] | RealArray | None = None,
        *,
        on_progress: Callable[[SweepProgress], None] | None = None,
    ) -> FieldRun:
        """Evolve every populated canonical mode and merge in (k, j) order.

        Produces the same FieldRun as `field.evolve.run_field` for any number of jobs.

        Raises:
            IntegrationError: From the first failing mode.
        """
        tasks = field_tasks(field, params, horizon, tol, sample_times, config=self._lab.config)
        results = await self._lab.map(evolve_mode, tasks, label="field", on_progress=on_progress)
        logger.info("field run: %d canonical modes to t=%g (%s)", len(tasks), horizon, params.regime)
        return merge_results(field, params, tasks, results)  # type: ignore[arg-type]
