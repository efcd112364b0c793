from __future__ import annotations

import logging
from collections.abc import Callable
from typing import TYPE_CHECKING

from couette_lab.base import SweepProgress
from couette_lab.harness.sweep import SweepResult, SweepSpec, evaluate_point, sweep_tasks

if TYPE_CHECKING:
    from couette_lab.lab.client import CouetteLab

logger = logging.getLogger(__name__)


class SweepsAPI:
    """Sweep subclient."""

    def __init__(self, lab: CouetteLab) -> None:
        self._lab = lab

    async def run(
        self,
        spec: SweepSpec,
        *,
        on_progress: Callable[[SweepProgress], None] | None = None,
    ) -> SweepResult:
        """Run every point of the spec.

        Aborted points are kept as flagged rows, so the CSV bytes do not depend
        on the number of jobs.
        """
        tasks = sweep_tasks(spec, self._lab.config)
        outcomes = await self._lab.map(evaluate_point, tasks, label="sweep", on_progress=on_progress)
        result = SweepResult(spec, list(outcomes))  # type: ignore[arg-type]
        if result.aborted:
            logger.info("sweep: %d of %d points aborted", len(result.aborted), len(tasks))
        return result
