from __future__ import annotations

import logging
from collections.abc import Callable
from typing import TYPE_CHECKING, Any

from couette_lab.base import BaseLab, SolverConfig, SweepProgress
from couette_lab.harness.verify import VerifyConfig, VerifyReport, criterion_tasks, evaluate_criterion

if TYPE_CHECKING:
    from couette_lab.lab.fields import FieldsAPI
    from couette_lab.lab.modes import ModesAPI
    from couette_lab.lab.sweeps import SweepsAPI

logger = logging.getLogger(__name__)


class CouetteLab(BaseLab):
    """Async entry point for mode, field and sweep runs.

    Work items are pure functions of picklable tasks; with jobs > 1 they run
    in a process pool, otherwise inline. Results always come back in task
    order.

    Usage:
        async with CouetteLab(jobs=4) as lab:
            series = await lab.modes.run(RunPoint(k=3, eta=21.0, mach=50.0, horizon=100.0))
            run = await lab.fields.run(assemble("fig1_forced"), FluidParams(50.0), 200.0)
            result = await lab.sweeps.run(SweepSpec.from_file("sweep.json"))
            report = await lab.verify(VerifyConfig(level="quick"))
    """

    def __init__(
        self,
        jobs: int | str | None = None,
        config: SolverConfig | None = None,
    ) -> None:
        """Initialize the lab.

        Args:
            jobs: Worker processes, "auto" for one per CPU (default: CSPEC_JOBS or 1).
            config: Solver settings shared by every run.
        """
        super().__init__(jobs=jobs, config=config)

        # Lazy-initialized subclients
        self._modes: ModesAPI | None = None
        self._fields: FieldsAPI | None = None
        self._sweeps: SweepsAPI | None = None

    async def _on_lab_ready(self) -> None:
        logger.debug("lab ready: %s", self._describe())

    def _describe(self) -> dict[str, Any]:
        c = self._config
        return {
            "jobs": self._jobs,
            "rtol": c.rtol,
            "atol": c.atol,
            "c_osc": c.c_osc,
        }

    @property
    def modes(self) -> ModesAPI:
        """Single-mode runs, multiplier audits and zero modes."""
        if self._modes is None:
            from couette_lab.lab.modes import ModesAPI

            self._modes = ModesAPI(self)
        return self._modes

    @property
    def fields(self) -> FieldsAPI:
        """Multi-mode field evolution."""
        if self._fields is None:
            from couette_lab.lab.fields import FieldsAPI

            self._fields = FieldsAPI(self)
        return self._fields

    @property
    def sweeps(self) -> SweepsAPI:
        if self._sweeps is None:
            from couette_lab.lab.sweeps import SweepsAPI

            self._sweeps = SweepsAPI(self)
        return self._sweeps

    async def verify(
        self,
        config: VerifyConfig | None = None,
        only: list[int] | None = None,
        *,
        on_progress: Callable[[SweepProgress], None] | None = None,
    ) -> VerifyReport:
        """Run the acceptance criteria in parallel; the report matches `harness.verify.verify`."""
        config = config or VerifyConfig(config=self._config)
        results = await self.map(
            evaluate_criterion,
            criterion_tasks(config, only),
            label="verify",
            on_progress=on_progress,
        )
        return VerifyReport(config, list(results))  # type: ignore[arg-type]
