import asyncio
import logging
import math
import os
import time
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, replace
from types import TracebackType
from typing import Any, Self, TypeVar

from couette_lab.constants import Defaults
from couette_lab.exceptions import CouetteLabError, InadmissibleParametersError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class SolverConfig:
    """Numerical settings shared by every per-mode solver.

    Attributes:
        rtol: Relative tolerance of the embedded Runge-Kutta pair (default: 1e-8).
        atol: Absolute tolerance, relative to the size of the initial data (default: 1e-12).
        c_osc: Maximal phase advance per step in radians (default: 0.2).
        underflow_ratio: Abort when the step drops below this fraction of the
            integration interval (default: 1e-14).
        max_steps: Budget of attempted steps per integration (default: 20_000_000).
        quad_nodes: Gauss-Legendre nodes per panel for the Gamma quadrature (default: 8).
        max_quad_refinements: Node doublings before a QuadratureError (default: 6).
        tail_horizon_cap: Largest time the Gamma limit is integrated to (default: 4000).
        decay_floor: Absolute tolerance of viscous runs relative to the data
            size, small enough that decaying solutions stay under relative
            error control (default: 1e-40).
    """

    rtol: float = Defaults.RTOL
    atol: float = Defaults.ATOL
    c_osc: float = Defaults.C_OSC
    underflow_ratio: float = Defaults.UNDERFLOW_RATIO
    max_steps: int = 20_000_000
    quad_nodes: int = 8
    max_quad_refinements: int = 6
    tail_horizon_cap: float = 4000.0
    decay_floor: float = 1e-40

    def __post_init__(self) -> None:
        if not (self.rtol > 0 and self.atol > 0):
            raise InadmissibleParametersError(
                f"tolerances must be > 0, got rtol={self.rtol}, atol={self.atol}",
                code="config",
            )

    def step_cap(self, hint: float) -> float:
        """Largest step allowed by the oscillation rate `hint`."""
        if hint <= 0 or not math.isfinite(hint):
            return math.inf
        return self.c_osc / hint

    def with_rtol(self, rtol: float) -> "SolverConfig":
        return replace(self, rtol=rtol)


@dataclass
class SweepProgress:
    """Progress information during a parallel map.

    Attributes:
        label: What is being mapped (e.g. "sweep", "field").
        completed: Items finished so far, failures included.
        total: Number of items.
        failed: Items that raised.
        elapsed_seconds: Seconds since the map started.
    """

    label: str
    completed: int
    total: int
    failed: int
    elapsed_seconds: float

    @property
    def progress_percent(self) -> float:
        """Completion as percentage (0-100)."""
        if self.total == 0:
            return 100.0
        return (self.completed / self.total) * 100

    def __str__(self) -> str:
        return (
            f"{self.label}: {self.completed}/{self.total} "
            f"({self.progress_percent:.0f}%) - failed: {self.failed}, "
            f"elapsed: {self.elapsed_seconds:.1f}s"
        )


def resolve_jobs(jobs: int | str | None = None) -> int:
    """Resolve a `--jobs` value, falling back to the CSPEC_JOBS env var.

    Args:
        jobs: Worker count, "auto" for os.cpu_count(), or None.

    Returns:
        Number of worker processes (>= 1).

    Raises:
        InadmissibleParametersError: On a non-positive or unparsable value.
    """
    if jobs is None:
        jobs = os.environ.get(Defaults.JOBS_ENV) or 1
    if isinstance(jobs, str):
        text = jobs.strip().lower()
        if text == "auto":
            return os.cpu_count() or 1
        try:
            jobs = int(text)
        except ValueError:
            raise InadmissibleParametersError(f"invalid jobs value {jobs!r}", code="jobs") from None
    if jobs < 1:
        raise InadmissibleParametersError(f"jobs must be >= 1, got {jobs}", code="jobs")
    return jobs


class BaseLab(ABC):
    """Base async lab with a worker pool and ordered parallel map."""

    def __init__(
        self,
        jobs: int | str | None = None,
        config: SolverConfig | None = None,
    ) -> None:
        """Initialize base lab.

        Args:
            jobs: Worker processes; 1 runs inline (default: CSPEC_JOBS or 1).
            config: Solver settings (default: SolverConfig()).
        """
        self._jobs = resolve_jobs(jobs)
        self._config = config or SolverConfig()
        self._semaphore = asyncio.Semaphore(self._jobs)
        self._executor: Executor | None = None

    @property
    def jobs(self) -> int:
        return self._jobs

    @property
    def config(self) -> SolverConfig:
        return self._config

    async def __aenter__(self) -> Self:
        if self._jobs > 1:
            self._executor = ProcessPoolExecutor(max_workers=self._jobs)
        await self._on_lab_ready()
        return self

    async def __aexit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        if self._executor:
            self._executor.shutdown(wait=True, cancel_futures=exc_type is not None)
            self._executor = None

    async def _on_lab_ready(self) -> None:
        """Hook called after the worker pool is up. Override for setup logic."""
        pass

    @abstractmethod
    def _describe(self) -> dict[str, Any]:
        """Return run metadata recorded in reports. Must be implemented by subclasses."""
        raise NotImplementedError

    async def map(
        self,
        fn: Callable[[T], R],
        items: Sequence[T],
        *,
        label: str = "map",
        return_exceptions: bool = False,
        on_progress: Callable[[SweepProgress], None] | None = None,
    ) -> list[R | BaseException]:
        """Apply a pure, picklable function to every item.

        Results keep the order of `items`, so serial and parallel runs merge
        identically.

        Args:
            fn: Module-level function (must be picklable when jobs > 1).
            items: Work items.
            label: Name shown in progress updates.
            return_exceptions: Return CouetteLabError instances in place of
                results instead of raising the first one.
            on_progress: Optional callback called after each finished item.

        Returns:
            List of results (or exceptions) aligned with `items`.
        """
        loop = asyncio.get_running_loop()
        started = time.monotonic()
        total = len(items)
        completed = 0
        failed = 0

        async def run_one(item: T) -> R | BaseException:
            nonlocal completed, failed
            async with self._semaphore:
                try:
                    if self._executor is None:
                        result: R | BaseException = fn(item)
                    else:
                        result = await loop.run_in_executor(self._executor, fn, item)
                except CouetteLabError as e:
                    if not return_exceptions:
                        raise
                    logger.debug("%s item failed: %s", label, e)
                    failed += 1
                    result = e
            completed += 1
            if on_progress:
                on_progress(
                    SweepProgress(
                        label=label,
                        completed=completed,
                        total=total,
                        failed=failed,
                        elapsed_seconds=time.monotonic() - started,
                    )
                )
            return result

        results = await asyncio.gather(*(run_one(item) for item in items))
        logger.debug("%s: %d items, %d failed, %.2fs", label, total, failed, time.monotonic() - started)
        return list(results)
