"""Parameter sweeps over (k, eta, M, nu, lambda, horizon).

A sweep spec is a JSON document:

    {
        "axes": {"nu": [1e-2, 1e-3, 1e-4], "k": [1], "eta": [0.0], "horizon": [130.0]},
        "init": {"R": 0, "A": 0, "Xi": 1},
        "quantities": ["transient_amplitude"],
        "rtol": 1e-8,
        "n_samples": 2000
    }

Missing or empty axes take their default single value. Points are
deduplicated and sorted by (k, eta, nu, M, lambda, horizon), so every
execution order produces the same rows.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import orjson

from couette_lab.base import SolverConfig
from couette_lab.constants import Defaults, Schema
from couette_lab.exceptions import CouetteLabError, InsufficientSamplesError, SweepSpecError
from couette_lab.harness.fitting import fit_scaling
from couette_lab.harness.runs import QUANTITIES, RunPoint, point_quantities, run_point
from couette_lab.presets import ReferenceMode

logger = logging.getLogger(__name__)

AXES = ("k", "eta", "mach", "nu", "lambda", "horizon")

CSV_COLUMNS = ("k", "eta", "mach", "nu", "lambda", "horizon", "quantity", "value", "status")

_AXIS_DEFAULTS: dict[str, float] = {
    "k": ReferenceMode.K,
    "eta": ReferenceMode.ETA,
    "mach": 1.0,
    "nu": 0.0,
    "lambda": 0.0,
    "horizon": 50.0,
}


class PointStatus:
    OK = "ok"
    ABORTED = "aborted"


@dataclass(frozen=True)
class SweepSpec:
    """Validated sweep specification.

    Attributes:
        axes: Values per axis; every axis is present and nonempty.
        quantities: Observables reported per point.
        R_in / A_in / Xi_in: Initial data shared by all points.
        rtol: Relative tolerance (None: solver default).
        n_samples: Equispaced samples per run (None: every accepted step).
        cap: Largest admissible number of points.
    """

    axes: dict[str, tuple[float, ...]]
    quantities: tuple[str, ...] = ("transient_amplitude",)
    R_in: complex = 0j
    A_in: complex = 0j
    Xi_in: complex = complex(ReferenceMode.XI_IN)
    rtol: float | None = None
    n_samples: int | None = None
    cap: int = Defaults.SWEEP_CAP

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], *, cap: int = Defaults.SWEEP_CAP) -> SweepSpec:
        """Validate a decoded spec document.

        Raises:
            SweepSpecError: Unknown axis or quantity, non-numeric values,
                or a cartesian size above the cap.
        """
        if not isinstance(doc, Mapping):
            raise SweepSpecError("sweep spec must be a JSON object", code="sweep")
        raw_axes = doc.get("axes", {})
        if not isinstance(raw_axes, Mapping):
            raise SweepSpecError("'axes' must be an object", code="sweep")
        unknown = sorted(set(raw_axes) - set(AXES))
        if unknown:
            raise SweepSpecError(f"unknown axes: {', '.join(unknown)}; expected {', '.join(AXES)}", code="sweep")

        axes: dict[str, tuple[float, ...]] = {}
        for name in AXES:
            values = raw_axes.get(name) or [_AXIS_DEFAULTS[name]]
            if not isinstance(values, Sequence) or isinstance(values, str):
                raise SweepSpecError(f"axis {name!r} must be a list", code="sweep")
            try:
                parsed = tuple(int(v) if name == "k" else float(v) for v in values)
            except (TypeError, ValueError) as e:
                raise SweepSpecError(f"axis {name!r}: {e}", code="sweep") from e
            axes[name] = tuple(sorted(set(parsed)))

        quantities = tuple(doc.get("quantities") or ("transient_amplitude",))
        bad = [q for q in quantities if q not in QUANTITIES]
        if bad:
            raise SweepSpecError(f"unknown quantities: {', '.join(bad)}", code="sweep")

        size = math.prod(len(v) for v in axes.values())
        if size > cap:
            raise SweepSpecError(f"sweep has {size} points, cap is {cap}", code="sweep", details={"size": size})

        init = doc.get("init") or {}
        try:
            R_in = complex(init.get("R", 0.0))
            A_in = complex(init.get("A", 0.0))
            Xi_in = complex(init.get("Xi", ReferenceMode.XI_IN))
            rtol = None if doc.get("rtol") is None else float(doc["rtol"])
            n_samples = None if doc.get("n_samples") is None else int(doc["n_samples"])
        except (TypeError, ValueError) as e:
            raise SweepSpecError(f"invalid sweep setting: {e}", code="sweep") from e
        return cls(axes, tuple(dict.fromkeys(quantities)), R_in, A_in, Xi_in, rtol, n_samples, cap)

    @classmethod
    def from_file(cls, path: str | Path, *, cap: int = Defaults.SWEEP_CAP) -> SweepSpec:
        try:
            doc = orjson.loads(Path(path).read_bytes())
        except orjson.JSONDecodeError as e:
            raise SweepSpecError(f"{path}: not valid JSON ({e})", code="sweep") from e
        return cls.from_dict(doc, cap=cap)

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())

    def points(self, config: SolverConfig | None = None) -> list[RunPoint]:
        """Deduplicated points in sort-key order."""
        config = config or SolverConfig()
        seen: dict[tuple, RunPoint] = {}
        for k, eta, mach, nu, lam, horizon in itertools.product(*(self.axes[a] for a in AXES)):
            point = RunPoint(
                k=int(k),
                eta=eta,
                mach=mach,
                nu=nu,
                lam=lam,
                horizon=horizon,
                R_in=self.R_in,
                A_in=self.A_in,
                Xi_in=self.Xi_in,
                rtol=self.rtol,
                n_samples=self.n_samples,
                config=config,
            )
            seen.setdefault(point.sort_key, point)
        return [seen[key] for key in sorted(seen)]


@dataclass
class PointOutcome:
    """Quantities of one point, or the error that aborted it."""

    point: RunPoint
    values: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    @property
    def status(self) -> str:
        return PointStatus.ABORTED if self.error else PointStatus.OK


def evaluate_point(task: tuple[RunPoint, tuple[str, ...]]) -> PointOutcome:
    """Worker: run one point and reduce it to its quantities."""
    point, quantities = task
    try:
        series = run_point(point)
    except CouetteLabError as e:
        logger.info("sweep point %s aborted: %s", point.axes(), e)
        return PointOutcome(point, error=str(e))
    return PointOutcome(point, point_quantities(series, quantities))


def _fmt(value: float) -> str:
    return format(value, Defaults.CSV_FLOAT)


@dataclass
class SweepResult:
    """Outcomes of all points, in sort-key order."""

    spec: SweepSpec
    outcomes: list[PointOutcome]

    @property
    def aborted(self) -> list[PointOutcome]:
        return [o for o in self.outcomes if o.error]

    def rows(self) -> list[list[str]]:
        out = []
        for o in self.outcomes:
            axes = [str(o.point.k)] + [_fmt(v) for v in list(o.point.axes().values())[1:]]
            for q in self.spec.quantities:
                value = o.values.get(q, math.nan)
                out.append([*axes, q, _fmt(value), o.status])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(self.rows())
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path

    def scaling(self) -> list[dict[str, Any]]:
        """nu-scaling exponent of every quantity, per group of the other axes."""
        groups: dict[tuple, list[PointOutcome]] = {}
        for o in self.outcomes:
            if o.error or not o.point.nu > 0:
                continue
            pt = o.point
            groups.setdefault((pt.k, pt.eta, pt.mach, pt.lam, pt.horizon), []).append(o)
        out = []
        for key, members in sorted(groups.items()):
            if len(members) < 2:
                continue
            nus = np.array([m.point.nu for m in members])
            for q in self.spec.quantities:
                vals = np.array([m.values.get(q, math.nan) for m in members])
                if not np.all(np.isfinite(vals)):
                    continue
                try:
                    report = fit_scaling(nus, vals, quantity=q)
                except InsufficientSamplesError:
                    continue
                out.append(
                    {
                        "k": key[0],
                        "eta": key[1],
                        "mach": key[2],
                        "lambda": key[3],
                        "horizon": key[4],
                        "quantity": q,
                        "nu_exponent": report.fitted,
                        "residual": report.residual,
                        "points": int(nus.size),
                    }
                )
        return out

    def summary(self) -> dict[str, Any]:
        return {
            "schema": Schema.REPORT,
            "kind": "sweep",
            "points": len(self.outcomes),
            "aborted": [{**o.point.axes(), "error": o.error} for o in self.aborted],
            "quantities": list(self.spec.quantities),
            "scaling": self.scaling(),
        }

    def write_summary(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(orjson.dumps(self.summary(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))
        return path


def sweep_tasks(spec: SweepSpec, config: SolverConfig | None = None) -> list[tuple[RunPoint, tuple[str, ...]]]:
    return [(pt, spec.quantities) for pt in spec.points(config)]


def run_sweep(spec: SweepSpec, config: SolverConfig | None = None) -> SweepResult:
    """Serial sweep; `CouetteLab.sweeps.run` is the parallel version with identical output."""
    outcomes = [evaluate_point(task) for task in sweep_tasks(spec, config)]
    return SweepResult(spec, outcomes)
