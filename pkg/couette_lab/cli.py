"""Command-line interface: `couette-lab <command> [flags]`.

Commands:
    mode-run            one (k, eta) mode, time series and rate fits
    field-run           a preset or field file on the mode lattice
    zero-mode           the k = 0 channel on an eta grid, heat-type decay fits
    sweep               a JSON sweep spec, CSV table plus summary JSON
    audit-multipliers   the m and w multiplier inequalities for one mode
    verify              the acceptance suite, verdict JSON

Exit codes: 0 success, 1 failed verification / aborted sweep points / failed
audit, 2 flag or parameter error, 3 integrator failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import logging
import math
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
import orjson
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from couette_lab.base import SolverConfig, SweepProgress
from couette_lab.constants import Defaults, ExitCode, NormKind, Schema
from couette_lab.exceptions import CouetteLabError, InadmissibleParametersError, IntegrationError
from couette_lab.field.grid import NormSpec, assemble
from couette_lab.field.io import export_physical, read_field, write_field
from couette_lab.harness.fitting import fit_algebraic_decay
from couette_lab.harness.runs import SERIES_COLUMNS, RunPoint
from couette_lab.harness.sweep import SweepSpec
from couette_lab.harness.verify import VerifyConfig
from couette_lab.lab.client import CouetteLab
from couette_lab.modes.zero import aggregate_El, good_unknown_residual
from couette_lab.presets import FieldPresets
from couette_lab.symbols import FluidParams, Frequency, WeightParams

logger = logging.getLogger("couette_lab.cli")

_stderr = Console(stderr=True)

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


# =============================================================================
# Flag types
# =============================================================================


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0 or math.isnan(value):
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {text}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a value > 0, got {text}")
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("mode and fluid")
    g.add_argument("--k", type=int, default=3, help="x-frequency (default: 3)")
    g.add_argument("--eta", type=float, default=21.0, help="y-frequency (default: 21)")
    g.add_argument("--mach", type=_positive, default=1.0, help="Mach number (default: 1)")
    g.add_argument("--nu", type=_non_negative, default=0.0, help="shear viscosity (default: 0)")
    g.add_argument("--lambda", dest="lam", type=_non_negative, default=0.0, help="bulk viscosity (default: 0)")
    g.add_argument("--t-end", type=_non_negative, default=None, help="time horizon; 0 writes a header only")
    g.add_argument("--rtol", type=_positive, default=Defaults.RTOL, help="relative tolerance (default: 1e-8)")
    g.add_argument("--beta", type=float, default=Defaults.BETA, help="w window factor (default: 50)")
    g.add_argument("--delta-beta", type=float, default=Defaults.DELTA_BETA, help="w relaxation (default: 1/12)")
    g.add_argument("--s", type=float, default=None, help="Sobolev index; field-run reports H^(-s) norms")
    g.add_argument("--preset", choices=FieldPresets.ALL, default=None, help="named initial field")

    o = common.add_argument_group("output and execution")
    o.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    o.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: csv)")
    o.add_argument("--jobs", default=None, help=f"worker processes or 'auto' (default: ${Defaults.JOBS_ENV} or 1)")
    o.add_argument("--seed", type=_seed, default=0, help="seed for random data (default: 0)")
    o.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    o.add_argument("-q", "--quiet", action="store_true", help="warnings only, no progress bar")
    return common


def build_parser() -> argparse.ArgumentParser:
    # one parent per subcommand: set_defaults writes through to the shared actions
    parser = argparse.ArgumentParser(
        prog="couette-lab",
        description="Linearized compressible Couette flow in Fourier space.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("mode-run", parents=[_common_flags()], help="run one mode")
    p.add_argument("--r-in", type=complex, default=0j, help="initial density coefficient")
    p.add_argument("--a-in", type=complex, default=0j, help="initial divergence coefficient")
    p.add_argument("--xi-in", type=complex, default=5 + 0j, help="initial R + Omega (default: 5)")
    p.add_argument("--samples", type=int, default=None, help="equispaced samples (default: every step)")
    p.add_argument("--w-exponent", type=float, default=0.75, help="exponent of w in E^w (default: 3/4)")
    p.set_defaults(handler=cmd_mode_run, t_end=100.0)

    p = sub.add_parser("field-run", parents=[_common_flags()], help="evolve a field")
    p.add_argument("--field", type=Path, default=None, help="cspec-field/1 document (overrides --preset)")
    p.add_argument("--samples", type=int, default=201, help="equispaced samples (default: 201)")
    p.add_argument("--save-final", type=Path, default=None, help="write the final field document here")
    p.add_argument("--export-physical", type=Path, default=None, help="write the final field on an (x, y) grid")
    p.set_defaults(handler=cmd_field_run, t_end=100.0, preset=FieldPresets.FIG1_FORCED)

    p = sub.add_parser("zero-mode", parents=[_common_flags()], help="k = 0 channel on an eta grid")
    p.add_argument("--eta-max", type=_positive, default=6.0, help="largest |eta| (default: 6)")
    p.add_argument("--d-eta", type=_positive, default=0.01, help="eta spacing (default: 0.01)")
    p.add_argument("--t-start", type=_non_negative, default=None, help="first sample (default: 5 / (nu + lambda))")
    p.add_argument("--samples", type=int, default=40, help="log-spaced samples (default: 40)")
    p.add_argument("--ell", type=int, nargs="+", default=[1, 2], help="energy orders (default: 1 2)")
    p.set_defaults(handler=cmd_zero_mode, nu=1e-2)

    p = sub.add_parser("sweep", parents=[_common_flags()], help="run a sweep spec")
    p.add_argument("spec", type=Path, help="sweep spec JSON")
    p.add_argument("--summary", type=Path, default=None, help="also write the summary JSON here")
    p.add_argument("--cap", type=int, default=Defaults.SWEEP_CAP, help="maximum number of points")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("audit-multipliers", parents=[_common_flags()], help="audit the multiplier inequalities")
    p.add_argument("--times", type=int, default=10_000, help="time-grid points (default: 10000)")
    p.set_defaults(handler=cmd_audit, nu=1e-3)

    p = sub.add_parser("verify", parents=[_common_flags()], help="run the acceptance suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick", help="parameter set (default: quick)")
    p.add_argument("--w-exponent", type=float, default=0.75, help="exponent of w in E^w (default: 3/4)")
    p.add_argument("--only", type=int, nargs="+", default=None, help="criterion ids to run")
    p.set_defaults(handler=cmd_verify, format="json")
    return parser


# =============================================================================
# Output
# =============================================================================


def _fmt(value: float) -> str:
    return format(float(value), Defaults.CSV_FLOAT)


def _csv_text(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns, strict=True):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(doc: Any) -> bytes:
    return orjson.dumps(doc, option=_JSON_OPTIONS)


def _emit(payload: str | bytes, out: Path | None) -> None:
    data = payload.encode("utf-8") if isinstance(payload, str) else payload
    if out is None:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.flush()
    else:
        out.write_bytes(data)
        logger.info("wrote %s", out)


@contextmanager
def _progress(enabled: bool) -> Iterator[Callable[[SweepProgress], None] | None]:
    if not enabled:
        yield None
        return
    with Progress(
        TextColumn("[cyan]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=_stderr,
        transient=True,
    ) as progress:
        task_id = progress.add_task("starting", total=None)

        def update(p: SweepProgress) -> None:
            description = p.label if not p.failed else f"{p.label} ({p.failed} failed)"
            progress.update(task_id, description=description, completed=p.completed, total=p.total)

        yield update


def _lab(args: argparse.Namespace) -> CouetteLab:
    return CouetteLab(jobs=args.jobs, config=SolverConfig(rtol=args.rtol))


# =============================================================================
# Commands
# =============================================================================


def cmd_mode_run(args: argparse.Namespace) -> int:
    point = RunPoint(
        k=args.k,
        eta=args.eta,
        mach=args.mach,
        nu=args.nu,
        lam=args.lam,
        horizon=args.t_end,
        R_in=args.r_in,
        A_in=args.a_in,
        Xi_in=args.xi_in,
        rtol=args.rtol,
        n_samples=args.samples,
        beta=args.beta,
        delta_beta=args.delta_beta,
        w_exponent=args.w_exponent,
    )
    # Parameter errors surface even when nothing is integrated.
    _ = (point.frequency, point.params, point.weights)

    if args.t_end == 0:
        if args.format == "json":
            empty = {name: [] for name in SERIES_COLUMNS}
            _emit(_json({"schema": Schema.REPORT, "kind": "mode-run", "run": point.axes(), "series": empty}), args.out)
        else:
            _emit(_csv_text(SERIES_COLUMNS, []), args.out)
        return ExitCode.OK

    async def run() -> Any:
        async with _lab(args) as lab:
            return await lab.modes.run(point)

    series = asyncio.run(run())
    for report in series.fits():
        logger.info(
            "%s %s fit on [%g, %g]: %.4g (residual %.2g)",
            report.quantity, report.kind, *report.window, report.fitted, report.residual,
        )
    columns = series.columns()
    if args.format == "json":
        doc = {"schema": Schema.REPORT, "kind": "mode-run", "run": series.summary(), "series": columns}
        _emit(_json(doc), args.out)
    else:
        _emit(_csv_text(SERIES_COLUMNS, [columns[c] for c in SERIES_COLUMNS]), args.out)
    return ExitCode.OK


def cmd_field_run(args: argparse.Namespace) -> int:
    if args.field is not None:
        field = read_field(args.field)
    else:
        field = assemble(args.preset, seed=args.seed)
    params = FluidParams(args.mach, args.nu, args.lam)
    horizon = args.t_end
    if horizon == 0:
        _emit(_csv_text(("t", "Q_norm", "rho_norm", "growth"), []), args.out)
        return ExitCode.OK
    times = np.linspace(0.0, horizon, max(args.samples, 2))

    async def run() -> Any:
        async with _lab(args) as lab:
            with _progress(not args.quiet) as on_progress:
                return await lab.fields.run(field, params, horizon, args.rtol, times, on_progress=on_progress)

    field_run = asyncio.run(run())
    series = field_run.norm_series()
    series["growth"] = field_run.growth_series()
    if args.s is not None:
        spec = NormSpec(NormKind.ISO, s=-args.s)
        series["Q_Hs"] = field_run.sobolev_series(spec, of="Q")
        series["rho_Hs"] = field_run.sobolev_series(spec, of="rho")

    final = field_run.snapshot(len(field_run.times) - 1)
    if args.save_final is not None:
        write_field(final, args.save_final)
    if args.export_physical is not None:
        export_physical(final, args.export_physical)

    if args.format == "json":
        doc = {
            "schema": Schema.REPORT,
            "kind": "field-run",
            "modes": len(field_run.keys),
            "mach": params.mach,
            "nu": params.shear_visc,
            "lambda": params.bulk_visc,
            "regime": params.regime,
            "s": args.s,
            "times": field_run.times,
            "series": series,
        }
        _emit(_json(doc), args.out)
    else:
        header = ["t", *series]
        _emit(_csv_text(header, [field_run.times, *series.values()]), args.out)
    return ExitCode.OK


def cmd_zero_mode(args: argparse.Namespace) -> int:
    params = FluidParams(args.mach, args.nu, args.lam)
    mu = params.mu
    if args.t_end is None and not mu > 0:
        raise InadmissibleParametersError("zero-mode without viscosity needs --t-end", code="zero_mode")
    t_end = args.t_end if args.t_end is not None else 50.0 / mu
    header = ["t", *(f"E{ell}" for ell in args.ell)]
    if t_end == 0:
        _emit(_csv_text(header, []), args.out)
        return ExitCode.OK

    t_start = args.t_start if args.t_start is not None else (5.0 / mu if mu > 0 else 0.0)
    if t_start > 0 and t_start < t_end:
        times = np.geomspace(t_start, t_end, max(args.samples, 2))
    else:
        times = np.linspace(0.0, t_end, max(args.samples, 2))

    async def run() -> Any:
        async with _lab(args) as lab:
            return await lab.modes.zero(params, times, eta_max=args.eta_max, d_eta=args.d_eta)

    zero = asyncio.run(run())
    aggregates = {ell: aggregate_El(zero, ell, args.d_eta) for ell in args.ell}

    fits = []
    if mu > 0:
        for ell, values in aggregates.items():
            report = fit_algebraic_decay(times, values, rate=mu, quantity=f"E{ell}", expected=-float(ell), tolerance=0.2)
            logger.info("E^%d ~ (1 + mu t)^%.4f (expected %d)", ell, report.fitted, -ell)
            fits.append(report.to_dict())

    if args.format == "json":
        doc = {
            "schema": Schema.REPORT,
            "kind": "zero-mode",
            "mach": params.mach,
            "nu": params.shear_visc,
            "lambda": params.bulk_visc,
            "eta_max": args.eta_max,
            "d_eta": args.d_eta,
            "good_unknown_residual": good_unknown_residual(zero),
            "times": times,
            "aggregates": {f"E{ell}": v for ell, v in aggregates.items()},
            "fits": fits,
        }
        _emit(_json(doc), args.out)
    else:
        _emit(_csv_text(header, [times, *aggregates.values()]), args.out)
    return ExitCode.OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec.from_file(args.spec, cap=args.cap)
    logger.info("sweep: %d points x %d quantities", spec.size, len(spec.quantities))

    async def run() -> Any:
        async with _lab(args) as lab:
            with _progress(not args.quiet) as on_progress:
                return await lab.sweeps.run(spec, on_progress=on_progress)

    result = asyncio.run(run())
    if args.format == "json":
        _emit(_json(result.summary()), args.out)
    else:
        _emit(result.to_csv(), args.out)
    if args.summary is not None:
        result.write_summary(args.summary)
    for row in result.scaling():
        logger.info("%s ~ nu^%.4f (%d points)", row["quantity"], row["nu_exponent"], row["points"])
    if result.aborted:
        logger.warning("%d sweep points aborted", len(result.aborted))
        return ExitCode.FAILED
    return ExitCode.OK


def cmd_audit(args: argparse.Namespace) -> int:
    f = Frequency(args.k, args.eta)
    wp = WeightParams(args.beta, args.delta_beta)
    if not args.nu > 0:
        raise InadmissibleParametersError("audit-multipliers needs --nu > 0", code="multiplier")

    async def run() -> Any:
        async with _lab(args) as lab:
            return await lab.modes.audit([f], [args.nu], wp, n_times=args.times, t_max=args.t_end)

    (audit,) = asyncio.run(run())
    if args.format == "json":
        _emit(_json({"schema": Schema.REPORT, "kind": "audit", **audit.to_dict()}), args.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "min_slack", "t_at_min", "violations", "informational", "passed"])
        for name, c in sorted(audit.checks.items()):
            writer.writerow([name, _fmt(c.min_slack), _fmt(c.t_at_min), c.violations, c.informational, c.passed])
        _emit(buf.getvalue(), args.out)
    for c in audit.failures():
        logger.warning("%s violated %d times, min slack %.3g at t=%g", c.name, c.violations, c.min_slack, c.t_at_min)
    return ExitCode.OK if audit.passed else ExitCode.FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    vc = VerifyConfig(
        level=args.level,
        w_exponent=args.w_exponent,
        seed=args.seed,
        config=SolverConfig(rtol=args.rtol),
    )

    async def run() -> Any:
        async with _lab(args) as lab:
            with _progress(not args.quiet) as on_progress:
                return await lab.verify(vc, args.only, on_progress=on_progress)

    report = asyncio.run(run())
    for r in sorted(report.results, key=lambda r: r.id):
        status = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        if not args.quiet:
            _stderr.print(f"{r.id:>2} {r.name:<24} {status}")
        for line in r.diagnostics:
            logger.info("criterion %d: %s", r.id, line)
    _emit(report.to_json(), args.out)
    return ExitCode.OK if report.passed else ExitCode.FAILED


# =============================================================================
# Entry point
# =============================================================================


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=_stderr, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        return args.handler(args)
    except IntegrationError as e:
        logger.error("integration failed: %s", e)
        return ExitCode.INTEGRATION
    except CouetteLabError as e:
        logger.error("%s", e)
        return ExitCode.USAGE
    except OSError as e:
        logger.error("%s", e)
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
