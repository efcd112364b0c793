"""The acceptance suite behind `couette-lab verify`.

Each criterion is a pure function of (criterion id, VerifyConfig); results are
merged in id order, so the verdict document is byte-identical between runs
except for `generated_at`.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import orjson

from couette_lab.base import SolverConfig
from couette_lab.constants import Level, NormKind, Schema, WeightScheme
from couette_lab.exceptions import CouetteLabError, GenericityError, InadmissibleParametersError
from couette_lab.field.evolve import FieldRun, run_field
from couette_lab.field.grid import FieldMode, GridSpec, NormSpec, assemble
from couette_lab.harness.fitting import (
    RateReport,
    burst_envelope,
    burst_times,
    fit_algebraic_decay,
    fit_exponential_rate,
    fit_power_law,
)
from couette_lab.harness.sweep import SweepSpec, run_sweep
from couette_lab.modes.inviscid import InviscidInit, perturb_generic_detailed, solve_mode
from couette_lab.modes.viscous import ViscousState, duhamel_xi, solve_viscous
from couette_lab.modes.zero import aggregate_El, evolve_zero, heat_profile, zero_grid
from couette_lab.presets import FieldPresets, ReferenceMode
from couette_lab.symbols import FluidParams, Frequency, WeightParams, check_multiplier_inequalities, p

logger = logging.getLogger(__name__)

BURST_POINTS = 24


@dataclass(frozen=True)
class LevelParams:
    """Parameter set of every criterion at one verification level."""

    growth_machs: tuple[float, ...]
    growth_window: tuple[float, float]
    n_anchors: int
    conservation_mach: float
    conservation_horizon: float
    band_modes: int
    band_machs: tuple[float, ...]
    band_horizon: float
    band_k_max: int
    band_eta_max: float
    generic_samples: int
    generic_horizon: float
    audit_times: int
    audit_ks: tuple[int, ...]
    audit_etas: int
    audit_nus: tuple[float, ...]
    dissipation_nus: tuple[float, ...]
    dissipation_modes: tuple[tuple[int, float], ...]
    transient_nus: tuple[float, ...]
    transient_modes: tuple[tuple[int, float], ...]
    zero_eta_max: float
    zero_d_eta: float
    oracle_horizon: float
    wkb_mode: tuple[int, float]
    wkb_window: tuple[float, float]
    window_nu: float
    window_horizon: float


QUICK = LevelParams(
    growth_machs=(50.0,),
    growth_window=(50.0, 500.0),
    n_anchors=40,
    conservation_mach=50.0,
    conservation_horizon=500.0,
    band_modes=12,
    band_machs=(1.0, 5.0),
    band_horizon=40.0,
    band_k_max=2,
    band_eta_max=10.0,
    generic_samples=5,
    generic_horizon=30.0,
    audit_times=1_000,
    audit_ks=(1, 2, -1),
    audit_etas=9,
    audit_nus=(1e-2, 1e-3, 1e-4),
    dissipation_nus=(1e-2, 1e-4),
    dissipation_modes=((1, 0.0), (1, 5.0)),
    transient_nus=(1e-2, 1e-3, 1e-4),
    transient_modes=((1, 0.0),),
    zero_eta_max=6.0,
    zero_d_eta=0.01,
    oracle_horizon=50.0,
    wkb_mode=(1, 0.0),
    wkb_window=(2.0, 20.0),
    window_nu=1e-12,
    window_horizon=100.0,
)

FULL = LevelParams(
    growth_machs=ReferenceMode.MACH_NUMBERS,
    growth_window=(50.0, 500.0),
    n_anchors=40,
    conservation_mach=1.0,
    conservation_horizon=500.0,
    band_modes=100,
    band_machs=(0.5, 1.0, 5.0),
    band_horizon=1000.0,
    band_k_max=4,
    band_eta_max=40.0,
    generic_samples=20,
    generic_horizon=50.0,
    audit_times=10_000,
    audit_ks=(1, 2, 3, 4, -1),
    audit_etas=20,
    audit_nus=(1e-2, 1e-3, 1e-4),
    dissipation_nus=(1e-2, 1e-3, 1e-4),
    dissipation_modes=((1, 0.0), (1, 40.0), (2, -20.0), (4, 40.0)),
    transient_nus=(1e-2, 1e-3, 1e-4),
    transient_modes=((1, 0.0), (2, 0.0)),
    zero_eta_max=6.0,
    zero_d_eta=0.01,
    oracle_horizon=50.0,
    wkb_mode=(1, 0.0),
    wkb_window=(20.0, 200.0),
    window_nu=1e-12,
    window_horizon=300.0,
)


@dataclass(frozen=True)
class VerifyConfig:
    """Settings of one verification run.

    Attributes:
        level: "quick" (reduced Mach numbers and horizons) or "full" (stated parameters).
        w_exponent: Exponent of w in the W_WEIGHT variables (default: 3/4).
        dissipation_constant: Bound C in e^(nu^(1/3) t / 32) E^w(t) <= C E^w(0) (default: 4,
            the ratio of the energy's coercivity constants).
        seed: Seed of the random data.
        config: Solver settings.
    """

    level: Level = "quick"
    w_exponent: float = 0.75
    dissipation_constant: float = 4.0
    seed: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def params(self) -> LevelParams:
        return FULL if self.level == "full" else QUICK


@dataclass
class CriterionResult:
    """Verdict of one criterion with its metrics."""

    id: int
    name: str
    passed: bool
    metrics: dict[str, Any] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "metrics": self.metrics,
            "diagnostics": self.diagnostics,
        }


def _reference() -> Frequency:
    return Frequency(ReferenceMode.K, ReferenceMode.ETA)


def _burst_run(source: Any, M: float, lp: LevelParams, config: SolverConfig) -> FieldRun:
    f = _reference()
    times = burst_times(
        *lp.growth_window,
        lp.n_anchors,
        period=lambda a: 2.0 * math.pi * M / math.sqrt(float(p(a, f))),
        points=BURST_POINTS,
    )
    field_ = assemble(source)
    return run_field(field_, FluidParams(M), float(times.max()), sample_times=times, config=config)


def _transient_modes() -> list[FieldMode]:
    grid = GridSpec()
    j = grid.index_of(ReferenceMode.ETA)
    R, A = complex(ReferenceMode.R_IN_TRANSIENT), complex(ReferenceMode.A_IN_TRANSIENT)
    return [FieldMode(ReferenceMode.K, j, R, A, -R)]


def _slope(run: FieldRun, series: np.ndarray, lp: LevelParams, name: str, expected: float, tol: float) -> dict:
    t_env, v_env = burst_envelope(run.times, series, BURST_POINTS)
    report = fit_power_law(t_env, v_env, (lp.growth_window[0], float(run.times.max())),
                           quantity=name, expected=expected, tolerance=tol)
    return report.to_dict()


def criterion_inviscid_growth(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    metrics, ok = {}, True
    for M in lp.growth_machs:
        run = _burst_run(FieldPresets.FIG1_FORCED, M, lp, vc.config)
        fit = _slope(run, run.growth_series(), lp, "Q+rho/M", 0.5, 0.05)
        metrics[f"mach={M:g}"] = fit
        ok &= bool(fit["passed"])
    return CriterionResult(1, "inviscid_growth", ok, metrics)


def criterion_conservation(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    f = _reference()
    R, A, xi = ReferenceMode.R_IN_TRANSIENT, ReferenceMode.A_IN_TRANSIENT, ReferenceMode.XI_IN
    run = solve_viscous(ViscousState(R, A, xi - R), f, FluidParams(lp.conservation_mach), lp.conservation_horizon,
                        config=vc.config)
    defect = float(np.max(np.abs(run.xi() - xi)) / abs(xi))
    return CriterionResult(2, "conservation", defect <= 1e-8, {"max_relative_defect": defect, "steps": run.stats.accepted})


def criterion_symmetrizer_band(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    rng = np.random.default_rng(vc.seed)
    worst_change, worst_ratio, ok = 0.0, 0.0, True
    diagnostics = []
    for M in lp.band_machs:
        for _ in range(lp.band_modes):
            k = int(rng.integers(1, lp.band_k_max + 1))
            eta = float(rng.uniform(-lp.band_eta_max, lp.band_eta_max))
            draw = rng.standard_normal(4)
            init = InviscidInit.from_xi(complex(draw[0], draw[1]), complex(draw[2], draw[3]), 0j)
            run = solve_mode(init, Frequency(k, eta), M, 2.0 * lp.band_horizon, config=vc.config)
            zn = run.z_norm()
            first = run.times <= lp.band_horizon
            r1 = float(zn[first].max() / zn[first].min())
            r2 = float(zn.max() / zn.min())
            change = abs(r2 / r1 - 1.0)
            worst_change = max(worst_change, change)
            worst_ratio = max(worst_ratio, r2)
            if not (math.isfinite(r2) and change < 0.05):
                ok = False
                diagnostics.append(f"k={k} eta={eta:.6g} M={M:g}: ratio {r1:.6g} -> {r2:.6g}")
    return CriterionResult(
        3,
        "symmetrizer_band",
        ok,
        {"modes": lp.band_modes * len(lp.band_machs), "max_ratio": worst_ratio, "max_relative_change": worst_change},
        diagnostics,
    )


def criterion_inviscid_damping(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    metrics, ok = {}, True
    for M in lp.growth_machs:
        forced = _burst_run(FieldPresets.FIG1_FORCED, M, lp, vc.config).norm_series()
        free_run = _burst_run(_transient_modes(), M, lp, vc.config)
        free = free_run.norm_series()
        t = free_run.times
        window = (lp.growth_window[0], float(t.max()))
        fits = {
            "Px_xi": fit_power_law(t, forced["Px_xi"], window, quantity="Px_xi", expected=-1.0, tolerance=0.1).to_dict(),
            "Py_xi": fit_power_law(t, forced["Py_xi"], window, quantity="Py_xi", expected=-2.0, tolerance=0.2).to_dict(),
            "Px_m": _slope(free_run, free["Px_norm"], lp, "Px_m", -0.5, 0.1),
            "Py_m": _slope(free_run, free["Py_norm"], lp, "Py_m", -1.5, 0.15),
        }
        metrics[f"mach={M:g}"] = fits
        ok &= all(bool(v["passed"]) for v in fits.values())
    return CriterionResult(4, "inviscid_damping", ok, metrics)


def criterion_negative_sobolev(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    spec = NormSpec(NormKind.ISO, s=-1.5)
    metrics, ok = {}, True
    for M in lp.growth_machs:
        run = _burst_run(FieldPresets.FIG1_FORCED, M, lp, vc.config)
        series = run.sobolev_series(spec, of="Q") + run.sobolev_series(spec, of="rho") / M
        fit = _slope(run, series, lp, "Q+rho/M in H^-3/2", -1.0, 0.1)
        metrics[f"mach={M:g}"] = fit
        ok &= bool(fit["passed"])
    return CriterionResult(5, "negative_sobolev_decay", ok, metrics)


def criterion_genericity(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    rng = np.random.default_rng(vc.seed + 1)
    eps = 1e-3
    # the sampled horizon is what the bound is checked on; no tail beyond it
    config = replace(vc.config, tail_horizon_cap=lp.generic_horizon)
    cases: list[tuple[Frequency, InviscidInit]] = []
    for _ in range(lp.generic_samples):
        d = rng.standard_normal(6)
        cases.append((_reference(), InviscidInit(complex(d[0], d[1]), complex(d[2], d[3]), complex(d[4], d[5]))))
    cases.append((Frequency(1, 0.5), InviscidInit()))

    ok, diagnostics = True, []
    worst_margin, worst_disp = math.inf, 0.0
    for f, init in cases:
        try:
            res = perturb_generic_detailed(init, f, 1.0, eps, lp.generic_horizon, config=config)
        except GenericityError as e:
            ok = False
            diagnostics.append(str(e))
            continue
        margin = res.inf_gamma / (0.5 * res.bound) if res.bound > 0 else math.inf
        worst_margin = min(worst_margin, margin)
        worst_disp = max(worst_disp, res.displacement / eps)
        if res.displacement > 2.0 * eps:
            ok = False
            diagnostics.append(f"k={f.k} eta={f.eta:g}: displacement {res.displacement:.3e} > 2 eps")
    return CriterionResult(
        6,
        "genericity",
        ok,
        {"cases": len(cases), "min_bound_margin": worst_margin, "max_displacement_over_eps": worst_disp},
        diagnostics,
    )


def criterion_multiplier_audit(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    wp = WeightParams()
    etas = np.linspace(-40.0, 40.0, lp.audit_etas)
    failures, worst = [], math.inf
    n = 0
    for nu in lp.audit_nus:
        width = wp.beta * nu ** (-1.0 / 3.0)
        for k in lp.audit_ks:
            for eta in etas:
                f = Frequency(k, float(eta))
                t_grid = np.linspace(0.0, max(f.critical_time, 0.0) + 2.0 * width, lp.audit_times)
                audit = check_multiplier_inequalities(f, nu, wp, t_grid)
                n += 1
                for check in audit.checks.values():
                    if not check.informational:
                        worst = min(worst, check.min_slack)
                failures += [f"k={k} eta={eta:g} nu={nu:g}: {c.name}" for c in audit.failures()]
    return CriterionResult(
        7,
        "multiplier_audit",
        not failures,
        {"audits": n, "times_per_audit": lp.audit_times, "min_slack": worst},
        failures[:20],
    )


def criterion_enhanced_dissipation(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    wp = WeightParams()
    worst_c, ok = 0.0, True
    metrics: dict[str, Any] = {}
    diagnostics = []
    for nu in lp.dissipation_nus:
        scale = nu ** (-1.0 / 3.0)
        horizon = 6.0 * scale
        for k, eta in lp.dissipation_modes:
            f = Frequency(k, eta)
            params = FluidParams(1.0, nu, 0.0)
            times = np.linspace(0.0, horizon, 600)
            run = solve_viscous(ViscousState(1.0, 1.0, 0.0), f, params, horizon, sample_times=times, config=vc.config)
            Ew = run.energy(WeightScheme.W_WEIGHT, wp=wp, w_exponent=vc.w_exponent)
            c = float(np.max(np.exp(times / (32.0 * scale)) * Ew / Ew[0]))
            worst_c = max(worst_c, c)
            key = f"k={k} eta={eta:g} nu={nu:g}"
            try:
                rate = fit_exponential_rate(times, Ew, (2.0 * scale, horizon), quantity="Ew",
                                            lower_bound=1.0 / (32.0 * scale))
                metrics[key] = {"constant": c, "rate": rate.fitted, "rate_floor": rate.lower_bound}
                if not rate.passed:
                    ok = False
                    diagnostics.append(f"{key}: rate {rate.fitted:.4e} below {rate.lower_bound:.4e}")
            except CouetteLabError as e:
                # the energy fell below double precision inside the window
                metrics[key] = {"constant": c, "rate": None, "note": e.message}
    if worst_c > vc.dissipation_constant:
        ok = False
        diagnostics.append(f"constant {worst_c:.4g} exceeds {vc.dissipation_constant:g}")
    window = critical_window_growth(vc)
    metrics["critical_window"] = window.to_dict()
    if not window.passed:
        ok = False
        diagnostics.append(f"E^w grows like t^{window.fitted:.3f} across the critical window")
    metrics["max_constant"] = worst_c
    metrics["w_exponent"] = vc.w_exponent
    return CriterionResult(8, "enhanced_dissipation", ok, metrics, diagnostics)


def critical_window_growth(vc: VerifyConfig) -> RateReport:
    """Power-law growth of E^w across the critical window of (k, eta) = (1, 0).

    The window opens at t = 0 and, at nu = window_nu, viscosity and the
    m multiplier are inert over the horizon. With Xi = 0 the weighted
    triple reduces to the symmetrized inviscid pair, whose energy is
    adiabatic, so the fitted exponent must stay within 0.25 of zero.
    """
    lp = vc.params
    f = Frequency(1, 0.0)
    params = FluidParams(1.0, lp.window_nu, 0.0)
    times = np.geomspace(1.0, lp.window_horizon, 400)
    run = solve_viscous(ViscousState(1.0, 0.0, -1.0), f, params, lp.window_horizon, sample_times=times, config=vc.config)
    Ew = run.energy(WeightScheme.W_WEIGHT, w_exponent=vc.w_exponent)
    return fit_power_law(times, Ew, (10.0, lp.window_horizon), quantity="Ew_window", expected=0.0, tolerance=0.25)


def criterion_transient_scaling(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    horizon = 6.0 * min(lp.transient_nus) ** (-1.0 / 3.0)
    metrics: dict[str, Any] = {}
    ok = True
    for k, eta in lp.transient_modes:
        spec = SweepSpec.from_dict(
            {
                "axes": {"k": [k], "eta": [eta], "mach": [1.0], "nu": list(lp.transient_nus), "horizon": [horizon]},
                "init": {"R": 0.0, "A": 0.0, "Xi": 1.0},
                "quantities": ["transient_amplitude"],
            }
        )
        result = run_sweep(spec, vc.config)
        rows = result.scaling()
        if result.aborted or not rows:
            ok = False
            metrics[f"k={k} eta={eta:g}"] = {"aborted": len(result.aborted)}
            continue
        exponent = rows[0]["nu_exponent"]
        passed = abs(exponent + 1.0 / 6.0) <= 0.08
        ok &= passed
        metrics[f"k={k} eta={eta:g}"] = {
            "nu_exponent": exponent,
            "residual": rows[0]["residual"],
            "amplitudes": [o.values["transient_amplitude"] for o in result.outcomes],
            "passed": passed,
        }
    return CriterionResult(9, "transient_scaling", ok, metrics)


def criterion_zero_mode(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    nu = 1e-2
    params = FluidParams(1.0, nu, 0.0)
    etas = zero_grid(lp.zero_eta_max, lp.zero_d_eta)
    times = np.geomspace(5.0 / nu, 50.0 / nu, 40)
    run = evolve_zero(etas, heat_profile(etas, params), params, times)
    metrics: dict[str, Any] = {}
    ok = True
    for ell in (1, 2):
        fit = fit_algebraic_decay(times, aggregate_El(run, ell, lp.zero_d_eta), rate=params.mu,
                                  quantity=f"E^{ell}", expected=-float(ell), tolerance=0.2)
        metrics[f"ell={ell}"] = fit.to_dict()
        ok &= bool(fit.passed)

    inviscid = FluidParams(1.0)
    wave = evolve_zero(etas, heat_profile(etas, params), inviscid, np.linspace(0.0, 500.0, 50))
    e0 = aggregate_El(wave, 0, lp.zero_d_eta)
    drift = float(np.max(np.abs(e0 / e0[0] - 1.0)))
    metrics["wave_energy_drift"] = drift
    ok &= drift <= 1e-6
    return CriterionResult(10, "zero_mode_decay", ok, metrics)


def criterion_oracles(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    f = _reference()
    config = vc.config.with_rtol(1e-10)
    R, A, xi = ReferenceMode.R_IN_TRANSIENT, ReferenceMode.A_IN_TRANSIENT, ReferenceMode.XI_IN
    times = np.linspace(0.0, lp.oracle_horizon, 201)
    inv = solve_mode(InviscidInit.from_xi(R, A, xi), f, 1.0, lp.oracle_horizon, sample_times=times, config=config)
    vis = solve_viscous(ViscousState(R, A, xi - R), f, FluidParams(1.0), lp.oracle_horizon,
                        sample_times=times, config=config)
    scale = max(float(np.max(np.abs(inv.R))), float(np.max(np.abs(inv.A))))
    solver_gap = max(float(np.max(np.abs(inv.R - vis.R))), float(np.max(np.abs(inv.A - vis.A)))) / scale

    damped = solve_viscous(ViscousState(R, A, xi - R), f, FluidParams(1.0, 1e-3, 0.0), lp.oracle_horizon,
                           config=config, keep_dense=True)
    gaps = []
    for t in (0.25 * lp.oracle_horizon, 0.5 * lp.oracle_horizon, lp.oracle_horizon):
        state = damped.trajectory.evaluate([t])[0]
        evolved = complex(state[0] + state[2])
        gaps.append(abs(duhamel_xi(damped, t) - evolved) / max(abs(evolved), abs(xi) * 1e-12))
    duhamel_gap = float(max(gaps))
    return CriterionResult(
        11,
        "oracle_equivalence",
        solver_gap <= 1e-6 and duhamel_gap <= 1e-6,
        {"solver_relative_gap": solver_gap, "duhamel_relative_gap": duhamel_gap},
    )


def criterion_wkb(vc: VerifyConfig) -> CriterionResult:
    lp = vc.params
    M = 0.01
    f = Frequency(*lp.wkb_mode)
    times = burst_times(
        *lp.wkb_window,
        lp.n_anchors,
        period=lambda a: 2.0 * math.pi * M / math.sqrt(float(p(a, f))),
        points=BURST_POINTS,
    )
    run = solve_mode(InviscidInit.from_xi(1.0, 0.0, 0.0), f, M, float(times.max()), sample_times=times,
                     config=vc.config)
    scaled = np.abs(run.R) / np.asarray(p(run.times, f)) ** 0.25
    _, env = burst_envelope(run.times, scaled, BURST_POINTS)
    mid = float(np.median(env))
    spread = float(np.max(np.abs(env / mid - 1.0)))
    return CriterionResult(12, "wkb_envelope", spread <= 0.1, {"median": mid, "max_relative_deviation": spread})


CRITERIA: dict[int, Callable[[VerifyConfig], CriterionResult]] = {
    1: criterion_inviscid_growth,
    2: criterion_conservation,
    3: criterion_symmetrizer_band,
    4: criterion_inviscid_damping,
    5: criterion_negative_sobolev,
    6: criterion_genericity,
    7: criterion_multiplier_audit,
    8: criterion_enhanced_dissipation,
    9: criterion_transient_scaling,
    10: criterion_zero_mode,
    11: criterion_oracles,
    12: criterion_wkb,
}


# LevelParams fields each criterion reads; reported with its verdict
CRITERION_PARAMETERS: dict[int, tuple[str, ...]] = {
    1: ("growth_machs", "growth_window", "n_anchors"),
    2: ("conservation_mach", "conservation_horizon"),
    3: ("band_modes", "band_machs", "band_horizon", "band_k_max", "band_eta_max"),
    4: ("growth_machs", "growth_window", "n_anchors"),
    5: ("growth_machs", "growth_window", "n_anchors"),
    6: ("generic_samples", "generic_horizon"),
    7: ("audit_times", "audit_ks", "audit_etas", "audit_nus"),
    8: ("dissipation_nus", "dissipation_modes", "window_nu", "window_horizon"),
    9: ("transient_nus", "transient_modes"),
    10: ("zero_eta_max", "zero_d_eta"),
    11: ("oracle_horizon",),
    12: ("wkb_mode", "wkb_window", "n_anchors"),
}


def level_parameters(cid: int, vc: VerifyConfig) -> dict[str, Any]:
    """The level and the parameter values criterion `cid` ran with."""
    lp = vc.params
    return {"level": vc.level, **{name: getattr(lp, name) for name in CRITERION_PARAMETERS[cid]}}


def evaluate_criterion(task: tuple[int, VerifyConfig]) -> CriterionResult:
    """Worker: run one criterion; solver failures become a failed verdict."""
    cid, vc = task
    fn = CRITERIA[cid]
    name = fn.__name__.removeprefix("criterion_")
    try:
        result = fn(vc)
    except CouetteLabError as e:
        logger.info("criterion %d (%s) aborted: %s", cid, name, e)
        return CriterionResult(cid, name, False, {"parameters": level_parameters(cid, vc)}, [str(e)])
    result.metrics["parameters"] = level_parameters(cid, vc)
    logger.info("criterion %d (%s): %s", cid, result.name, "pass" if result.passed else "FAIL")
    return result


def criterion_tasks(vc: VerifyConfig, only: list[int] | None = None) -> list[tuple[int, VerifyConfig]]:
    ids = sorted(CRITERIA) if not only else sorted(set(only))
    unknown = [cid for cid in ids if cid not in CRITERIA]
    if unknown:
        raise InadmissibleParametersError(
            f"unknown criteria {unknown}; expected ids 1-{len(CRITERIA)}", code="verify"
        )
    return [(cid, vc) for cid in ids]


@dataclass
class VerifyReport:
    config: VerifyConfig
    results: list[CriterionResult]
    generated_at: str = field(
        default_factory=lambda: dt.datetime.now(dt.UTC).replace(microsecond=0).isoformat().replace("+00:00", "Z")
    )

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": Schema.REPORT,
            "kind": "verify",
            "level": self.config.level,
            "w_exponent": self.config.w_exponent,
            "seed": self.config.seed,
            "generated_at": self.generated_at,
            "passed": self.passed,
            "criteria": [r.to_dict() for r in sorted(self.results, key=lambda r: r.id)],
        }

    def to_json(self) -> bytes:
        return orjson.dumps(
            self.to_dict(),
            option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
        )

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_json())
        return path


def verify(vc: VerifyConfig | None = None, only: list[int] | None = None) -> VerifyReport:
    """Run the suite serially; `couette-lab verify --jobs N` runs criteria in parallel."""
    vc = vc or VerifyConfig()
    return VerifyReport(vc, [evaluate_criterion(task) for task in criterion_tasks(vc, only)])
