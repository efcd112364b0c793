from couette_lab.harness.fitting import (
    RateReport,
    burst_envelope,
    burst_times,
    envelope,
    fit_algebraic_decay,
    fit_exponential_rate,
    fit_power_law,
    fit_scaling,
)
from couette_lab.harness.runs import ModeSeries, RunPoint, run_point
from couette_lab.harness.sweep import SweepResult, SweepSpec, run_sweep
from couette_lab.harness.verify import VerifyConfig, VerifyReport, verify

__all__ = [
    # Fitting
    "RateReport",
    "fit_power_law",
    "fit_exponential_rate",
    "fit_algebraic_decay",
    "fit_scaling",
    "envelope",
    "burst_times",
    "burst_envelope",
    # Runs
    "RunPoint",
    "ModeSeries",
    "run_point",
    # Sweeps
    "SweepSpec",
    "SweepResult",
    "run_sweep",
    # Verification
    "VerifyConfig",
    "VerifyReport",
    "verify",
]
