"""Named constants for couette-lab.

Usage:
    from couette_lab.constants import WeightScheme, NormKind

    triple = run.weighted(WeightScheme.W_WEIGHT, wp=WeightParams())
    spec = NormSpec(NormKind.ISO, s=-1.5)
"""

from typing import Literal


class WeightScheme:
    """Weighted-variable schemes for viscous energies."""

    P_WEIGHT = "p_weight"
    W_WEIGHT = "w_weight"
    TILDE_LAMBDA0 = "tilde_lambda0"


class NormKind:
    """Sobolev weight families on the (k, eta) grid."""

    L2 = "l2"
    ANISO = "aniso"
    ISO = "iso"


class SolverKind:
    """Which per-mode solver a run was routed to."""

    INVISCID = "inviscid"
    VISCOUS = "viscous"
    ZERO = "zero"


class Regime:
    """FluidParams validation labels."""

    THEOREM = "theorem-regime"
    OUTSIDE = "outside-theorem-regime"


class Schema:
    """Versioned document schemas."""

    FIELD = "cspec-field/1"
    REPORT = "cspec-report/1"


class Defaults:
    """Default numerical parameters."""

    BETA = 50.0
    DELTA_BETA = 1.0 / 12.0
    C_OSC = 0.2  # radians per step
    RTOL = 1e-8
    ATOL = 1e-12
    UNDERFLOW_RATIO = 1e-14
    DIRECTION_SCAN = 16
    SWEEP_CAP = 100_000
    MIN_FIT_SAMPLES = 20
    GRID_K_MAX = 8
    GRID_ETA_MAX = 64.0
    GRID_D_ETA = 0.5
    CSV_FLOAT = ".17g"
    JOBS_ENV = "CSPEC_JOBS"


class ExitCode:
    """Process exit codes of the command-line interface."""

    OK = 0
    FAILED = 1
    USAGE = 2
    INTEGRATION = 3


Level = Literal["quick", "full"]

OutputFormat = Literal["csv", "json"]

FitKind = Literal["power", "exponential", "algebraic"]

Scheme = Literal["p_weight", "w_weight", "tilde_lambda0"]
