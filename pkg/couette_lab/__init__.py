from couette_lab.base import SolverConfig, SweepProgress
from couette_lab.types import FieldDocument, GridHeader, ModeRecord
from couette_lab.lab import CouetteLab, FieldsAPI, ModesAPI, SweepsAPI
from couette_lab.symbols import (
    FluidParams,
    Frequency,
    MultiplierAudit,
    WeightParams,
    check_multiplier_inequalities,
)
from couette_lab.modes import (
    InviscidInit,
    InviscidRun,
    ViscousRun,
    ViscousState,
    ZeroModeRun,
    evolve_zero,
    perturb_generic,
    solve_mode,
    solve_viscous,
)
from couette_lab.field import FieldRun, GridSpec, NormSpec, SpectralField, assemble, read_field, run_field, write_field
from couette_lab.harness import RunPoint, SweepSpec, VerifyConfig, run_point, run_sweep, verify
from couette_lab.constants import NormKind, SolverKind, WeightScheme
from couette_lab.presets import FieldPresets, ReferenceMode
from couette_lab.exceptions import (
    CouetteLabError,
    FieldFormatError,
    GenericityError,
    GridError,
    InadmissibleParametersError,
    InequalityViolation,
    InsufficientSamplesError,
    IntegrationError,
    QuadratureError,
    SweepSpecError,
)

__all__ = [
    # Configuration
    "SolverConfig",
    "SweepProgress",
    # Types
    "ModeRecord",
    "GridHeader",
    "FieldDocument",
    # Lab
    "CouetteLab",
    "ModesAPI",
    "FieldsAPI",
    "SweepsAPI",
    # Symbols
    "Frequency",
    "FluidParams",
    "WeightParams",
    "MultiplierAudit",
    "check_multiplier_inequalities",
    # Modes
    "InviscidInit",
    "InviscidRun",
    "ViscousState",
    "ViscousRun",
    "ZeroModeRun",
    "solve_mode",
    "solve_viscous",
    "evolve_zero",
    "perturb_generic",
    # Fields
    "GridSpec",
    "SpectralField",
    "NormSpec",
    "FieldRun",
    "assemble",
    "run_field",
    "read_field",
    "write_field",
    # Harness
    "RunPoint",
    "SweepSpec",
    "VerifyConfig",
    "run_point",
    "run_sweep",
    "verify",
    # Constants
    "WeightScheme",
    "NormKind",
    "SolverKind",
    # Presets
    "FieldPresets",
    "ReferenceMode",
    # Exceptions
    "CouetteLabError",
    "InadmissibleParametersError",
    "IntegrationError",
    "QuadratureError",
    "InequalityViolation",
    "GenericityError",
    "GridError",
    "FieldFormatError",
    "InsufficientSamplesError",
    "SweepSpecError",
]
