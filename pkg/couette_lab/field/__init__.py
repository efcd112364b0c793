from couette_lab.field.evolve import FieldRun, ModeResult, ModeTask, evolve_mode, field_tasks, merge_results, run_field
from couette_lab.field.grid import FieldMode, GridSpec, NormSpec, SpectralField, assemble
from couette_lab.field.io import export_physical, read_field, write_field
from couette_lab.field.norms import HelmholtzNorms, helmholtz_norms, sobolev_norm, velocity_norm

__all__ = [
    # Grid
    "GridSpec",
    "FieldMode",
    "SpectralField",
    "NormSpec",
    "assemble",
    # Norms
    "HelmholtzNorms",
    "helmholtz_norms",
    "velocity_norm",
    "sobolev_norm",
    # Evolution
    "ModeTask",
    "ModeResult",
    "FieldRun",
    "evolve_mode",
    "field_tasks",
    "merge_results",
    "run_field",
    # Files
    "read_field",
    "write_field",
    "export_physical",
]
