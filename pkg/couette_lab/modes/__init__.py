from couette_lab.modes.inviscid import (
    GammaCurve,
    GammaResult,
    GenericPerturbation,
    InviscidInit,
    InviscidRun,
    SymmetrizerCoeffs,
    SymState,
    energy_symmetrized,
    gamma_curve,
    gamma_fn,
    matrix_L,
    mode_displacement,
    perturb_generic,
    perturb_generic_detailed,
    phase_rhs,
    rhs_inviscid,
    solve_mode,
    vector_F,
    wkb_envelope,
)
from couette_lab.modes.viscous import (
    GoodState,
    ViscousRun,
    ViscousState,
    WeightedTriple,
    duhamel_xi,
    energy_E,
    energy_E_tilde,
    energy_Ew,
    rhs_good,
    rhs_viscous,
    solve_good,
    solve_viscous,
    transient_amplitude,
)
from couette_lab.modes.zero import (
    ZeroModeRun,
    ZeroModeState,
    aggregate_El,
    energy_El,
    energy_El_aux,
    evolve_zero,
    good_unknown_residual,
    rhs_zero,
    zero_mode_matrix,
)

__all__ = [
    # Inviscid
    "InviscidInit",
    "InviscidRun",
    "SymState",
    "SymmetrizerCoeffs",
    "GammaCurve",
    "GammaResult",
    "GenericPerturbation",
    "rhs_inviscid",
    "matrix_L",
    "vector_F",
    "solve_mode",
    "gamma_fn",
    "gamma_curve",
    "energy_symmetrized",
    "phase_rhs",
    "wkb_envelope",
    "perturb_generic",
    "perturb_generic_detailed",
    "mode_displacement",
    # Viscous
    "ViscousState",
    "GoodState",
    "WeightedTriple",
    "ViscousRun",
    "rhs_viscous",
    "rhs_good",
    "solve_viscous",
    "solve_good",
    "energy_E",
    "energy_Ew",
    "energy_E_tilde",
    "duhamel_xi",
    "transient_amplitude",
    # Zero mode
    "ZeroModeState",
    "ZeroModeRun",
    "rhs_zero",
    "zero_mode_matrix",
    "evolve_zero",
    "energy_El",
    "energy_El_aux",
    "aggregate_El",
    "good_unknown_residual",
]
