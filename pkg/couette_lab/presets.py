"""Named field presets and reference data.

Usage:
    from couette_lab.presets import FieldPresets, ReferenceMode

    field = assemble(FieldPresets.FIG1_FORCED)
    f = Frequency(ReferenceMode.K, ReferenceMode.ETA)
"""


class FieldPresets:
    """Preset names accepted by `assemble` and `--preset`."""

    FIG1_FORCED = "fig1_forced"
    FIG1_TRANSIENT = "fig1_transient"
    RANDOM_BAND = "random_band"

    ALL = (FIG1_FORCED, FIG1_TRANSIENT, RANDOM_BAND)


class ReferenceMode:
    """The (k, eta) = (3, 21) reference mode, critical time eta/k = 7."""

    K = 3
    ETA = 21.0
    XI_IN = 5.0
    R_IN_TRANSIENT = 20.0
    A_IN_TRANSIENT = 50.0
    MACH_NUMBERS = (1.0, 50.0)


class RandomBandDefaults:
    """Defaults for the random_band preset."""

    SEED = 0
    K_BAND = 2
    ETA_BAND = 8.0
    AMPLITUDE = 1.0
