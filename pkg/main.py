import asyncio

import numpy as np

from couette_lab import (
    CouetteLab,
    FieldPresets,
    FluidParams,
    Frequency,
    RunPoint,
    SolverConfig,
    SweepProgress,
    SweepSpec,
    VerifyConfig,
    assemble,
)


async def mode_example():
    """Example: single modes, inviscid and viscous."""
    async with CouetteLab() as lab:
        # Reference mode (3, 21) at both Mach numbers
        for mach in (1.0, 50.0):
            series = await lab.modes.run(RunPoint(k=3, eta=21.0, mach=mach, horizon=100.0))
            print(f"M={mach}: transient amplitude {series.transient_amplitude():.3f}")

        # Viscous mode: weighted energy decay fit
        viscous = await lab.modes.run(RunPoint(k=1, eta=0.0, nu=1e-2, horizon=300.0, n_samples=600))
        for report in viscous.fits():
            print(f"{report.quantity}: fitted {report.fitted:.4f}, passed {report.passed}")

        # Zero modes on the default heat profile
        params = FluidParams(1.0, 1e-2)
        zero = await lab.modes.zero(params, np.geomspace(500.0, 5000.0, 20), d_eta=0.05)
        print(f"Zero modes: {zero.etas.size} frequencies, E1 at end {zero.aggregate(1, 0.05)[-1]:.3e}")


async def field_example():
    """Example: field evolution in a process pool."""
    field = assemble(FieldPresets.RANDOM_BAND, seed=7)
    times = np.linspace(0.0, 20.0, 41)

    async with CouetteLab(jobs="auto") as lab:
        run = await lab.fields.run(field, FluidParams(1.0, 1e-3), 20.0, sample_times=times)

    norms = run.norm_series()
    print(f"Field: {len(run.keys)} modes, ||Q|| {norms['Q_norm'][0]:.3f} -> {norms['Q_norm'][-1]:.3f}")


async def sweep_and_verify_example():
    """Example: sweep with progress callbacks, audits and the quick acceptance suite.

    - Tighter tolerances through SolverConfig
    - Progress callback on every finished point
    """

    def on_progress(progress: SweepProgress) -> None:
        print(f"  {progress}")

    spec = SweepSpec.from_dict({"axes": {"k": [1, 2], "eta": [0.0, 10.0], "mach": [1.0, 50.0]}, "n_samples": 200})

    async with CouetteLab(jobs="auto", config=SolverConfig(rtol=1e-9)) as lab:
        print(f"Sweep of {spec.size} points...")
        result = await lab.sweeps.run(spec, on_progress=on_progress)
        print(f"Aborted points: {len(result.aborted)}")

        audits = await lab.modes.audit([Frequency(1, 2.0), Frequency(3, 21.0)], [1e-3], n_times=2000)
        print(f"Audits passed: {all(a.passed for a in audits)}")

        report = await lab.verify(VerifyConfig(level="quick"), on_progress=on_progress)
        print(f"Acceptance suite passed: {report.passed}")


if __name__ == "__main__":
    # asyncio.run(mode_example())
    # asyncio.run(field_example())
    # asyncio.run(sweep_and_verify_example())
    print("couette-lab ready")
