import numpy as np
import pytest

from couette_lab import CouetteLab, SolverConfig
from couette_lab.base import BaseLab, resolve_jobs
from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.field import assemble, run_field
from couette_lab.harness import RunPoint, run_point
from couette_lab.presets import FieldPresets
from couette_lab.symbols import FluidParams, Frequency

pytestmark = pytest.mark.unit


def test_resolve_jobs(monkeypatch):
    monkeypatch.delenv("CSPEC_JOBS", raising=False)
    assert resolve_jobs() == 1
    assert resolve_jobs(3) == 3
    assert resolve_jobs("auto") >= 1
    monkeypatch.setenv("CSPEC_JOBS", "4")
    assert resolve_jobs() == 4
    with pytest.raises(InadmissibleParametersError):
        resolve_jobs(0)
    with pytest.raises(InadmissibleParametersError):
        resolve_jobs("many")


def test_base_lab_is_abstract():
    with pytest.raises(TypeError):
        BaseLab()


def test_solver_config_validation():
    with pytest.raises(InadmissibleParametersError):
        SolverConfig(rtol=0.0)
    config = SolverConfig().with_rtol(1e-10)
    assert config.rtol == 1e-10
    assert config.step_cap(0.0) == float("inf")
    assert config.step_cap(2.0) == pytest.approx(0.1)


async def test_subclients_are_lazy(lab):
    assert lab._modes is None
    modes = lab.modes
    assert lab.modes is modes
    assert lab.fields is lab.fields
    assert lab.sweeps is lab.sweeps
    assert lab._describe()["rtol"] == lab.config.rtol


async def test_mode_run_matches_serial(lab):
    point = RunPoint(k=1, eta=0.5, mach=1.0, horizon=10.0, n_samples=50)
    series = await lab.modes.run(point)
    reference = run_point(point)
    assert np.array_equal(series.R, reference.R)
    assert np.array_equal(series.A, reference.A)


async def test_run_many_returns_failures():
    async with CouetteLab(jobs=1) as lab:
        results = await lab.modes.run_many([RunPoint(k=1, eta=0.5, horizon=2.0), RunPoint(k=0, horizon=2.0)])
    assert results[0].times[-1] == 2.0
    assert isinstance(results[1], InadmissibleParametersError)


async def test_field_run_independent_of_jobs():
    field = assemble(FieldPresets.RANDOM_BAND, seed=2, eta_band=1.0)
    params = FluidParams(1.0, 1e-2)
    times = np.linspace(0.0, 5.0, 6)
    serial = run_field(field, params, 5.0, sample_times=times)
    seen = []
    async with CouetteLab(jobs=2) as lab:
        parallel = await lab.fields.run(field, params, 5.0, sample_times=times, on_progress=seen.append)
    assert parallel.keys == serial.keys
    assert np.array_equal(parallel.states, serial.states)
    assert len(seen) == len(serial.keys)


async def test_audit_and_zero(lab):
    audits = await lab.modes.audit([Frequency(1, 2.0), Frequency(2, -3.0)], [1e-2], n_times=500)
    assert len(audits) == 2
    assert all(a.passed for a in audits)
    assert audits[0].n_times == 500

    zero = await lab.modes.zero(FluidParams(1.0, 1e-2), [0.0, 10.0], eta_max=1.0, d_eta=0.1)
    assert zero.states.shape == (2, 20, 3)
