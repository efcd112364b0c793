import orjson
import pytest

from couette_lab import CouetteLab
from couette_lab.exceptions import SweepSpecError
from couette_lab.harness import RunPoint, SweepSpec, run_point, run_sweep
from couette_lab.harness.sweep import AXES, CSV_COLUMNS

pytestmark = pytest.mark.unit

SMALL = {
    "axes": {"k": [0, 1], "eta": [0.5], "mach": [2.0, 1.0, 1.0], "horizon": [5.0]},
    "quantities": ["transient_amplitude", "final_abs_R"],
    "n_samples": 50,
}


def test_defaults_and_dedupe():
    spec = SweepSpec.from_dict(SMALL)
    assert set(spec.axes) == set(AXES)
    assert spec.axes["mach"] == (1.0, 2.0)
    assert spec.axes["nu"] == (0.0,)
    assert spec.size == 4
    points = spec.points()
    assert [p.sort_key for p in points] == sorted(p.sort_key for p in points)

    empty = SweepSpec.from_dict({"axes": {"nu": []}})
    assert empty.size == 1
    assert empty.quantities == ("transient_amplitude",)


def test_empty_axes_sweep_matches_default_point():
    result = run_sweep(SweepSpec.from_dict({"axes": {"nu": [], "eta": []}}))
    (outcome,) = result.outcomes
    assert outcome.point == RunPoint(config=outcome.point.config)
    assert outcome.values["transient_amplitude"] == run_point(RunPoint()).transient_amplitude()


@pytest.mark.parametrize(
    "doc",
    [
        {"axes": {"temperature": [1.0]}},
        {"axes": {"nu": "1e-3"}},
        {"axes": {"nu": ["fast"]}},
        {"quantities": ["vorticity_flux"]},
        {"init": {"R": "x"}},
        [],
    ],
)
def test_spec_validation(doc):
    with pytest.raises(SweepSpecError):
        SweepSpec.from_dict(doc)


def test_cap():
    doc = {"axes": {"nu": [1e-2, 1e-3, 1e-4], "k": [1, 2]}}
    with pytest.raises(SweepSpecError) as exc:
        SweepSpec.from_dict(doc, cap=5)
    assert exc.value.details["size"] == 6


def test_from_file(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_bytes(orjson.dumps(SMALL))
    assert SweepSpec.from_file(path).size == 4
    path.write_text("{")
    with pytest.raises(SweepSpecError):
        SweepSpec.from_file(path)


def test_aborted_points_are_flagged():
    result = run_sweep(SweepSpec.from_dict(SMALL))
    assert len(result.outcomes) == 4
    assert len(result.aborted) == 2
    lines = result.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 4 * 2
    aborted = [line for line in lines[1:] if line.endswith(",aborted")]
    assert len(aborted) == 4
    assert all(line.startswith("0,") and ",nan," in line for line in aborted)
    summary = result.summary()
    assert summary["points"] == 4
    assert len(summary["aborted"]) == 2


async def test_parallel_sweep_matches_serial():
    spec = SweepSpec.from_dict(SMALL)
    serial = run_sweep(spec).to_csv()
    async with CouetteLab(jobs=2) as lab:
        parallel = await lab.sweeps.run(spec)
    assert parallel.to_csv() == serial


async def test_lab_sweep_reports_progress(lab):
    seen = []
    result = await lab.sweeps.run(SweepSpec.from_dict(SMALL), on_progress=seen.append)
    assert len(seen) == 4
    assert seen[-1].completed == 4
    assert seen[-1].progress_percent == 100.0
    assert len(result.aborted) == 2


def test_nu_scaling(tmp_path):
    doc = {
        "axes": {"k": [1], "eta": [0.0], "nu": [1e-2, 1e-3], "horizon": [10.0]},
        "init": {"Xi": 1},
        "quantities": ["transient_amplitude"],
        "n_samples": 200,
    }
    result = run_sweep(SweepSpec.from_dict(doc))
    scaling = result.scaling()
    assert len(scaling) == 1
    assert scaling[0]["points"] == 2
    assert scaling[0]["quantity"] == "transient_amplitude"
    path = result.write_summary(tmp_path / "summary.json")
    assert orjson.loads(path.read_bytes())["kind"] == "sweep"
