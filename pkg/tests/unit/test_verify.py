import orjson
import pytest

from couette_lab.constants import Schema
from couette_lab.exceptions import InadmissibleParametersError, QuadratureError
from couette_lab.harness import VerifyConfig, verify
from couette_lab.harness.verify import (
    CRITERIA,
    CRITERION_PARAMETERS,
    FULL,
    QUICK,
    criterion_tasks,
    evaluate_criterion,
    level_parameters,
)

pytestmark = pytest.mark.unit


def _stable(report) -> dict:
    doc = report.to_dict()
    doc.pop("generated_at")
    return doc


def test_levels():
    assert VerifyConfig().params is QUICK
    assert VerifyConfig(level="full").params is FULL
    assert FULL.growth_machs == (1.0, 50.0)
    assert len(CRITERIA) == 12


def test_criterion_tasks_order():
    vc = VerifyConfig()
    assert [cid for cid, _ in criterion_tasks(vc)] == list(range(1, 13))
    assert [cid for cid, _ in criterion_tasks(vc, [10, 7, 10])] == [7, 10]
    with pytest.raises(InadmissibleParametersError):
        criterion_tasks(vc, [13])


def test_multiplier_audit_criterion(save_report):
    report = verify(VerifyConfig(), only=[7])
    save_report(report.to_dict())
    assert report.passed
    (result,) = report.results
    assert result.name == "multiplier_audit"
    assert result.metrics["audits"] == 3 * 3 * 9
    assert result.metrics["times_per_audit"] == 1000


def test_report_is_deterministic():
    a = verify(VerifyConfig(), only=[10])
    b = verify(VerifyConfig(), only=[10])
    assert _stable(a) == _stable(b)
    doc = orjson.loads(a.to_json())
    assert doc["schema"] == Schema.REPORT
    assert doc["kind"] == "verify"
    assert doc["level"] == "quick"
    assert doc["generated_at"].endswith("Z")
    assert [c["id"] for c in doc["criteria"]] == [10]


def test_zero_mode_criterion():
    (result,) = verify(VerifyConfig(), only=[10]).results
    assert result.passed, result.metrics
    assert result.metrics["ell=1"]["fitted"] == pytest.approx(-1.0, abs=0.2)
    assert result.metrics["wave_energy_drift"] <= 1e-6


def test_solver_failure_becomes_failed_verdict(monkeypatch):
    def broken(vc):
        raise QuadratureError("no convergence", code="test")

    broken.__name__ = "criterion_broken"
    monkeypatch.setitem(CRITERIA, 4, broken)
    result = evaluate_criterion((4, VerifyConfig()))
    assert result.passed is False
    assert result.name == "broken"
    assert result.diagnostics == ["[test] no convergence"]
    assert result.metrics["parameters"]["growth_machs"] == QUICK.growth_machs


async def test_lab_verify_matches_serial(lab, tmp_path):
    vc = VerifyConfig(config=lab.config)
    parallel = await lab.verify(vc, only=[7, 10])
    serial = verify(vc, only=[7, 10])
    assert _stable(parallel) == _stable(serial)
    path = parallel.write(tmp_path / "report.json")
    assert orjson.loads(path.read_bytes())["passed"] is True


@pytest.mark.parametrize("cid", sorted(CRITERION_PARAMETERS))
def test_level_parameters_name_level_fields(cid):
    for level, lp in (("quick", QUICK), ("full", FULL)):
        params = level_parameters(cid, VerifyConfig(level=level))
        assert params.pop("level") == level
        assert params and all(getattr(lp, name) == value for name, value in params.items())


def test_quick_metrics_record_reduced_parameters():
    (result,) = verify(VerifyConfig(), only=[7]).results
    params = result.metrics["parameters"]
    assert params["level"] == "quick"
    assert params["audit_times"] == 1000
    # machs and horizons of the growth and band criteria are the reduced ones
    assert level_parameters(1, VerifyConfig())["growth_machs"] == (50.0,)
    assert level_parameters(3, VerifyConfig())["band_horizon"] == 40.0
    assert level_parameters(3, VerifyConfig(level="full"))["band_horizon"] == 1000.0
