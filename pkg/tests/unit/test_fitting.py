import numpy as np
import pytest

from couette_lab.exceptions import InadmissibleParametersError, InsufficientSamplesError
from couette_lab.harness import (
    burst_envelope,
    burst_times,
    envelope,
    fit_algebraic_decay,
    fit_exponential_rate,
    fit_power_law,
    fit_scaling,
)

pytestmark = pytest.mark.unit


def test_power_law_exact():
    t = np.geomspace(1.0, 1000.0, 60)
    report = fit_power_law(t, 3.0 * t**0.5, quantity="sqrt", expected=0.5, tolerance=0.05)
    assert report.fitted == pytest.approx(0.5, abs=1e-6)
    assert report.residual < 1e-10
    assert report.passed is True
    assert report.n_samples == 60


def test_power_law_window_and_verdict():
    t = np.linspace(1.0, 100.0, 200)
    v = np.where(t < 50.0, t, t**-1.5)
    report = fit_power_law(t, v, (50.0, 100.0), expected=0.0, tolerance=0.1)
    assert report.window == (50.0, 100.0)
    assert report.fitted == pytest.approx(-1.5, abs=1e-6)
    assert report.passed is False
    assert fit_power_law(t, t).passed is None


def test_too_few_samples():
    t = np.linspace(1.0, 2.0, 19)
    with pytest.raises(InsufficientSamplesError) as exc:
        fit_power_law(t, t)
    assert exc.value.details["n_samples"] == 19
    # zeros are dropped before counting
    t = np.linspace(1.0, 2.0, 25)
    v = np.where(np.arange(25) < 10, 0.0, t)
    with pytest.raises(InsufficientSamplesError):
        fit_power_law(t, v)


def test_power_law_rejects():
    with pytest.raises(InadmissibleParametersError):
        fit_power_law(np.linspace(0.0, 1.0, 30), np.ones(30))
    with pytest.raises(InadmissibleParametersError):
        fit_power_law(np.ones(30), np.ones(31))


def test_exponential_rate():
    t = np.linspace(0.0, 10.0, 50)
    v = 2.0 * np.exp(-0.3 * t) * (1 + 1j)
    report = fit_exponential_rate(t, v, lower_bound=0.25)
    assert report.fitted == pytest.approx(0.3, abs=1e-9)
    assert report.passed is True
    assert report.kind == "exponential"


def test_algebraic_decay_known_rate():
    t = np.linspace(0.0, 500.0, 100)
    v = 4.0 * (1 + 0.1 * t) ** -2
    report = fit_algebraic_decay(t, v, rate=0.1, expected=-2.0, tolerance=0.01)
    assert report.fitted == pytest.approx(-2.0, abs=1e-9)
    assert report.extra == {"rate": 0.1}
    assert report.passed


def test_algebraic_decay_free_rate():
    t = np.geomspace(1.0, 1000.0, 80)
    v = 4.0 * (1 + 0.5 * t) ** -1
    report = fit_algebraic_decay(t, v)
    assert report.fitted == pytest.approx(-1.0, abs=1e-3)
    assert report.extra["rate"] == pytest.approx(0.5, rel=1e-2)


def test_envelope_of_oscillation():
    t = np.linspace(0.0, 100.0, 4001)
    v = t * np.cos(t)
    te, ve = envelope(t, v)
    assert te.size > 20
    late = te > 10.0
    assert np.allclose(ve[late], te[late], rtol=1e-2)
    short_t, short_v = envelope([0.0, 1.0], [1.0, 2.0])
    assert short_t.size == 2


def test_bursts():
    times = burst_times(1.0, 100.0, 5, period=2.0, points=4)
    assert times.size == 20
    assert times[0] == 1.0 and times[3] == pytest.approx(3.0)
    bt, bv = burst_envelope(times, -times, points=4)
    assert bt.size == 5
    assert np.allclose(bv, times.reshape(5, 4)[:, -1])
    with pytest.raises(InadmissibleParametersError):
        burst_envelope(times[:-1], times[:-1], points=4)
    with pytest.raises(InadmissibleParametersError):
        burst_times(2.0, 1.0, period=1.0)


def test_scaling():
    nus = np.array([1e-2, 1e-3, 1e-4])
    report = fit_scaling(nus, nus ** (-1 / 3), quantity="max", expected=-1 / 3, tolerance=0.02)
    assert report.fitted == pytest.approx(-1 / 3)
    assert report.passed
    assert report.to_dict()["kind"] == "power"
    with pytest.raises(InsufficientSamplesError):
        fit_scaling([1.0], [1.0])
