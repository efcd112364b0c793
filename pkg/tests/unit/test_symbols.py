import math

import numpy as np
import pytest

from couette_lab.constants import Regime
from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.symbols import (
    FluidParams,
    Frequency,
    L_nu,
    WeightParams,
    check_multiplier_inequalities,
    dt_p,
    heat_bound,
    japanese_bracket,
    mult_m,
    mult_m_ratio,
    mult_w,
    mult_w_ratio,
    p,
)

pytestmark = pytest.mark.unit


def test_bracket():
    f = Frequency(3, 21.0)
    assert f.bracket == pytest.approx(math.sqrt(1 + 9 + 441))
    assert japanese_bracket(3, 21.0) == pytest.approx(f.bracket)
    assert japanese_bracket() == 1.0


@pytest.mark.parametrize("k", [0, 1.5, True])
def test_frequency_rejects_bad_k(k):
    with pytest.raises(InadmissibleParametersError) as exc:
        Frequency(k, 1.0)
    assert exc.value.code == "frequency"


def test_p_minimum_at_critical_time():
    f = Frequency(3, 21.0)
    assert f.critical_time == 7.0
    assert p(7.0, f) == 9.0
    assert p(0.0, f) == f.p0
    ts = np.linspace(0, 20, 401)
    assert np.all(np.asarray(p(ts, f)) >= 9.0)
    assert dt_p(7.0, f) == 0.0


def test_scalar_in_scalar_out():
    f = Frequency(1, 0.5)
    assert isinstance(p(1.0, f), float)
    assert isinstance(p(np.array([1.0, 2.0]), f), np.ndarray)


def test_mult_m_range_and_ratio():
    f = Frequency(2, 5.0)
    nu = 1e-3
    ts = np.linspace(0.0, 2000.0, 4001)
    m = np.asarray(mult_m(ts, f, nu))
    assert np.all(m > math.exp(-math.pi)) and np.all(m < math.exp(math.pi))
    assert mult_m(f.critical_time, f, nu) == pytest.approx(1.0)

    h = 1e-4
    t = np.array([0.0, 2.5, 40.0])
    numeric = (np.log(mult_m(t + h, f, nu)) - np.log(mult_m(t - h, f, nu))) / (2 * h)
    assert np.allclose(mult_m_ratio(t, f, nu), numeric, rtol=1e-6)


def test_mult_w_pieces():
    f = Frequency(3, 21.0)
    nu = 1e-3
    wp = WeightParams()
    width = wp.beta * nu ** (-1 / 3)
    assert mult_w(1.0, f, nu, wp) == 1.0
    assert mult_w(7.0, f, nu, wp) == pytest.approx(1.0)
    assert mult_w(7.0 + 0.5 * width, f, nu, wp) == pytest.approx(1.0 + 0.25 * width**2)
    assert mult_w(7.0 + 2 * width, f, nu, wp) == pytest.approx(1.0 + width**2)
    # continuous at the end of the window
    assert mult_w(7.0 + width - 1e-9, f, nu, wp) == pytest.approx(1.0 + width**2, rel=1e-9)

    assert mult_w_ratio(1.0, f, nu, wp) == 0.0
    t = 7.0 + 10.0
    assert mult_w_ratio(t, f, nu, wp) == pytest.approx(dt_p(t, f) / p(t, f))


def test_mult_w_negative_critical_time():
    f = Frequency(1, -3.0)
    nu = 1e-3
    wp = WeightParams()
    # inside the window from t = 0: w = p / k^2
    assert mult_w(0.0, f, nu, wp) == pytest.approx(p(0.0, f))


def test_multipliers_need_viscosity():
    f = Frequency(1, 1.0)
    with pytest.raises(InadmissibleParametersError):
        mult_m(0.0, f, 0.0)
    with pytest.raises(InadmissibleParametersError):
        check_multiplier_inequalities(f, 0.0, WeightParams(), [0.0])


def test_weight_admissibility():
    WeightParams()
    assert WeightParams.admissibility_floor(50.0) == pytest.approx(0.08)
    with pytest.raises(InadmissibleParametersError):
        WeightParams(beta=2.0)
    with pytest.raises(InadmissibleParametersError) as exc:
        WeightParams(50.0, 0.05)
    assert exc.value.details["floor"] == pytest.approx(0.08)


def test_L_nu_derivative_and_heat_bound():
    f = Frequency(2, 9.0)
    nu = 1e-2
    h = 1e-5
    t = np.array([0.5, 3.0, 10.0])
    numeric = (np.asarray(L_nu(t + h, f, nu)) - np.asarray(L_nu(t - h, f, nu))) / (2 * h)
    assert np.allclose(numeric, nu * np.asarray(p(t, f)), rtol=1e-6)

    ts = np.linspace(0.0, 30.0, 301)
    assert np.all(np.exp(-np.asarray(L_nu(ts, f, nu))) <= np.asarray(heat_bound(ts, nu)) * (1 + 1e-12))


def test_fluid_params_validation_and_regime():
    assert FluidParams(1.0, 1e-3).regime == Regime.THEOREM
    assert FluidParams(50.0, 1e-3).regime == Regime.OUTSIDE
    assert FluidParams(1.0).is_inviscid
    assert FluidParams(1.0, 0.0, 0.1).mu == 0.1
    with pytest.raises(InadmissibleParametersError):
        FluidParams(0.0)
    with pytest.raises(InadmissibleParametersError):
        FluidParams(1.0, -1e-3)


@pytest.mark.parametrize("k,eta", [(3, 21.0), (1, -5.0), (4, 0.0), (-2, 7.5)])
def test_multiplier_audit_passes(k, eta):
    f = Frequency(k, eta)
    nu = 1e-3
    wp = WeightParams()
    end = max(f.critical_time, 0.0) + 2 * wp.beta * nu ** (-1 / 3)
    audit = check_multiplier_inequalities(f, nu, wp, np.linspace(0.0, end, 4000))
    assert audit.passed, [c.to_dict() for c in audit.failures()]
    assert audit.n_times == 4000


def test_literal_upper_bound_is_informational():
    f = Frequency(3, 21.0)
    nu = 1e-3
    wp = WeightParams()
    audit = check_multiplier_inequalities(f, nu, wp, np.linspace(0.0, 1200.0, 3000))
    literal = audit.checks["w_upper_literal"]
    assert literal.informational
    assert literal.violations > 0
    assert audit.passed

    doc = audit.to_dict()
    assert list(doc["checks"]) == sorted(doc["checks"])
    assert doc["passed"] is True


def _random_modes(rng: np.random.Generator, n: int) -> list[Frequency]:
    ks = rng.integers(1, 21, n) * rng.choice([-1, 1], n)
    return [Frequency(int(k), float(eta)) for k, eta in zip(ks, rng.uniform(-100.0, 100.0, n))]


def test_dt_p_bounded_by_sqrt_p():
    rng = np.random.default_rng(11)
    for f in _random_modes(rng, 200):
        t = rng.uniform(0.0, 1000.0, 50)
        assert np.all(np.abs(dt_p(t, f)) <= 2 * abs(f.k) * np.sqrt(p(t, f)))


def test_p_bounded_by_brackets():
    rng = np.random.default_rng(12)
    for f in _random_modes(rng, 200):
        t = rng.uniform(0.0, 1000.0, 50)
        assert np.all(p(t, f) <= 2 * japanese_bracket(t) ** 2 * f.bracket**2)
    # the factor 2 is needed once |k| > <t> and eta is near -k t
    f = Frequency(20, -20.0)
    assert p(1.0, f) > japanese_bracket(1.0) ** 2 * f.bracket**2


@pytest.mark.parametrize("k, eta", [(1, 0.0), (2, 5.0), (1, -3.0), (-1, 2.0), (3, 21.0)])
def test_multipliers_nondecreasing(k, eta):
    f, nu = Frequency(k, eta), 1e-3
    wp = WeightParams()
    ts = np.linspace(0.0, 2.0 * abs(eta / k) + 2.0 * wp.beta * nu ** (-1.0 / 3.0), 200_001)
    assert np.all(np.diff(mult_m(ts, f, nu)) >= 0)
    w = np.asarray(mult_w(ts, f, nu, wp))
    # p/k^2 meets the plateau at the window exit up to rounding
    assert np.all(np.diff(w) >= -1e-12 * w[1:])
