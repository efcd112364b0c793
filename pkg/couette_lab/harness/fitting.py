"""Rate fitting for time series: power laws, exponential rates, algebraic decay.

Usage:
    report = fit_power_law(times, values, (50.0, 500.0), quantity="Q+rho/M", expected=0.5, tolerance=0.05)
    if not report.passed:
        ...
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from couette_lab.constants import Defaults, FitKind
from couette_lab.exceptions import InadmissibleParametersError, InsufficientSamplesError
from couette_lab.types import RealArray

logger = logging.getLogger(__name__)


@dataclass
class RateReport:
    """One fitted rate with its verdict.

    Attributes:
        quantity: Name of the fitted series.
        kind: "power" (log-log slope), "exponential" (decay rate of log v)
            or "algebraic" (exponent a of C (1 + c t)^a).
        times: Samples used by the fit.
        values: Values used by the fit.
        window: Fit window (t_lo, t_hi).
        fitted: Exponent or rate.
        residual: RMS residual of the fit in log space.
        expected: Target value, if any.
        tolerance: Allowed |fitted - expected|.
        lower_bound: Alternative one-sided verdict fitted >= lower_bound.
        extra: Additional fit parameters (e.g. the algebraic rate c).
    """

    quantity: str
    kind: FitKind
    times: RealArray
    values: RealArray
    window: tuple[float, float]
    fitted: float
    residual: float
    expected: float | None = None
    tolerance: float | None = None
    lower_bound: float | None = None
    extra: dict[str, float] = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return int(self.times.size)

    @property
    def passed(self) -> bool | None:
        """Verdict, or None when nothing was expected."""
        if self.lower_bound is not None:
            return bool(self.fitted >= self.lower_bound)
        if self.expected is None:
            return None
        tol = 0.0 if self.tolerance is None else self.tolerance
        return bool(abs(self.fitted - self.expected) <= tol)

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity,
            "kind": self.kind,
            "window": list(self.window),
            "n_samples": self.n_samples,
            "fitted": self.fitted,
            "residual": self.residual,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "lower_bound": self.lower_bound,
            "extra": dict(sorted(self.extra.items())),
            "passed": self.passed,
        }


def _window(
    times: RealArray | list[float],
    values: RealArray | list[float],
    window: tuple[float, float] | None,
    quantity: str,
) -> tuple[RealArray, RealArray, tuple[float, float]]:
    t = np.asarray(times, dtype=np.float64)
    v = np.abs(np.asarray(values))
    if t.shape != v.shape:
        raise InadmissibleParametersError(f"{t.size} times for {v.size} values", code="fit")
    lo, hi = (float(t.min()), float(t.max())) if window is None else window
    keep = (t >= lo) & (t <= hi) & (v > 0) & np.isfinite(v)
    t, v = t[keep], v[keep]
    if t.size < Defaults.MIN_FIT_SAMPLES:
        raise InsufficientSamplesError(
            f"{quantity or 'series'}: {t.size} samples in [{lo:g}, {hi:g}], need {Defaults.MIN_FIT_SAMPLES}",
            code="fit",
            details={"window": [lo, hi], "n_samples": int(t.size)},
        )
    return t, v, (lo, hi)


def _linear_fit(x: RealArray, y: RealArray) -> tuple[float, float, float]:
    """Least-squares line y = a x + b; returns (a, b, rms residual)."""
    a, b = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (a * x + b)) ** 2)))
    return float(a), float(b), rms


def envelope(times: RealArray | list[float], values: RealArray | list[float]) -> tuple[RealArray, RealArray]:
    """Local maxima of |values|; the series itself when it has fewer than three peaks."""
    t = np.asarray(times, dtype=np.float64)
    v = np.abs(np.asarray(values))
    peaks, _ = find_peaks(v)
    if peaks.size < 3:
        return t, v
    return t[peaks], v[peaks]


def burst_times(
    t_lo: float,
    t_hi: float,
    n_anchors: int = 40,
    *,
    period: float | Callable[[float], float],
    points: int = 24,
) -> RealArray:
    """Sample times in short dense bursts around log-spaced anchors.

    Burst i covers [a_i, a_i + period(a_i)] with `points` equispaced samples,
    where the anchors a_i are geometrically spaced in [t_lo, t_hi]. Returns
    n_anchors * points sorted times; `burst_envelope` groups them back.
    """
    if not (0 < t_lo < t_hi) or n_anchors < 1 or points < 2:
        raise InadmissibleParametersError("need 0 < t_lo < t_hi, n_anchors >= 1, points >= 2", code="burst")
    anchors = np.geomspace(t_lo, t_hi, n_anchors)
    width = np.array([period(a) if callable(period) else period for a in anchors], dtype=np.float64)
    frac = np.linspace(0.0, 1.0, points)
    return (anchors[:, None] + width[:, None] * frac[None, :]).ravel()


def burst_envelope(
    times: RealArray | list[float],
    values: RealArray | list[float],
    points: int = 24,
) -> tuple[RealArray, RealArray]:
    """Per-burst maximum of |values| and its time, for samples made by `burst_times`."""
    t = np.asarray(times, dtype=np.float64)
    v = np.abs(np.asarray(values))
    if t.size % points:
        raise InadmissibleParametersError(f"{t.size} samples do not split into bursts of {points}", code="burst")
    t = t.reshape(-1, points)
    v = v.reshape(-1, points)
    idx = np.argmax(v, axis=1)
    rows = np.arange(t.shape[0])
    return t[rows, idx], v[rows, idx]


def fit_power_law(
    times: RealArray | list[float],
    values: RealArray | list[float],
    window: tuple[float, float] | None = None,
    *,
    quantity: str = "",
    expected: float | None = None,
    tolerance: float | None = None,
    use_envelope: bool = False,
) -> RateReport:
    """Fit |v| ~ C t^a by log-log least squares on the window.

    Raises:
        InsufficientSamplesError: Fewer than 20 positive samples in the window.
    """
    if use_envelope:
        times, values = envelope(times, values)
    t, v, win = _window(times, values, window, quantity)
    if t.min() <= 0:
        raise InadmissibleParametersError("power-law fits need t > 0", code="fit")
    a, _, rms = _linear_fit(np.log(t), np.log(v))
    logger.debug("power-law fit %s on [%g, %g]: a=%.6f (rms %.2e)", quantity, *win, a, rms)
    return RateReport(quantity, "power", t, v, win, a, rms, expected, tolerance)


def fit_exponential_rate(
    times: RealArray | list[float],
    values: RealArray | list[float],
    window: tuple[float, float] | None = None,
    *,
    quantity: str = "",
    expected: float | None = None,
    tolerance: float | None = None,
    lower_bound: float | None = None,
) -> RateReport:
    """Fit |v| ~ C e^(-r t); reports the decay rate r (positive for decay)."""
    t, v, win = _window(times, values, window, quantity)
    a, _, rms = _linear_fit(t, np.log(v))
    logger.debug("exponential fit %s on [%g, %g]: rate=%.6e (rms %.2e)", quantity, *win, -a, rms)
    return RateReport(quantity, "exponential", t, v, win, -a, rms, expected, tolerance, lower_bound)


def _algebraic(t: RealArray, log_c: float, a: float, rate: float) -> RealArray:
    return log_c + a * np.log1p(rate * t)


def fit_algebraic_decay(
    times: RealArray | list[float],
    values: RealArray | list[float],
    window: tuple[float, float] | None = None,
    *,
    rate: float | None = None,
    quantity: str = "",
    expected: float | None = None,
    tolerance: float | None = None,
) -> RateReport:
    """Fit |v| ~ C (1 + c t)^a and report a.

    With a known `rate` c the fit is linear in log(1 + c t); otherwise
    (log C, a, c) are fitted jointly by nonlinear least squares.
    """
    t, v, win = _window(times, values, window, quantity)
    y = np.log(v)
    if rate is not None:
        a, _, rms = _linear_fit(np.log1p(rate * t), y)
        return RateReport(quantity, "algebraic", t, v, win, a, rms, expected, tolerance, extra={"rate": rate})

    a0, b0, _ = _linear_fit(np.log(t), y)
    c0 = 1.0 / max(float(t.min()), 1e-12)
    popt, _ = curve_fit(
        _algebraic,
        t,
        y,
        p0=[b0 - a0 * math.log(c0), a0, c0],
        bounds=([-np.inf, -np.inf, 0.0], [np.inf, np.inf, np.inf]),
        maxfev=20_000,
    )
    rms = float(np.sqrt(np.mean((y - _algebraic(t, *popt)) ** 2)))
    return RateReport(
        quantity, "algebraic", t, v, win, float(popt[1]), rms, expected, tolerance, extra={"rate": float(popt[2])}
    )


def fit_scaling(
    params: RealArray | list[float],
    values: RealArray | list[float],
    *,
    quantity: str = "",
    expected: float | None = None,
    tolerance: float | None = None,
) -> RateReport:
    """Log-log slope of values against a parameter (e.g. transient maximum vs nu).

    Scaling fits have few points by nature, so the sample floor is two.
    """
    x = np.asarray(params, dtype=np.float64)
    y = np.abs(np.asarray(values, dtype=np.float64))
    keep = (x > 0) & (y > 0)
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise InsufficientSamplesError(f"{quantity or 'scaling'}: need two positive points", code="fit")
    a, _, rms = _linear_fit(np.log(x), np.log(y))
    return RateReport(quantity, "power", x, y, (float(x.min()), float(x.max())), a, rms, expected, tolerance)
