"""Closed-form symbols and Fourier multipliers of the moving frame.

All functions accept a scalar time or a numpy array of times and return the
same shape (a Python float for scalar input).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from couette_lab.constants import Defaults, Regime
from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.types import RealArray, RealLike

logger = logging.getLogger(__name__)


def _out(value: Any) -> RealLike:
    if np.ndim(value) == 0:
        return float(value)
    return np.asarray(value, dtype=np.float64)


def japanese_bracket(*xs: RealLike) -> RealLike:
    """Return (1 + x_1^2 + ... + x_n^2)^(1/2)."""
    total: Any = 1.0
    for x in xs:
        total = total + np.square(x)
    return _out(np.sqrt(total))


@dataclass(frozen=True, slots=True)
class Frequency:
    """A Fourier mode label (k, eta) with k a nonzero integer.

    Attributes:
        k: x-wavenumber (nonzero integer).
        eta: y-frequency.
    """

    k: int
    eta: float

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k == 0:
            raise InadmissibleParametersError(
                f"k must be a nonzero integer, got {self.k!r}",
                code="frequency",
            )
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def critical_time(self) -> float:
        """Time eta/k at which p attains its minimum k^2."""
        return self.eta / self.k

    @property
    def bracket(self) -> float:
        """<k, eta> = (1 + k^2 + eta^2)^(1/2)."""
        return math.sqrt(1.0 + self.k**2 + self.eta**2)

    @property
    def p0(self) -> float:
        """p at t = 0, i.e. k^2 + eta^2."""
        return float(self.k**2 + self.eta**2)


@dataclass(frozen=True, slots=True)
class FluidParams:
    """Mach number and viscosities.

    Attributes:
        mach: Mach number M (> 0).
        shear_visc: Shear viscosity nu (>= 0).
        bulk_visc: Bulk viscosity lambda (>= 0).
    """

    mach: float
    shear_visc: float = 0.0
    bulk_visc: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mach) and self.mach > 0):
            raise InadmissibleParametersError(f"mach must be > 0, got {self.mach}", code="fluid")
        if not (self.shear_visc >= 0 and self.bulk_visc >= 0):
            raise InadmissibleParametersError(
                f"viscosities must be >= 0, got nu={self.shear_visc}, lambda={self.bulk_visc}",
                code="fluid",
            )

    @property
    def mu(self) -> float:
        return self.shear_visc + self.bulk_visc

    @property
    def is_inviscid(self) -> bool:
        return self.shear_visc == 0.0 and self.bulk_visc == 0.0

    @property
    def in_theorem_regime(self) -> bool:
        """mu <= 1/2 and M * max(mu^(1/2), nu^(1/3)) <= 1."""
        bound = max(math.sqrt(self.mu), self.shear_visc ** (1.0 / 3.0))
        return self.mu <= 0.5 and self.mach * bound <= 1.0

    @property
    def regime(self) -> str:
        return Regime.THEOREM if self.in_theorem_regime else Regime.OUTSIDE


@dataclass(frozen=True, slots=True)
class WeightParams:
    """Parameters of the w multiplier.

    Attributes:
        beta: Window length factor (window is [eta/k, eta/k + beta * nu^(-1/3)]).
        delta_beta: Relaxation weight; must satisfy
            max{2/(beta(beta^2 - 1)), 4/beta} < delta_beta <= 1.
    """

    beta: float = Defaults.BETA
    delta_beta: float = Defaults.DELTA_BETA

    def __post_init__(self) -> None:
        if not self.beta > 2:
            raise InadmissibleParametersError(f"beta must be > 2, got {self.beta}", code="weight")
        lower = self.admissibility_floor(self.beta)
        if not (lower < self.delta_beta <= 1.0):
            raise InadmissibleParametersError(
                f"delta_beta={self.delta_beta} outside ({lower}, 1] for beta={self.beta}",
                code="weight",
                details={"beta": self.beta, "delta_beta": self.delta_beta, "floor": lower},
            )

    @staticmethod
    def admissibility_floor(beta: float) -> float:
        return max(2.0 / (beta * (beta**2 - 1.0)), 4.0 / beta)


def _require_nu(nu: float) -> None:
    if not nu > 0:
        raise InadmissibleParametersError(f"nu must be > 0, got {nu}", code="multiplier")


def p(t: RealLike, f: Frequency) -> RealLike:
    """k^2 + (eta - k t)^2."""
    t = np.asarray(t, dtype=np.float64)
    return _out(f.k**2 + (f.eta - f.k * t) ** 2)


def dt_p(t: RealLike, f: Frequency) -> RealLike:
    """-2k(eta - k t)."""
    t = np.asarray(t, dtype=np.float64)
    return _out(-2.0 * f.k * (f.eta - f.k * t))


def mult_m(t: RealLike, f: Frequency, nu: float) -> RealLike:
    """exp(2 arctan(nu^(1/3) (t - eta/k))), valued in (e^-pi, e^pi)."""
    _require_nu(nu)
    t = np.asarray(t, dtype=np.float64)
    return _out(np.exp(2.0 * np.arctan(nu ** (1.0 / 3.0) * (t - f.critical_time))))


def mult_m_ratio(t: RealLike, f: Frequency, nu: float) -> RealLike:
    """dm/dt / m = 2 nu^(1/3) / (nu^(2/3) (eta/k - t)^2 + 1)."""
    _require_nu(nu)
    t = np.asarray(t, dtype=np.float64)
    c = nu ** (1.0 / 3.0)
    return _out(2.0 * c / (c * c * (f.critical_time - t) ** 2 + 1.0))


def _w_window(f: Frequency, nu: float, wp: WeightParams) -> tuple[float, float, float]:
    width = wp.beta * nu ** (-1.0 / 3.0)
    t_in = f.critical_time
    return t_in, t_in + width, 1.0 + width * width


def mult_w(t: RealLike, f: Frequency, nu: float, wp: WeightParams) -> RealLike:
    """Explicit piecewise w: 1 before the window, p/k^2 inside, 1 + beta^2 nu^(-2/3) after."""
    _require_nu(nu)
    t = np.asarray(t, dtype=np.float64)
    t_in, t_out, top = _w_window(f, nu, wp)
    inside = f.k**2 + (f.eta - f.k * t) ** 2
    inside = inside / f.k**2
    if t_in >= 0:
        w = np.where(t <= t_in, 1.0, np.where(t <= t_out, inside, top))
    elif t_out <= 0:
        w = np.ones_like(t)
    else:
        w = np.where(t <= t_out, inside, top)
    return _out(w)


def mult_w_ratio(t: RealLike, f: Frequency, nu: float, wp: WeightParams) -> RealLike:
    """dw/dt / w: equals dp/dt / p on the window, zero elsewhere."""
    _require_nu(nu)
    t = np.asarray(t, dtype=np.float64)
    t_in, t_out, _ = _w_window(f, nu, wp)
    pv = f.k**2 + (f.eta - f.k * t) ** 2
    ratio = -2.0 * f.k * (f.eta - f.k * t) / pv
    if t_out <= 0:
        return _out(np.zeros_like(t))
    on = (t >= max(t_in, 0.0)) & (t <= t_out)
    return _out(np.where(on, ratio, 0.0))


def L_nu(t: RealLike, f: Frequency, nu: float) -> RealLike:
    """nu * integral_0^t p = nu (k^2 t + eta^2 t - eta k t^2 + k^2 t^3 / 3)."""
    t = np.asarray(t, dtype=np.float64)
    k, eta = f.k, f.eta
    return _out(nu * (k * k * t + eta * eta * t - eta * k * t * t + k * k * t**3 / 3.0))


def heat_bound(t: RealLike, nu: float) -> RealLike:
    """exp(-nu t^3 / 12), the lower envelope of exp(-L_nu) for |k| >= 1."""
    t = np.asarray(t, dtype=np.float64)
    return _out(np.exp(-nu * t**3 / 12.0))


@dataclass
class InequalityCheck:
    """Minimal slack of one inequality over the audited times.

    Attributes:
        name: Identifier of the inequality.
        min_slack: Smallest (lhs - rhs) observed.
        t_at_min: Time of the smallest slack.
        violations: Number of grid points with slack below -rtol * scale.
        violating_times: First offending times (at most 10).
        informational: Reported but excluded from the verdict.
    """

    name: str
    min_slack: float
    t_at_min: float
    violations: int
    violating_times: list[float] = field(default_factory=list)
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "min_slack": self.min_slack,
            "t_at_min": self.t_at_min,
            "violations": self.violations,
            "violating_times": self.violating_times,
            "informational": self.informational,
            "passed": self.passed,
        }


@dataclass
class MultiplierAudit:
    """Result of `check_multiplier_inequalities` for one (k, eta, nu)."""

    frequency: Frequency
    nu: float
    weights: WeightParams
    n_times: int
    checks: dict[str, InequalityCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values() if not c.informational)

    def failures(self) -> list[InequalityCheck]:
        return [c for c in self.checks.values() if not c.informational and not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.frequency.k,
            "eta": self.frequency.eta,
            "nu": self.nu,
            "beta": self.weights.beta,
            "delta_beta": self.weights.delta_beta,
            "n_times": self.n_times,
            "passed": self.passed,
            "checks": {name: c.to_dict() for name, c in sorted(self.checks.items())},
        }


def _check(
    name: str,
    slack: RealArray,
    times: RealArray,
    scale: float,
    rtol: float,
    informational: bool = False,
) -> InequalityCheck:
    idx = int(np.argmin(slack))
    bad = np.flatnonzero(slack < -rtol * scale)
    return InequalityCheck(
        name=name,
        min_slack=float(slack[idx]),
        t_at_min=float(times[idx]),
        violations=int(bad.size),
        violating_times=[float(times[i]) for i in bad[:10]],
        informational=informational,
    )


def check_multiplier_inequalities(
    f: Frequency,
    nu: float,
    wp: WeightParams,
    t_grid: RealLike,
    rtol: float = 1e-12,
) -> MultiplierAudit:
    """Evaluate the m and w multiplier inequalities on a time grid.

    Checks, at every grid point:
        - nu p + m'/m >= nu^(1/3)
        - 1 <= w <= 1 + beta^2 nu^(-2/3)  (the literal bound beta^2 nu^(-2/3) is informational)
        - w / p <= 1 / k^2
        - delta (m'/m + nu p) + w'/w - p'/p >= delta nu^(1/3)
        - delta (m'/m + nu^(1/3)) + w'/w - p'/p >= (delta / 2) nu^(1/3)

    Violations are counted and reported with their times, never clamped.

    Args:
        f: Frequency.
        nu: Shear viscosity (> 0).
        wp: Admissible weight parameters.
        t_grid: Nonempty sequence of times.
        rtol: Relative roundoff allowance, scaled by each right-hand side.

    Returns:
        MultiplierAudit with one InequalityCheck per inequality.

    Raises:
        InadmissibleParametersError: If nu <= 0 or t_grid is empty.
    """
    _require_nu(nu)
    times = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    if times.size == 0:
        raise InadmissibleParametersError("t_grid must be nonempty", code="audit")

    c = nu ** (1.0 / 3.0)
    d = wp.delta_beta
    pv = np.asarray(p(times, f))
    pr = np.asarray(dt_p(times, f)) / pv
    mr = np.asarray(mult_m_ratio(times, f, nu))
    w = np.asarray(mult_w(times, f, nu, wp))
    wr = np.asarray(mult_w_ratio(times, f, nu, wp))
    top = 1.0 + wp.beta**2 * nu ** (-2.0 / 3.0)
    k2 = float(f.k**2)

    checks = [
        _check("m_floor", nu * pv + mr - c, times, c, rtol),
        _check("w_lower", w - 1.0, times, 1.0, rtol),
        _check("w_upper", top - w, times, top, rtol),
        _check("w_upper_literal", (top - 1.0) - w, times, top, rtol, informational=True),
        _check("w_over_p", 1.0 / k2 - w / pv, times, 1.0 / k2, rtol),
        _check("delta_dissipation", d * (mr + nu * pv) + wr - pr - d * c, times, c, rtol),
        _check("delta_floor", d * (mr + c) + wr - pr - 0.5 * d * c, times, c, rtol),
    ]
    audit = MultiplierAudit(
        frequency=f,
        nu=nu,
        weights=wp,
        n_times=int(times.size),
        checks={ch.name: ch for ch in checks},
    )
    if not audit.passed:
        logger.info(
            "multiplier audit k=%d eta=%g nu=%g: %d failing inequalities",
            f.k, f.eta, nu, len(audit.failures()),
        )
    return audit
