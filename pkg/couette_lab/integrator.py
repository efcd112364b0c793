"""Adaptive integration of small non-autonomous linear systems.

z'(t) = A(t) z + f(t) with dim in {2, 3, 4}, integrated with the Dormand-Prince
5(4) pair, Hairer-style error norm and a step cap c_osc / hint(t) that keeps
the phase advance per step bounded for fast oscillations. Sample times are
served by the pair's 4th-order dense output so they never alter step
selection.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from couette_lab.base import SolverConfig
from couette_lab.exceptions import InadmissibleParametersError, IntegrationError
from couette_lab.types import ComplexArray, ForcingFn, HintFn, MatrixFn, RealArray

logger = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
A71, A73, A74, A75, A76 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0

# error weights b - b_hat
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0

# dense output
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0


@dataclass(frozen=True)
class LinearSystem:
    """z' = matrix_fn(t) z + forcing_fn(t).

    Attributes:
        dim: State dimension (2, 3 or 4).
        matrix_fn: t -> dim x dim complex matrix.
        forcing_fn: t -> dim complex vector, or None for a homogeneous system.
        stiffness_hint: t -> characteristic oscillation frequency (e.g. sqrt(p)/M).
    """

    dim: int
    matrix_fn: MatrixFn
    forcing_fn: ForcingFn | None = None
    stiffness_hint: HintFn | None = None

    def __post_init__(self) -> None:
        if self.dim not in (2, 3, 4):
            raise InadmissibleParametersError(f"dim must be 2, 3 or 4, got {self.dim}", code="system")

    @property
    def is_homogeneous(self) -> bool:
        return self.forcing_fn is None

    def rhs(self, t: float, z: ComplexArray) -> ComplexArray:
        out = self.matrix_fn(t) @ z
        if self.forcing_fn is not None:
            out = out + self.forcing_fn(t)
        return out

    def hint(self, t: float) -> float:
        return 0.0 if self.stiffness_hint is None else float(self.stiffness_hint(t))


@dataclass
class StepStats:
    """Step bookkeeping of one integration.

    Attributes:
        accepted: Accepted steps.
        rejected: Rejected steps.
        max_error: Largest accepted error norm (1.0 means exactly at tolerance).
        min_step: Smallest accepted step.
    """

    accepted: int = 0
    rejected: int = 0
    max_error: float = 0.0
    min_step: float = math.inf


@dataclass
class Trajectory:
    """Samples of one integration.

    Attributes:
        times: Strictly increasing sample times.
        states: Array of shape (len(times), dim).
        stats: Step statistics.
        step_times: Accepted step boundaries, t0 included.
    """

    times: RealArray
    states: ComplexArray
    stats: StepStats
    step_times: RealArray
    _rcont: ComplexArray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> ComplexArray:
        return self.states[-1]

    @property
    def has_dense(self) -> bool:
        return self._rcont is not None

    def evaluate(self, times: Sequence[float] | RealArray) -> ComplexArray:
        """Dense evaluation at arbitrary times inside the integrated interval.

        Requires the run to have been made with `keep_dense=True`.
        """
        if self._rcont is None:
            raise InadmissibleParametersError("trajectory was integrated without keep_dense", code="dense")
        ts = np.atleast_1d(np.asarray(times, dtype=np.float64))
        lo, hi = self.step_times[0], self.step_times[-1]
        span = hi - lo
        if ts.size and (ts.min() < lo - 1e-12 * span or ts.max() > hi + 1e-12 * span):
            raise InadmissibleParametersError(
                f"evaluation times outside [{lo}, {hi}]", code="dense"
            )
        idx = np.clip(np.searchsorted(self.step_times, ts, side="right") - 1, 0, len(self.step_times) - 2)
        start = self.step_times[idx]
        h = self.step_times[idx + 1] - start
        theta = ((ts - start) / h)[:, None]
        theta1 = 1.0 - theta
        r = self._rcont[idx]
        return r[:, 0] + theta * (r[:, 1] + theta1 * (r[:, 2] + theta * (r[:, 3] + theta1 * r[:, 4])))


def _error_norm(err: ComplexArray, y0: ComplexArray, y1: ComplexArray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(
    sys: LinearSystem,
    t0: float,
    z0: ComplexArray,
    k1: ComplexArray,
    span: float,
    rtol: float,
    atol: float,
) -> float:
    scale = atol + rtol * np.abs(z0)
    d0 = float(np.sqrt(np.mean(np.abs(z0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(k1 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    k2 = sys.rhs(t0 + h0, z0 + h0 * k1)
    d2 = float(np.sqrt(np.mean(np.abs((k2 - k1) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, span)


def integrate(
    sys: LinearSystem,
    z0: Sequence[complex] | ComplexArray,
    t0: float,
    t1: float,
    rel_tol: float | None = None,
    abs_tol: float | None = None,
    sample_times: Sequence[float] | RealArray | None = None,
    *,
    config: SolverConfig | None = None,
    keep_dense: bool = False,
) -> Trajectory:
    """Integrate a LinearSystem from t0 to t1.

    Args:
        sys: The system.
        z0: Initial state of length sys.dim.
        t0: Start time.
        t1: End time (> t0).
        rel_tol: Relative tolerance (default: config.rtol).
        abs_tol: Absolute tolerance (default: config.atol times max(1, |z0|)).
        sample_times: Output times in [t0, t1]; default is every accepted step.
        config: Solver settings (default: SolverConfig()).
        keep_dense: Keep the dense-output coefficients for `Trajectory.evaluate`.

    Returns:
        Trajectory sampled at `sample_times` (or at the step boundaries).

    Raises:
        InadmissibleParametersError: If t1 <= t0, tolerances are not positive
            or sample times fall outside [t0, t1].
        IntegrationError: On step-size underflow or when the step budget runs out.
    """
    config = config or SolverConfig()
    rtol = config.rtol if rel_tol is None else rel_tol
    y = np.asarray(z0, dtype=np.complex128).copy()
    if y.shape != (sys.dim,):
        raise InadmissibleParametersError(f"z0 must have shape ({sys.dim},), got {y.shape}", code="integrate")
    atol = config.atol * max(1.0, float(np.max(np.abs(y)))) if abs_tol is None else abs_tol
    if not (t1 > t0):
        raise InadmissibleParametersError(f"need t1 > t0, got t0={t0}, t1={t1}", code="integrate")
    if not (rtol > 0 and atol > 0):
        raise InadmissibleParametersError("tolerances must be > 0", code="integrate")

    if sample_times is None:
        samples = None
    else:
        samples = np.sort(np.asarray(sample_times, dtype=np.float64))
        if samples.size and (samples[0] < t0 or samples[-1] > t1):
            raise InadmissibleParametersError("sample_times must lie in [t0, t1]", code="integrate")

    span = t1 - t0
    h_min = config.underflow_ratio * span
    stats = StepStats()

    out_t: list[float] = []
    out_z: list[ComplexArray] = []
    step_t: list[float] = [t0]
    rconts: list[ComplexArray] = []
    si = 0
    if samples is None:
        out_t.append(t0)
        out_z.append(y.copy())
    else:
        while si < samples.size and samples[si] <= t0:
            out_t.append(float(samples[si]))
            out_z.append(y.copy())
            si += 1

    t = t0
    k1 = sys.rhs(t, y)
    h = min(_initial_step(sys, t, y, k1, span, rtol, atol), config.step_cap(sys.hint(t)))
    last_rejected = False
    attempts = 0

    while t < t1:
        attempts += 1
        if attempts > config.max_steps:
            raise IntegrationError(f"step budget of {config.max_steps} exhausted at t={t}", t=t, h=h)
        h = min(h, config.step_cap(sys.hint(t)))
        if t + h >= t1 or t1 - (t + h) < h_min:
            h = t1 - t
        if h < h_min:
            raise IntegrationError(f"step size underflow at t={t} (h={h:.3e})", t=t, h=h)

        k2 = sys.rhs(t + C2 * h, y + h * (A21 * k1))
        k3 = sys.rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2))
        k4 = sys.rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = sys.rhs(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = sys.rhs(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y1 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6)
        t_new = t1 if h == t1 - t else t + h
        k7 = sys.rhs(t_new, y1)

        err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        err = _error_norm(err_vec, y, y1, rtol, atol)

        if err <= 1.0:
            stats.accepted += 1
            stats.max_error = max(stats.max_error, err)
            stats.min_step = min(stats.min_step, h)

            need_dense = keep_dense or (samples is not None and si < samples.size and samples[si] <= t_new)
            if need_dense:
                r2 = y1 - y
                r3 = h * k1 - r2
                r4 = r2 - h * k7 - r3
                r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7)
                rc = np.stack([y, r2, r3, r4, r5])
                if keep_dense:
                    rconts.append(rc)
                if samples is not None:
                    while si < samples.size and samples[si] <= t_new:
                        ts = float(samples[si])
                        if ts == t_new:
                            z_s = y1.copy()
                        else:
                            th = (ts - t) / h
                            th1 = 1.0 - th
                            z_s = rc[0] + th * (rc[1] + th1 * (rc[2] + th * (rc[3] + th1 * rc[4])))
                        out_t.append(ts)
                        out_z.append(z_s)
                        si += 1

            t = t_new
            y = y1
            k1 = k7
            step_t.append(t)
            if samples is None:
                out_t.append(t)
                out_z.append(y.copy())

            fac = FAC_MAX if err == 0.0 else SAFETY * err**-0.2
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            h = h * fac
            last_rejected = False
        else:
            stats.rejected += 1
            fac = max(FAC_MIN, SAFETY * err**-0.2)
            h = h * fac
            last_rejected = True

    logger.debug(
        "integrate [%g, %g]: %d accepted, %d rejected, min step %.3e",
        t0, t1, stats.accepted, stats.rejected, stats.min_step,
    )
    dim = sys.dim
    return Trajectory(
        times=np.asarray(out_t, dtype=np.float64),
        states=np.asarray(out_z, dtype=np.complex128).reshape(len(out_t), dim),
        stats=stats,
        step_times=np.asarray(step_t, dtype=np.float64),
        _rcont=np.asarray(rconts, dtype=np.complex128) if keep_dense else None,
    )


@dataclass
class PicardResult:
    """Truncated Picard series of a fundamental matrix.

    Attributes:
        matrix: 1 + sum_{n=1..n_terms} I_n(t, t0).
        last_term_norm: Spectral norm of I_{n_terms}, the truncation estimate.
    """

    matrix: ComplexArray
    last_term_norm: float


def fundamental_matrix_picard(
    sys: LinearSystem,
    t0: float,
    t: float,
    n_terms: int,
    quad_points: int = 16,
    *,
    panels: int = 4,
) -> PicardResult:
    """Fundamental matrix by the truncated Picard series.

    The nested integrals I_n(t) = int_{t0}^t A(s) I_{n-1}(s) ds are computed on
    composite Gauss-Legendre panels: on each panel the integrand is
    interpolated at the nodes by a Legendre series and integrated exactly.

    Args:
        sys: Homogeneous system.
        t0: Start time.
        t: End time.
        n_terms: Number of series terms after the identity.
        quad_points: Gauss nodes per panel.
        panels: Number of equal panels on [t0, t].

    Returns:
        PicardResult with the matrix and the last-term norm.

    Raises:
        InadmissibleParametersError: If the system carries a forcing term.
    """
    if not sys.is_homogeneous:
        raise InadmissibleParametersError("Picard oracle requires a homogeneous system", code="picard")
    if n_terms < 0 or quad_points < 1 or panels < 1:
        raise InadmissibleParametersError("n_terms >= 0, quad_points >= 1, panels >= 1 required", code="picard")

    dim = sys.dim
    identity = np.eye(dim, dtype=np.complex128)
    if n_terms == 0 or t == t0:
        return PicardResult(matrix=identity, last_term_norm=0.0 if t == t0 else 1.0)

    x, _ = legendre.leggauss(quad_points)
    edges = np.linspace(t0, t, panels + 1)
    halves = 0.5 * np.diff(edges)
    nodes = [0.5 * (edges[i] + edges[i + 1]) + halves[i] * x for i in range(panels)]
    a_nodes = [np.stack([sys.matrix_fn(float(s)) for s in panel]) for panel in nodes]

    term = [np.broadcast_to(identity, (quad_points, dim, dim)).copy() for _ in range(panels)]
    total = identity.copy()
    last = identity
    for _ in range(n_terms):
        new_term = []
        offset = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(panels):
            g = np.einsum("qij,qjk->qik", a_nodes[i], term[i]).reshape(quad_points, dim * dim)
            coef = legendre.legfit(x, g.real, quad_points - 1) + 1j * legendre.legfit(
                x, g.imag, quad_points - 1
            )
            anti = legendre.legint(coef, lbnd=-1.0)
            values = legendre.legval(x, anti).T * halves[i]
            end = legendre.legval(1.0, anti) * halves[i]
            new_term.append(values.reshape(quad_points, dim, dim) + offset)
            offset = offset + end.reshape(dim, dim)
        term = new_term
        last = offset
        total = total + last
    return PicardResult(matrix=total, last_term_norm=float(np.linalg.norm(last, 2)))


def inverse_2x2(phi: ComplexArray) -> ComplexArray:
    """Inverse of a 2x2 matrix as adjugate / det."""
    det = phi[0, 0] * phi[1, 1] - phi[0, 1] * phi[1, 0]
    adj = np.array([[phi[1, 1], -phi[0, 1]], [-phi[1, 0], phi[0, 0]]], dtype=np.complex128)
    return adj / det


def fundamental_system(sys: LinearSystem) -> LinearSystem:
    """The 4-dimensional system whose state is the column-stacked 2x2 fundamental matrix."""
    if sys.dim != 2 or not sys.is_homogeneous:
        raise InadmissibleParametersError("fundamental_system needs a homogeneous 2x2 system", code="system")

    def matrix(t: float) -> ComplexArray:
        a = sys.matrix_fn(t)
        out = np.zeros((4, 4), dtype=np.complex128)
        out[:2, :2] = a
        out[2:, 2:] = a
        return out

    return LinearSystem(dim=4, matrix_fn=matrix, stiffness_hint=sys.stiffness_hint)


def stacked_to_matrix(states: ComplexArray) -> ComplexArray:
    """(n, 4) column-stacked states to (n, 2, 2) matrices."""
    return np.asarray(states).reshape(-1, 2, 2).transpose(0, 2, 1)


def solution_operator(
    sys: LinearSystem,
    t0: float,
    t: float,
    rel_tol: float | None = None,
    *,
    config: SolverConfig | None = None,
) -> ComplexArray:
    """Phi(t, t0), the solution operator of a homogeneous system.

    Columns are obtained by integrating the canonical basis vectors.

    Raises:
        InadmissibleParametersError: If the system carries a forcing term.
        IntegrationError: Propagated from `integrate`.
    """
    if not sys.is_homogeneous:
        raise InadmissibleParametersError("solution operator requires a homogeneous system", code="system")
    dim = sys.dim
    if t == t0:
        return np.eye(dim, dtype=np.complex128)
    config = config or SolverConfig()
    rtol = config.rtol if rel_tol is None else rel_tol
    atol = config.atol
    if t < t0:
        forward = solution_operator(sys, t, t0, rtol, config=config)
        return inverse_2x2(forward) if dim == 2 else np.linalg.inv(forward)
    if dim == 2:
        z0 = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128)
        traj = integrate(fundamental_system(sys), z0, t0, t, rtol, atol, [t], config=config)
        return stacked_to_matrix(traj.states)[-1]
    cols = []
    for j in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[j] = 1.0
        cols.append(integrate(sys, e, t0, t, rtol, atol, [t], config=config).final)
    return np.stack(cols, axis=1)
