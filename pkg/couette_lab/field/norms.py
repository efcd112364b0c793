"""Moving-frame norms of spectral fields.

The shear change of variables is measure preserving, so physical-space norms
equal lattice sums in which the symbol p(t, k, eta) replaces |physical
frequency|^2. Every mode carries the measure d_eta.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from couette_lab.exceptions import InadmissibleParametersError
from couette_lab.field.grid import NormSpec, SpectralField
from couette_lab.types import ComplexArray, RealArray


@dataclass
class HelmholtzNorms:
    """Norms of one field at one time.

    Attributes:
        Q_norm: Irrotational velocity, ||p^(-1/2) A||.
        Px_norm: x-component of the solenoidal velocity, ||((eta - k t)/p) Omega||.
        Py_norm: y-component of the solenoidal velocity, ||(k/p) Omega||.
        rho_norm: ||R||.
        velocity: ||v||, with velocity^2 = Q^2 + Px^2 + Py^2.
        Px_xi / Px_m: Px evaluated on the Xi = R + Omega part and on the -R part.
        Py_xi / Py_m: same split for Py.
    """

    Q_norm: float
    Px_norm: float
    Py_norm: float
    rho_norm: float
    velocity: float
    Px_xi: float
    Px_m: float
    Py_xi: float
    Py_m: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def _symbols(field: SpectralField, t: float) -> tuple[RealArray, RealArray, RealArray]:
    k = field.k
    eta = field.eta
    shifted = eta - k * t
    return k, shifted, k**2 + shifted**2


def _norm(values: RealArray, d_eta: float) -> float:
    return float(np.sqrt(np.sum(values) * d_eta))


def helmholtz_norms(field: SpectralField, t: float | None = None) -> HelmholtzNorms:
    """Helmholtz components of the velocity and the density norm at time t (default field.time)."""
    t = field.time if t is None else t
    d = field.grid.d_eta
    if len(field) == 0:
        return HelmholtzNorms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    k, shifted, pv = _symbols(field, t)
    a2 = np.abs(field.A) ** 2
    o2 = np.abs(field.Omega) ** 2
    xi2 = np.abs(field.R + field.Omega) ** 2
    r2 = np.abs(field.R) ** 2
    px = shifted**2 / pv**2
    py = k**2 / pv**2
    return HelmholtzNorms(
        Q_norm=_norm(a2 / pv, d),
        Px_norm=_norm(px * o2, d),
        Py_norm=_norm(py * o2, d),
        rho_norm=_norm(r2, d),
        velocity=_norm((a2 + o2) / pv, d),
        Px_xi=_norm(px * xi2, d),
        Px_m=_norm(px * r2, d),
        Py_xi=_norm(py * xi2, d),
        Py_m=_norm(py * r2, d),
    )


def velocity_norm(field: SpectralField, t: float | None = None) -> float:
    """||v|| = (sum (|A|^2 + |Omega|^2) / p d_eta)^(1/2)."""
    return helmholtz_norms(field, t).velocity


def quantity(field: SpectralField, name: str, t: float | None = None) -> ComplexArray:
    """Per-mode coefficients of a named quantity.

    Names: "rho", "alpha", "omega", "xi" (R + Omega) and "Q" (A / p^(1/2)).
    """
    match name:
        case "rho":
            return field.R
        case "alpha":
            return field.A
        case "omega":
            return field.Omega
        case "xi":
            return field.R + field.Omega
        case "Q":
            _, _, pv = _symbols(field, field.time if t is None else t)
            return field.A / np.sqrt(pv)
        case _:
            raise InadmissibleParametersError(f"unknown quantity {name!r}", code="norm")


def sobolev_norm(
    field: SpectralField,
    spec: NormSpec,
    *,
    of: str = "rho",
    t: float | None = None,
    moving: bool = False,
) -> float:
    """Weighted l2 norm of a quantity over the lattice.

    Args:
        field: The field.
        spec: Weight family and indices.
        of: Quantity name (see `quantity`).
        t: Time for the moving-frame symbols (default field.time).
        moving: Evaluate the weight at the physical frequency (k, eta - k t),
            i.e. with <k, eta>^2 replaced by 1 + p(t, k, eta).
    """
    if len(field) == 0:
        return 0.0
    t = field.time if t is None else t
    k, shifted, _ = _symbols(field, t)
    eta = shifted if moving else field.eta
    w = spec.weight(k, eta)
    c = quantity(field, of, t)
    return _norm(w * np.abs(c) ** 2, field.grid.d_eta)
