"""Common type aliases for couette-lab."""

from collections.abc import Callable
from typing import Any, TypedDict

import numpy as np
from numpy.typing import NDArray

# Array aliases
RealArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]
RealLike = float | RealArray

# Right-hand sides of linear systems
MatrixFn = Callable[[float], ComplexArray]
ForcingFn = Callable[[float], ComplexArray]
HintFn = Callable[[float], float]

# Generic JSON payloads
Document = dict[str, Any]


class ModeRecord(TypedDict):
    """One mode of a field document."""

    k: int
    j: int
    rho_re: float
    rho_im: float
    alpha_re: float
    alpha_im: float
    omega_re: float
    omega_im: float


class GridHeader(TypedDict):
    """Grid metadata of a field document."""

    k_max: int
    eta_max: float
    d_eta: float
    include_zero_mode: bool


class FieldDocument(TypedDict):
    """Top-level field document (`cspec-field/1`)."""

    schema: str
    time: float
    grid: GridHeader
    modes: list[ModeRecord]
