from typing import Any


class CouetteLabError(Exception):
    """Base exception for couette-lab errors."""

    def __init__(
        self,
        message: str,
        code: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}

    def __str__(self) -> str:
        if self.code:
            return f"[{self.code}] {self.message}"
        return self.message


class InadmissibleParametersError(CouetteLabError):
    """Parameters outside the domain of an operation."""

    pass


class IntegrationError(CouetteLabError):
    """Integrator gave up (step-size underflow or step budget exhausted)."""

    def __init__(
        self,
        message: str,
        t: float,
        h: float,
        error_norm: float | None = None,
    ) -> None:
        super().__init__(
            message,
            code="integration",
            details={"t": t, "h": h, "error_norm": error_norm},
        )
        self.t = t
        self.h = h
        self.error_norm = error_norm


class QuadratureError(CouetteLabError):
    """Quadrature did not reach the requested tolerance."""

    pass


class InequalityViolation(CouetteLabError):
    """A multiplier or energy inequality failed where a clean audit was required."""

    pass


class GenericityError(CouetteLabError):
    """No perturbation direction achieved the lower bound on |Gamma|."""

    pass


class GridError(CouetteLabError):
    """Mode not on the grid or inconsistent grid metadata."""

    pass


class FieldFormatError(CouetteLabError):
    """Malformed field document."""

    pass


class InsufficientSamplesError(CouetteLabError):
    """Fit window holds fewer samples than required."""

    pass


class SweepSpecError(CouetteLabError):
    """Invalid sweep specification."""

    pass
