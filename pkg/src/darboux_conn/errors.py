"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DarbouxConnError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(DarbouxConnError, ValueError):
    """Input data violates a documented precondition."""


class NonFiniteValue(InvalidInput):
    """A NaN or infinite value reached a computation."""


class NearSingular(DarbouxConnError, ArithmeticError):
    """A determinant fell below the configured singularity threshold."""

    def __init__(self, det: complex, threshold: float, what: str = "linear system"):
        self.det = complex(det)
        self.threshold = float(threshold)
        self.what = what
        super().__init__(
            f"near-singular {what}: |det| = {abs(self.det):.3e} <= threshold {self.threshold:.3e}"
        )


class SeriesError(DarbouxConnError, ArithmeticError):
    """Truncated series algebra cannot produce the requested result."""


class DegenerateCurve(InvalidInput):
    """The Legendre parameter makes the cubic singular."""


class OffCurve(InvalidInput):
    """A point does not satisfy the curve equation."""


class InvalidSpectralData(InvalidInput):
    """Pole exponents fail the Fuchs relation or a genericity condition."""


class InvalidConfig(InvalidInput):
    """Apparent-point data violates a configuration invariant."""


class ConstructionError(DarbouxConnError):
    """An assembled object failed a post-construction self check."""


class GluingFailure(ConstructionError):
    """A chart compatibility or holomorphy check failed."""

    def __init__(self, residual: float, location: str):
        self.residual = float(residual)
        self.location = location
        super().__init__(f"gluing check failed at {location}: residual {self.residual:.3e}")


class DisagreementError(ConstructionError):
    """Two independent evaluation routes disagree beyond tolerance."""


class StepTooLarge(InvalidInput):
    """A finite-difference displacement leaves the valid configuration locus."""


class BasePointMismatch(InvalidInput):
    """Cocycle data computed at different base configurations were combined."""
