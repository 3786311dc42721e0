"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class OscGaussError(Exception):
    """Base class for library errors."""


class PrecisionExhausted(OscGaussError):
    """A result could not be certified at the requested tolerance."""


class OnCut(OscGaussError):
    """Evaluation point lies on (or within tolerance of) an active branch cut."""

    def __init__(self, z, message: str = "point lies on the branch cut"):
        super().__init__(f"{message}: z={z}")
        self.z = z


class OnBoundary(OnCut):
    """Point is within tolerance of the lens-region boundary."""


class BranchCurveRequired(OscGaussError):
    """SCURVE branch mode was requested without a traced curve."""


class DomainError(OscGaussError, ValueError):
    """Argument outside the domain of an operation."""


class PoleAt(OscGaussError):
    def __init__(self, z):
        super().__init__(f"pole at z={z}")
        self.z = z


class ExistenceFailure(OscGaussError):
    """The formal orthogonal polynomial of a given degree does not exist.

    Raised when a pivot of the Hankel elimination vanishes to working
    precision. ``degree`` is the first degree that cannot be defined.
    """

    def __init__(self, degree: int, pivot=None):
        msg = f"orthogonal polynomial of degree {degree} does not exist"
        if pivot is not None:
            msg += f" (pivot magnitude {float(pivot):.3e})"
        super().__init__(msg)
        self.degree = degree
        self.pivot = pivot


class NonConvergence(OscGaussError):
    """An iteration hit its cap or left its admissible region."""


class DegenerateNode(OscGaussError):
    pass


class RegionViolation(OscGaussError, ValueError):
    """An asymptotic formula was evaluated outside its region of validity."""
