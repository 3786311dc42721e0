"""Formal orthogonal polynomials for the oscillatory weight exp(i*omega*x) on [-1, 1].

Multiprecision moments, recurrence coefficients, zeros and Gaussian rules,
the equilibrium problem and S-curve that govern the zeros as n and omega
grow together, and the large-n predictions that can be checked against
them.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BranchCurveRequired,
    DegenerateNode,
    DomainError,
    ExistenceFailure,
    NonConvergence,
    OnBoundary,
    OnCut,
    OscGaussError,
    PoleAt,
    PrecisionExhausted,
    RegionViolation,
)
from .precision import BranchMode, PrecisionContext

__all__ = [
    "__version__",
    "PrecisionContext",
    "BranchMode",
    "OscGaussError",
    "PrecisionExhausted",
    "OnCut",
    "OnBoundary",
    "BranchCurveRequired",
    "DomainError",
    "PoleAt",
    "ExistenceFailure",
    "NonConvergence",
    "DegenerateNode",
    "RegionViolation",
]
