"""Working-precision contexts, branched elementary functions and decimal I/O.

Every public numerical routine in the package takes an explicit
:class:`PrecisionContext`.  The arithmetic itself is done with :mod:`mpmath`;
a context only fixes the number of decimal digits in force while a routine
runs.  mpmath keeps its precision in a process-wide object, so entering a
context takes a re-entrant lock: computations from different threads are
serialized rather than allowed to clobber each other's precision.
"""

from __future__ import annotations

import enum
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterator

import mpmath
from mpmath import mpc, mpf

from .errors import BranchCurveRequired, DomainError, OnCut, PrecisionExhausted

__all__ = [
    "PrecisionContext",
    "BranchMode",
    "MPComplex",
    "sqrt_zsq_minus_one",
    "side_limit",
    "complex_arccos",
    "real_to_str",
    "real_from_str",
    "complex_to_json",
    "complex_from_json",
]

MPComplex = mpc

_LOCK = threading.RLock()


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision.

    ``digits`` is the mpmath working precision; ``guard`` digits are held
    back, so results are only claimed to ``tol = 10**(guard - digits)``.
    """

    digits: int = 50
    guard: int = 5

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 20:
            raise DomainError(f"digits must be an integer >= 20, got {self.digits}")
        if self.guard < 0 or self.guard >= self.digits:
            raise DomainError(f"invalid guard digits {self.guard}")

    @property
    def tol(self) -> mpf:
        with self.scope():
            return mpf(10) ** (self.guard - self.digits)

    @contextmanager
    def scope(self, extra: int = 0) -> Iterator[None]:
        """Run a block at ``digits + extra`` decimal digits."""
        with _LOCK, mpmath.workdps(self.digits + extra):
            yield

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits=int(digits), guard=self.guard)

    def doubled(self) -> "PrecisionContext":
        return self.with_digits(2 * self.digits)


class BranchMode(enum.Enum):
    """Placement of the cut of (z^2 - 1)^(1/2).

    PRINCIPAL puts the cut on [-1, 1]; SCURVE moves it onto a traced
    S-curve, which flips the sign of the principal value inside the region
    enclosed by the curve and [-1, 1].
    """

    PRINCIPAL = "principal"
    SCURVE = "scurve"


def _principal_sqrt_zsq_minus_one(z: mpc) -> mpc:
    # sqrt(z-1)*sqrt(z+1): the two cuts cancel on (-inf, -1), leaving [-1, 1]
    return mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)


def sqrt_zsq_minus_one(z, ctx: PrecisionContext, branch: BranchMode = BranchMode.PRINCIPAL,
                       curve=None) -> mpc:
    """(z^2 - 1)^(1/2) with the requested cut, behaving like z at infinity.

    Raises OnCut when z is within ``ctx.tol`` of the active cut.
    """
    with ctx.scope():
        z = mpc(z)
        tol = ctx.tol
        if branch is BranchMode.SCURVE:
            if curve is None:
                raise BranchCurveRequired("SCURVE branch needs a traced curve")
            # region test raises OnBoundary (an OnCut) near the curve itself
            inside = curve.contains(z)
            root = _principal_sqrt_zsq_minus_one(z)
            return -root if inside else root
        if abs(z.imag) <= tol and abs(z.real) <= 1 + tol:
            raise OnCut(z)
        return _principal_sqrt_zsq_minus_one(z)


def side_limit(fn: Callable, z, ctx: PrecisionContext, side: int = 1, direction=None):
    """Evaluate ``fn`` just off a cut: at z + side*eps*direction, eps = 10*tol.

    ``direction`` defaults to i, which gives the upper (+) and lower (-)
    boundary values on the real axis.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    with ctx.scope():
        d = mpc(1j) if direction is None else mpc(direction)
        d = d / abs(d)
        eps = 10 * ctx.tol
        return fn(mpc(z) + side * eps * d)


def complex_arccos(z, ctx: PrecisionContext) -> mpc:
    """Principal arccos, cuts on (-inf, -1] and [1, inf)."""
    with ctx.scope():
        return mpc(mpmath.acos(mpc(z)))


# -- exact decimal serialization -------------------------------------------

def real_to_str(x) -> str:
    """Exact decimal representation of a binary mpf (no rounding at all)."""
    if not isinstance(x, mpf):
        x = mpmath.mp.make_mpf(mpmath.libmp.from_float(float(x))) if isinstance(x, float) else mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return "0"
    if exp >= 0:
        n, point = man << exp, 0
    else:
        n, point = man * 5 ** (-exp), -exp
    # value = n * 10**(-point) = d.ddd * 10**e10
    digits = str(n)
    e10 = len(digits) - 1 - point
    digits = digits.rstrip("0")
    mant = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{'-' if sign else ''}{mant}e{e10:+d}"


def real_from_str(s: str) -> mpf:
    """Parse a decimal string exactly enough to recover the original mpf."""
    mant, _, e10 = s.lstrip("-").partition("e")
    prec = int((len(mant) + abs(int(e10 or 0))) * 3.33) + 64
    # make_mpf keeps every bit; mpf(...) would round to the ambient precision
    return mpmath.mp.make_mpf(mpmath.libmp.from_str(s, prec, mpmath.libmp.round_nearest))


def complex_to_json(z) -> dict:
    if not isinstance(z, mpc):
        z = mpc(z)
    return {"re": real_to_str(z.real), "im": real_to_str(z.imag)}


def complex_from_json(d: dict) -> mpc:
    return mpmath.mp.make_mpc((real_from_str(d["re"])._mpf_, real_from_str(d["im"])._mpf_))


def require_finite(z, what: str = "value"):
    if not (mpmath.isfinite(mpc(z).real) and mpmath.isfinite(mpc(z).imag)):
        raise PrecisionExhausted(f"non-finite {what}: {z}")
    return z
