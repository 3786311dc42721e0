"""Bessel functions J0 and J1 of complex argument at arbitrary precision.

Small arguments use the power series, summed with enough extra digits to
absorb the cancellation (terms reach roughly exp|z|).  Large arguments use
the Hankel asymptotic expansion.  The crossover radius grows with the
precision so that the smallest asymptotic term, about exp(-2|z|), is
already below tolerance where the expansion takes over.
"""

from __future__ import annotations

import math

import mpmath
from mpmath import mpc, mpf

from .errors import PrecisionExhausted
from .precision import PrecisionContext

__all__ = ["bessel_j0", "bessel_j1", "crossover_radius"]

_SMALL_STREAK = 3
_MAX_TERMS = 100_000


def crossover_radius(ctx: PrecisionContext) -> float:
    return (ctx.digits + 5) * math.log(10) / 2 + 2


def _series(nu: int, z: mpc, ctx: PrecisionContext) -> mpc:
    extra = int(abs(complex(z)) * math.log10(math.e)) + 10
    with ctx.scope(extra):
        # relative to the running max partial sum, which overshoots |J| by
        # up to the cancellation factor, hence the extra digits here too
        tol = mpf(10) ** (-(ctx.digits + 2 + extra))
        q = -(z * z) / 4
        term = (z / 2) ** nu / mpmath.factorial(nu)
        total = term
        biggest = abs(total)
        streak = 0
        k = 0
        while streak < _SMALL_STREAK:
            k += 1
            if k > _MAX_TERMS:
                raise PrecisionExhausted(f"J{nu} series did not converge at z={z}")
            term = term * q / (k * (k + nu))
            total += term
            biggest = max(biggest, abs(total))
            streak = streak + 1 if abs(term) <= tol * biggest else 0
    with ctx.scope():
        return +total


def _hankel_coeff(nu: int, k: int) -> mpf:
    mu = 4 * nu * nu
    num = mpf(1)
    for j in range(1, k + 1):
        num *= mu - (2 * j - 1) ** 2
    return num / (mpmath.factorial(k) * mpf(8) ** k)


def _asymptotic(nu: int, z: mpc, ctx: PrecisionContext) -> mpc:
    with ctx.scope(5):
        sign = 1
        if z.real < 0:
            z = -z
            sign = -1 if nu % 2 else 1
        tol = mpf(10) ** (-(ctx.digits + 2))
        p = mpf(0)
        q = mpf(0)
        zinv = 1 / z
        prev = None
        k = 0
        while True:
            term = _hankel_coeff(nu, k) * zinv ** k
            mag = abs(term)
            if prev is not None and mag > prev:
                raise PrecisionExhausted(
                    f"asymptotic J{nu} expansion diverged before tol at |z|={float(abs(z)):.3g}")
            if k % 2 == 0:
                p += (-1) ** (k // 2) * term
            else:
                q += (-1) ** (k // 2) * term
            if mag < tol:
                break
            prev = mag
            k += 1
        chi = z - (nu * mpmath.pi / 2 + mpmath.pi / 4)
        val = mpmath.sqrt(2 / (mpmath.pi * z)) * (p * mpmath.cos(chi) - q * mpmath.sin(chi))
    with ctx.scope():
        return sign * val


def _bessel(nu: int, z, ctx: PrecisionContext, method: str) -> mpc:
    with ctx.scope():
        z = mpc(z)
    if method == "auto":
        method = "series" if abs(complex(z)) < crossover_radius(ctx) else "asymptotic"
    if method == "series":
        return _series(nu, z, ctx)
    if method == "asymptotic":
        return _asymptotic(nu, z, ctx)
    raise ValueError(f"unknown method {method!r}")


def bessel_j0(z, ctx: PrecisionContext, method: str = "auto") -> mpc:
    """J0(z) for complex z."""
    return _bessel(0, z, ctx, method)


def bessel_j1(z, ctx: PrecisionContext, method: str = "auto") -> mpc:
    """J1(z) for complex z; note J0' = -J1."""
    return _bessel(1, z, ctx, method)
