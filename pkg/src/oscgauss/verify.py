"""Comparisons between computed polynomials and the predicted limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mpc, mpf

from . import asymptotics as asy
from .errors import ExistenceFailure
from .orthopoly import build_recurrence, eval_poly, orthogonality_residual
from .potential import SCurve
from .precision import PrecisionContext

__all__ = [
    "ZeroCurveReport",
    "CdfReport",
    "ConvergenceRow",
    "ConvergenceTable",
    "QUANTITIES",
    "zero_curve_report",
    "cdf_report",
    "convergence_table",
    "fitted_order",
    "orthogonality_residual",
]

QUANTITIES = ("a_sq", "b", "a_sq_scaled", "b_scaled", "outer", "inner", "endpoint")


@dataclass(frozen=True)
class ZeroCurveReport:
    n: int
    lam: mpf
    max_dist: mpf
    mean_dist: mpf
    distances: tuple
    params: tuple  # arc-length fraction of the nearest curve point, per zero


@dataclass(frozen=True)
class CdfReport:
    n: int
    lam: mpf
    ks_stat: mpf


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    quantity: str
    computed: mpc | None
    predicted: mpc | None
    rel_err: mpf | None
    error: str | None = None


@dataclass(frozen=True)
class ConvergenceTable:
    quantity: str
    lam: mpf
    rows: tuple
    order: float | None
    z: mpc | None = None


def zero_curve_report(zeros, curve: SCurve) -> ZeroCurveReport:
    """Distances from each zero to the traced arc."""
    if not zeros:
        raise ValueError("no zeros given")
    with curve.ctx.scope():
        dists = tuple(curve.exact_distance(z) for z in zeros)
        params = tuple(curve.nearest_parameter(z) for z in zeros)
        return ZeroCurveReport(len(zeros), curve.lam, max(dists), mpmath.fsum(dists) / len(dists),
                               dists, params)


def cdf_report(zeros, curve: SCurve) -> CdfReport:
    """Kolmogorov-Smirnov distance between the zero counting measure and mu.

    Zeros are projected onto the arc; their equilibrium masses are sorted and
    compared with the empirical distribution function j/n.
    """
    n = len(zeros)
    with curve.ctx.scope():
        masses = sorted(curve.mass_at(z) for z in zeros)
        ks = mpf(0)
        for j, m in enumerate(masses, start=1):
            ks = max(ks, abs(mpf(j) / n - m), abs(mpf(j - 1) / n - m))
        return CdfReport(n, curve.lam, min(ks, mpf(1)))


def fitted_order(ns, errs) -> float | None:
    """Least-squares slope of -log(err) against log(n)."""
    pts = [(math.log(n), -math.log(float(e))) for n, e in zip(ns, errs) if e is not None and e > 0]
    if len(pts) < 2:
        return None
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    return sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx


def _rel(c, p):
    return abs(c - p) / abs(p) if p != 0 else abs(c - p)


def convergence_table(quantity: str, ns, lam, ctx: PrecisionContext | None = None, z=None,
                      curve: SCurve | None = None, delta: float = asy.DEFAULT_DELTA,
                      digits: int | None = None) -> ConvergenceTable:
    """Computed versus predicted values over an increasing list of degrees.

    ``a_sq`` and ``b`` compare the recurrence coefficients with their
    two-term prediction; the ``_scaled`` variants compare n^2 (a_n^2 - 1/4)
    and n^2 b_n with their limits.  ``outer``, ``inner`` and ``endpoint``
    compare p_n(z) with the corresponding formula (``curve`` and ``z``
    required).  Rows whose polynomial does not exist are kept and flagged.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    ns = list(ns)
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("need at least three strictly increasing degrees")
    ctx = ctx or PrecisionContext(50)
    poly_q = quantity in ("outer", "inner", "endpoint")
    if poly_q and (curve is None or z is None):
        raise ValueError(f"{quantity} needs a curve and a point z")
    rows = []
    with ctx.scope():
        lam = mpf(lam)
        for n in ns:
            omega = lam * n
            try:
                if poly_q:
                    _mom, rec = build_recurrence(n, omega, digits)
                    computed = eval_poly(rec, n, z)
                    if quantity == "outer":
                        pred = asy.outer_pn(z, n, lam, curve, ctx, delta=delta)
                    elif quantity == "inner":
                        pred = asy.inner_pn(z, n, lam, curve, ctx, delta=delta)
                    else:
                        which = 1 if mpc(z).real > 0 else -1
                        pred = asy.endpoint_pn(z, n, lam, curve, which, ctx, delta=delta)
                    err = abs(pred / computed - 1)
                else:
                    _mom, rec = build_recurrence(n, omega, digits, extra_degrees=1)
                    rec.require(n + 1)
                    a_pred, b_pred = asy.recurrence_asymptotics(n, lam, ctx)
                    a_sq, b = rec.a_sq[n], rec.b[n]
                    if quantity == "a_sq":
                        computed, pred = a_sq, a_pred
                    elif quantity == "b":
                        computed, pred = b, b_pred
                    elif quantity == "a_sq_scaled":
                        computed, pred = n * n * (a_sq - mpf(1) / 4), n * n * (a_pred - mpf(1) / 4)
                    else:
                        computed, pred = n * n * b, n * n * b_pred
                    err = _rel(computed, pred)
                rows.append(ConvergenceRow(n, quantity, mpc(computed), mpc(pred), +err))
            except ExistenceFailure as exc:
                rows.append(ConvergenceRow(n, quantity, None, None, None, str(exc)))
    order = fitted_order([r.n for r in rows], [r.rel_err for r in rows])
    return ConvergenceTable(quantity, lam, tuple(rows), order, None if z is None else mpc(z))
