"""Large-n predictions for the polynomials and their recurrence coefficients.

Three regimes cover the plane for 0 <= lambda < lambda0: an outer formula away
from the S-curve, an oscillatory inner formula near it, and Bessel-type
formulas in small discs around the endpoints.  The remaining functions
rebuild the 1/n^2 terms of the recurrence coefficients from the jump
corrections at the endpoints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath
from mpmath import mpc, mpf

from .bessel import bessel_j0, bessel_j1
from .errors import OnCut, RegionViolation
from .potential import SCurve
from .precision import BranchMode, PrecisionContext, sqrt_zsq_minus_one

__all__ = [
    "Matrix2",
    "Formula",
    "AsymptoticPrediction",
    "SIGMA2",
    "DEFAULT_DELTA",
    "DEFAULT_WIDTH",
    "governing_formula",
    "predict",
    "outer_pn",
    "inner_pn",
    "endpoint_pn",
    "recurrence_asymptotics",
    "N_matrix",
    "delta_k",
    "residues",
    "printed_residues",
    "R_expansion",
    "recurrence_from_R",
    "mu_moments",
    "szego_D",
    "weight_W",
    "remark_phase",
]

DEFAULT_DELTA = 0.1
DEFAULT_WIDTH = 0.1
_ASYM_CTX = PrecisionContext(50)


def _ctx(ctx):
    return ctx if ctx is not None else _ASYM_CTX


@dataclass(frozen=True)
class Matrix2:
    a: mpc
    b: mpc
    c: mpc
    d: mpc

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(mpc(1), mpc(0), mpc(0), mpc(1))

    @classmethod
    def of(cls, rows) -> "Matrix2":
        (a, b), (c, d) = rows
        return cls(mpc(a), mpc(b), mpc(c), mpc(d))

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows()[i][j]

    def __add__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "Matrix2":
        return Matrix2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, o):
        if isinstance(o, Matrix2):
            return Matrix2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                           self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)
        return Matrix2(self.a * o, self.b * o, self.c * o, self.d * o)

    __rmul__ = lambda self, o: self * o

    def __truediv__(self, s) -> "Matrix2":
        return Matrix2(self.a / s, self.b / s, self.c / s, self.d / s)

    def det(self) -> mpc:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Matrix2":
        dt = self.det()
        return Matrix2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def max_abs(self) -> mpf:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))


SIGMA2 = Matrix2(mpc(0), mpc(0, -1), mpc(0, 1), mpc(0))


class Formula(enum.Enum):
    OUTER = "outer"
    INNER = "inner"
    ENDPOINT_P1 = "endpoint+1"
    ENDPOINT_M1 = "endpoint-1"


@dataclass(frozen=True)
class AsymptoticPrediction:
    formula: Formula
    value: mpc
    guard: bool


# -- region guards -------------------------------------------------------------------

def governing_formula(z, curve: SCurve, delta: float = DEFAULT_DELTA, width: float = DEFAULT_WIDTH,
                      band: float = 0.0) -> Formula | None:
    """Which formula covers z; None inside a boundary band of half-width ``band``."""
    zc = complex(z)
    d1, dm1 = abs(zc - 1), abs(zc + 1)
    if min(abs(d1 - delta), abs(dm1 - delta)) < band:
        return None
    if d1 < delta:
        return Formula.ENDPOINT_P1
    if dm1 < delta:
        return Formula.ENDPOINT_M1
    dist = curve.distance(zc)
    if abs(dist - width) < band:
        return None
    return Formula.INNER if dist < width else Formula.OUTER


def _require(z, curve, want: Formula, delta, width):
    got = governing_formula(z, curve, delta, width)
    if got is not want:
        raise RegionViolation(f"z={complex(z)} is governed by {got and got.value}, not {want.value}")


# -- large-n formulas for p_n ------------------------------------------------------------

def N_matrix(z, lam, curve: SCurve | None = None, ctx: PrecisionContext | None = None,
             branch: BranchMode | None = None) -> Matrix2:
    """Outer model solution with unit determinant and N(inf) = I.

    The diagonal entries are both varphi^(1/2) / (sqrt(2) (z^2-1)^(1/4)).
    """
    ctx = _ctx(ctx)
    if branch is None:
        branch = BranchMode.SCURVE if curve is not None else BranchMode.PRINCIPAL
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        vp = z + s
        # vp/(2s) = 1/(1 - vp^-2) stays off the negative axis, so sqrt is safe
        n11 = mpmath.sqrt(vp / (2 * s))
        n12 = 1j / (2 * s * n11)
        return Matrix2(n11, n12, -n12, n11)


def outer_pn(z, n: int, lam, curve: SCurve, ctx: PrecisionContext | None = None,
             delta: float = DEFAULT_DELTA, width: float = DEFAULT_WIDTH, check: bool = True) -> mpc:
    """(varphi/2)^n exp(-i n lambda / (2 varphi)) N_11(z), valid away from the arc."""
    ctx = _ctx(ctx)
    if check:
        _require(z, curve, Formula.OUTER, delta, width)
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, BranchMode.SCURVE, curve)
        vp = z + s
        n11 = mpmath.sqrt(vp / (2 * s))
        return (vp / 2) ** n * mpmath.exp(-1j * n * mpf(lam) / (2 * vp)) * n11


def inner_pn(z, n: int, lam, curve: SCurve, ctx: PrecisionContext | None = None,
             delta: float = DEFAULT_DELTA, width: float = DEFAULT_WIDTH, check: bool = True) -> mpc:
    """Oscillatory approximation near the arc.

    2^(1/2-n) e^(-i n lambda z/2) (1-z^2)^(-1/4)
        * cos((n+1/2) arccos z + (n lambda/2) r - pi/4)

    with r = i sqrt(1 - z^2), the "+" boundary value of (z^2-1)^(1/2)
    continued analytically across the arc.  Every factor is analytic in a
    neighborhood of the arc minus its endpoints.
    """
    ctx = _ctx(ctx)
    if check:
        _require(z, curve, Formula.INNER, delta, width)
    with ctx.scope():
        z = mpc(z)
        lam = mpf(lam)
        w = mpmath.sqrt(1 - z * z)
        r = 1j * w
        arg = (n + mpf(1) / 2) * mpmath.acos(z) + n * lam / 2 * r - mpmath.pi / 4
        pref = mpmath.power(2, mpf(1) / 2 - n) * mpmath.exp(-1j * n * lam * z / 2) / mpmath.sqrt(w)
        return pref * mpmath.cos(arg)


def _endpoint_right(z, n, lam, ctx):
    # branch-invariant form: s -> -s flips phi and beta^2 together
    s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
    ph = 2 * mpmath.log(z + s) + 1j * lam * s
    f = ph * ph / 16
    amp = mpmath.root(f * (z + 1) / (z - 1), 4)
    beta_sq = s / (z + 1)
    u = -1j * n * ph / 2
    j0 = bessel_j0(u, ctx)
    dj0 = -bessel_j1(u, ctx)
    pref = mpmath.power(2, -n) * mpmath.sqrt(mpmath.pi * n) * mpmath.exp(-1j * n * lam * z / 2)
    return pref * amp * (j0 - 1j * beta_sq * dj0)


def endpoint_pn(z, n: int, lam, curve: SCurve, which: int = 1, ctx: PrecisionContext | None = None,
                delta: float = DEFAULT_DELTA, width: float = DEFAULT_WIDTH, check: bool = True) -> mpc:
    """Bessel-type approximation in the disc |z - which| < delta.

    2^(-n) (pi n)^(1/2) f^(1/4) e^(-i n lambda z/2)
        * [beta^(-1) J0(u) - i beta J0'(u)],   u = -i n phi / 2,

    with f = phi^2/16 and beta = ((z-1)/(z+1))^(1/4).  The disc around -1
    uses the reflection p_n(z) = (-1)^n conj(p_n(-conj z)).
    """
    ctx = _ctx(ctx)
    if which not in (1, -1):
        raise ValueError("which must be +1 or -1")
    if check:
        _require(z, curve, Formula.ENDPOINT_P1 if which == 1 else Formula.ENDPOINT_M1, delta, width)
    with ctx.scope():
        z = mpc(z)
        lam = mpf(lam)
        if z == which:
            raise OnCut(z, "endpoint formula is evaluated off the branch point")
        if which == 1:
            return _endpoint_right(z, n, lam, ctx)
        return (-1) ** n * mpmath.conj(_endpoint_right(-mpmath.conj(z), n, lam, ctx))


def predict(z, n: int, lam, curve: SCurve, ctx: PrecisionContext | None = None,
            delta: float = DEFAULT_DELTA, width: float = DEFAULT_WIDTH,
            band: float = 0.0) -> AsymptoticPrediction:
    """Evaluate whichever formula governs z.

    Points within ``band`` of a region boundary are refused.
    """
    f = governing_formula(z, curve, delta, width, band)
    if f is None:
        raise RegionViolation(f"z={complex(z)} lies in a boundary band")
    kw = dict(ctx=ctx, delta=delta, width=width)
    if f is Formula.OUTER:
        v = outer_pn(z, n, lam, curve, **kw)
    elif f is Formula.INNER:
        v = inner_pn(z, n, lam, curve, **kw)
    else:
        v = endpoint_pn(z, n, lam, curve, which=1 if f is Formula.ENDPOINT_P1 else -1, **kw)
    return AsymptoticPrediction(f, v, True)


def recurrence_asymptotics(n: int, lam, ctx: PrecisionContext | None = None) -> tuple[mpc, mpc]:
    """Leading large-n behavior of (a_n^2, b_n)."""
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        q = (4 + lam * lam) ** 2
        a_sq = mpf(1) / 4 + (4 - lam * lam) / (4 * q * n * n)
        b = mpc(0, -2 * lam / (q * n * n))
        return mpc(a_sq), b


def remark_phase(z, n: int, lam, curve: SCurve | None = None, ctx: PrecisionContext | None = None) -> mpc:
    """(n lambda / 2) (z^2 - 1)^(1/2), cut on the arc when a curve is given."""
    ctx = _ctx(ctx)
    branch = BranchMode.SCURVE if curve is not None else BranchMode.PRINCIPAL
    with ctx.scope():
        return n * mpf(lam) / 2 * sqrt_zsq_minus_one(z, ctx, branch, curve)


# -- endpoint jump corrections -----------------------------------------------------------

def _bracket(k: int, endpoint: int) -> Matrix2:
    diag1 = mpf((-1) ** k) / k * (mpf(k) / 2 - mpf(1) / 4)
    diag2 = mpf(1) / k * (mpf(k) / 2 - mpf(1) / 4)
    off = (k - mpf(1) / 2) * 1j
    if endpoint == 1:
        return Matrix2(diag1, -off, (-1) ** k * off, diag2)
    return Matrix2(diag1, off, (-1) ** (k + 1) * off, diag2)


def _delta_raw(z, k: int, lam, endpoint: int) -> Matrix2:
    s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
    vp = z + s
    if endpoint == 1:
        ph = 2 * mpmath.log(vp) + 1j * lam * s
    else:
        ph = 2 * mpmath.log(-vp) + 1j * lam * s
    coef = mpf((-1) ** (k - 1)) / (mpf(4) ** (k - 1) * mpmath.factorial(k - 1))
    for j in range(1, k):
        coef *= (2 * j - 1) ** 2
    n11 = mpmath.sqrt(vp / (2 * s))
    n12 = 1j / (2 * s * n11)
    N = Matrix2(n11, n12, -n12, n11)
    return (N * _bracket(k, endpoint) * N.inverse()) * (coef / ph ** k)


def delta_k(z, k: int, lam, curve: SCurve | None = None, endpoint: int = 1,
            ctx: PrecisionContext | None = None, delta: float = DEFAULT_DELTA) -> Matrix2:
    """k-th jump correction on the circle |z - endpoint| = delta.

    The expression is invariant under the choice of square-root branch, so
    it is evaluated with principal branches; near -1 the phase function is
    shifted to vanish at the endpoint.
    """
    ctx = _ctx(ctx)
    if k < 1:
        raise ValueError("k must be >= 1")
    if endpoint not in (1, -1):
        raise ValueError("endpoint must be +1 or -1")
    with ctx.scope():
        z = mpc(z)
        r = abs(z - endpoint)
        if r == 0 or r > delta * (1 + 1e-9):
            raise RegionViolation(f"z={complex(z)} is not in the closed disc around {endpoint}")
        return _delta_raw(z, k, mpf(lam), endpoint)


def _contour_residue(fn, center, radius, points: int):
    acc = Matrix2(mpc(0), mpc(0), mpc(0), mpc(0))
    for j in range(points):
        e = mpmath.expj(2 * mpmath.pi * (j + mpf(1) / 2) / points)
        acc = acc + fn(center + radius * e) * (radius * e)
    return acc / points


def residues(lam, order: int = 1, ctx: PrecisionContext | None = None, radius: float = 0.05,
             points: int = 96) -> tuple[Matrix2, Matrix2]:
    """Residues (A, B) at z = 1 and z = -1 of the order-1 or order-2 jump source.

    Order 1 is Delta_1; order 2 is R1_minus Delta_1 + Delta_2 with R1 the
    interior value A1/(z-1) + B1/(z+1) - Delta_1.  Computed by the
    trapezoidal rule on a small circle, which converges geometrically.
    """
    ctx = _ctx(ctx)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    with ctx.scope():
        lam = mpf(lam)
        rad = mpf(radius)
        out = []
        for e in (1, -1):
            if order == 1:
                fn = lambda z, e=e: _delta_raw(z, 1, lam, e)
            else:
                A1, B1 = residues(lam, 1, ctx, radius, points)

                def fn(z, e=e, A1=A1, B1=B1):
                    d1 = _delta_raw(z, 1, lam, e)
                    r1 = A1 / (z - 1) + B1 / (z + 1) - d1
                    return r1 * d1 + _delta_raw(z, 2, lam, e)
            out.append(_contour_residue(fn, mpc(e), rad, points))
        return out[0], out[1]


def printed_residues(lam, order: int = 1, ctx: PrecisionContext | None = None) -> tuple[Matrix2, Matrix2]:
    """Closed forms of the residues A^(k), B^(k) for k = 1, 2."""
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        i = mpc(0, 1)
        if order == 1:
            A = Matrix2.of(((-1, i), (i, 1))) * (-1 / (8 * (2 + i * lam)))
            B = Matrix2.of(((1, i), (i, -1))) * (-1 / (8 * (2 - i * lam)))
            return A, B
        if order == 2:
            lm, lp = lam - 2 * i, lam + 2 * i
            A = Matrix2.of(((lm, 4 * (2 * i * lam - 5)), (-4 * (2 * i * lam - 5), lm))) \
                * (-1 / (64 * lm ** 2 * lp))
            B = Matrix2.of(((lp, -4 * (2 * i * lam + 5)), (4 * (2 * i * lam + 5), lp))) \
                * (1 / (64 * lp ** 2 * lm))
            return A, B
        raise ValueError("order must be 1 or 2")


def R_expansion(lam, ctx: PrecisionContext | None = None) -> tuple[Matrix2, Matrix2, Matrix2, Matrix2]:
    """z^-1 and z^-2 coefficients of R^(1) and R^(2) at infinity.

    A/(z-1) + B/(z+1) = (A + B)/z + (A - B)/z^2 + O(z^-3).
    Returned as (R1_z1, R1_z2, R2_z1, R2_z2).
    """
    ctx = _ctx(ctx)
    with ctx.scope():
        A1, B1 = printed_residues(lam, 1, ctx)
        A2, B2 = printed_residues(lam, 2, ctx)
        return A1 + B1, A1 - B1, A2 + B2, A2 - B2


def recurrence_from_R(lam, n: int, ctx: PrecisionContext | None = None) -> tuple[mpc, mpc]:
    """(a_n^2, b_n) from the two-term 1/n expansion of R at infinity."""
    ctx = _ctx(ctx)
    with ctx.scope():
        r1z1, r1z2, r2z1, r2z2 = R_expansion(lam, ctx)
        n = mpf(n)
        R1 = r1z1 / n + r2z1 / n ** 2
        R2 = r1z2 / n + r2z2 / n ** 2
        i = mpc(0, 1)
        a_sq = (R1[0, 1] + i / 2) * (R1[1, 0] - i / 2)
        b = (i * R1[0, 0] + 2 * R2[0, 1]) / (i + 2 * R1[0, 1]) - R1[1, 1]
        return a_sq, b


def mu_moments(lam, ctx: PrecisionContext | None = None) -> tuple[mpc, mpc]:
    """(c1, c2): z^-1 and z^-2 coefficients of log z - g(z).

    c1 = int s dmu = i lambda / 4 and c2 = (int s^2 dmu) / 2 = 1/4.
    """
    ctx = _ctx(ctx)
    with ctx.scope():
        return mpc(0, mpf(lam) / 4), mpc(mpf(1) / 4)


# -- Szego function ------------------------------------------------------------------

def szego_D(z, omega, ctx: PrecisionContext | None = None) -> mpc:
    """exp(i omega / (2 varphi(z))): D+ D- = exp(i omega x) on (-1, 1), D(inf) = 1."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        vp = z + sqrt_zsq_minus_one(z, ctx)
        return mpmath.exp(1j * mpf(omega) / (2 * vp))


def weight_W(z, omega, ctx: PrecisionContext | None = None) -> mpc:
    ctx = _ctx(ctx)
    with ctx.scope():
        return mpmath.expj(mpf(omega) * mpc(z))
