"""Formal orthogonal polynomials for the weight exp(i*omega*x) on [-1, 1].

The bilinear form <f, g> = int f(x) g(x) exp(i omega x) dx carries no
complex conjugation, so the monic orthogonal polynomial of a given degree
may fail to exist.  Everything here is derived from the moments
m_k = <x^k, 1> by Hankel elimination, with existence checked at every
pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
from mpmath import mpc, mpf

from .errors import (
    DegenerateNode,
    DomainError,
    ExistenceFailure,
    NonConvergence,
    PrecisionExhausted,
)
from .precision import PrecisionContext

__all__ = [
    "ProblemParams",
    "MomentTable",
    "RecurrenceTable",
    "MonicPolynomial",
    "QuadratureRule",
    "default_digits",
    "moments",
    "recurrence_from_moments",
    "build_recurrence",
    "eval_poly",
    "eval_poly_and_derivative",
    "monic_coefficients",
    "zeros",
    "quadrature_rule",
    "integrate",
    "oracle_integrate",
    "orthogonality_residual",
]

_SMALL_STREAK = 3
_ABERTH_CAP = 200


def default_digits(n: int, user: int | None = None) -> int:
    """Working digits for degree n: elimination loses O(n) digits."""
    return max(user or 0, 40 + 2 * n)


@dataclass(frozen=True)
class ProblemParams:
    n: int
    omega: mpf
    lam: mpf
    ctx: PrecisionContext

    @classmethod
    def from_omega(cls, n: int, omega, digits: int | None = None) -> "ProblemParams":
        if n < 1:
            raise DomainError("n must be >= 1")
        ctx = PrecisionContext(default_digits(n, digits))
        with ctx.scope():
            omega = mpf(omega)
            if omega < 0:
                raise DomainError("omega must be nonnegative")
            return cls(n, omega, omega / n, ctx)

    @classmethod
    def from_lambda(cls, n: int, lam, digits: int | None = None) -> "ProblemParams":
        if n < 1:
            raise DomainError("n must be >= 1")
        ctx = PrecisionContext(default_digits(n, digits))
        with ctx.scope():
            lam = mpf(lam)
            if lam < 0:
                raise DomainError("lambda must be nonnegative")
            return cls(n, lam * n, lam, ctx)


@dataclass(frozen=True)
class MomentTable:
    omega: mpf
    m: tuple
    ctx: PrecisionContext

    @property
    def kmax(self) -> int:
        return len(self.m) - 1


@dataclass(frozen=True)
class RecurrenceTable:
    """Monic three-term recurrence x p_k = p_{k+1} + b_k p_k + a_k^2 p_{k-1}.

    ``a_sq[k]`` is a_k^2 for k >= 1 (index 0 holds None), ``b[k]`` is b_k and
    ``h[k] = <p_k, p_k>``.  ``exists[k]`` says whether p_k is defined; the
    lists stop where existence first fails.
    """

    omega: mpf
    n: int
    a_sq: tuple
    b: tuple
    h: tuple
    exists: tuple
    pivot_floor: mpf
    ctx: PrecisionContext
    failed_pivot: mpf | None = None

    @property
    def max_degree(self) -> int:
        """Largest degree whose polynomial exists."""
        return sum(1 for e in self.exists if e) - 1

    def require(self, k: int) -> None:
        if k > self.n:
            raise ValueError(f"degree {k} beyond table size {self.n}")
        if k > self.max_degree:
            raise ExistenceFailure(self.max_degree + 1, self.failed_pivot)

    def kappa_sq(self, k: int) -> mpc:
        """Squared leading coefficient of the orthonormal polynomial, 1/h_k."""
        with self.ctx.scope():
            return 1 / self.h[k]


@dataclass(frozen=True)
class MonicPolynomial:
    coeffs: tuple  # ascending powers, coeffs[-1] == 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


@dataclass(frozen=True)
class QuadratureRule:
    n: int
    omega: mpf
    nodes: tuple
    weights: tuple
    ctx: PrecisionContext = field(default_factory=PrecisionContext)


# -- moments ----------------------------------------------------------------

def moments(omega, kmax: int, ctx: PrecisionContext) -> MomentTable:
    """m_k = int_{-1}^{1} x^k exp(i omega x) dx for k = 0..kmax.

    Termwise integration of the exponential series.  Terms peak near
    omega^omega/omega!, so the sum runs with about omega*log10(e) extra
    digits.
    """
    if kmax < 0:
        raise DomainError("kmax must be >= 0")
    with ctx.scope():
        omega = mpf(omega)
    extra = int(float(omega) * math.log10(math.e)) + 10
    with ctx.scope(extra):
        tol = mpf(10) ** (-(ctx.digits + 2 + extra))
        sums = [mpc(0)] * (kmax + 1)
        biggest = [mpf(0)] * (kmax + 1)
        term = mpc(1)  # (i omega)^j / j!
        iw = mpc(0, omega)
        j = 0
        streak = 0
        limit = 10 * int(float(omega)) + 20 * (ctx.digits + extra) + 1000
        while streak < _SMALL_STREAK:
            if j > limit:
                raise PrecisionExhausted(f"moment series did not converge for omega={omega}")
            small = True
            for k in range(kmax + 1):
                p = k + j
                if p % 2 == 0:
                    sums[k] += term * 2 / (p + 1)
                biggest[k] = max(biggest[k], abs(sums[k]))
                if abs(term) > tol * biggest[k]:
                    small = False
            streak = streak + 1 if small else 0
            j += 1
            term = term * iw / j
    with ctx.scope():
        m = tuple(+s for s in sums)
    return MomentTable(omega, m, ctx)


# -- recurrence ---------------------------------------------------------------

def recurrence_from_moments(mom: MomentTable, n: int, ctx: PrecisionContext | None = None,
                            strict: bool = False) -> RecurrenceTable:
    """Recurrence coefficients through degree n by Hankel elimination.

    This is the Chebyshev algorithm: sigma_{k,l} = <p_k, x^l> is built row
    by row; the diagonal sigma_{k,k} = h_k is the pivot of a conjugation-free
    LDL^T factorization of the Hankel matrix [m_{i+j}].  A pivot smaller
    than 10**(-digits/2) times its row's largest entry ends the table:
    p_{k+1} does not exist.  With ``strict`` that raises ExistenceFailure.
    """
    ctx = ctx or mom.ctx
    if mom.kmax < 2 * n:
        raise ValueError(f"need moments through {2 * n}, have {mom.kmax}")
    with ctx.scope():
        thresh = mpf(10) ** (-ctx.digits / 2)
        L = 2 * n + 1
        prev = [mpc(0)] * L
        cur = [mpc(v) for v in mom.m[:L]]
        a_sq = [None]
        b = []
        h = []
        exists = [True]
        floor = None
        failed = None
        for k in range(n + 1):
            piv = cur[k]
            scale = max(abs(v) for v in cur[k:L - k]) if L - k > k else abs(piv)
            ratio = abs(piv) / scale if scale else mpf(0)
            floor = ratio if floor is None else min(floor, ratio)
            if ratio < thresh:
                failed = abs(piv)
                break
            h.append(piv)
            ak = piv / h[k - 1] if k else None
            if k:
                a_sq.append(ak)
            if k == n:
                break
            bk = cur[k + 1] / piv - (prev[k] / h[k - 1] if k else 0)
            b.append(bk)
            nxt = [mpc(0)] * L
            for l in range(k + 1, L - k - 1):
                v = cur[l + 1] - bk * cur[l]
                if k:
                    v -= ak * prev[l]
                nxt[l] = v
            prev, cur = cur, nxt
            exists.append(True)
        exists += [False] * (n + 1 - len(exists))
    rec = RecurrenceTable(mom.omega, n, tuple(a_sq), tuple(b), tuple(h), tuple(exists),
                          floor, ctx, failed)
    if strict and failed is not None:
        raise ExistenceFailure(len(h), failed)
    return rec


def build_recurrence(n: int, omega, digits: int | None = None, strict: bool = False,
                     extra_degrees: int = 0) -> tuple[MomentTable, RecurrenceTable]:
    """Moments and recurrence under the default precision policy.

    Digits default to max(user, 40 + 2n).  After construction the
    orthogonality residual of p_n is checked against 10**(-digits/3); on
    failure the precision is doubled once, then PrecisionExhausted.
    ``extra_degrees`` extends the table beyond n without changing the
    precision choice (used to read off b_n, which needs p_{n+1}).
    """
    ctx = PrecisionContext(default_digits(n + extra_degrees, digits))
    size = n + extra_degrees
    for attempt in range(2):
        mom = moments(omega, 2 * size, ctx)
        rec = recurrence_from_moments(mom, size, ctx, strict=strict)
        top = rec.max_degree
        if top < 1:
            return mom, rec
        with ctx.scope():
            if orthogonality_residual(rec, mom, top) < mpf(10) ** (-ctx.digits / 3):
                return mom, rec
        ctx = ctx.doubled()
    raise PrecisionExhausted(f"orthogonality residual too large for n={n}, omega={omega}")


# -- evaluation ---------------------------------------------------------------

def eval_poly_and_derivative(rec: RecurrenceTable, k: int, z) -> tuple[mpc, mpc, mpc]:
    """(p_k(z), p_k'(z), p_{k-1}(z)) by forward recurrence."""
    rec.require(k)
    with rec.ctx.scope():
        z = mpc(z)
        p_prev, p = mpc(0), mpc(1)
        d_prev, d = mpc(0), mpc(0)
        for j in range(k):
            shift = z - rec.b[j]
            if j:
                a = rec.a_sq[j]
                p_next = shift * p - a * p_prev
                d_next = p + shift * d - a * d_prev
            else:
                p_next = shift * p
                d_next = p + shift * d
            p_prev, p = p, p_next
            d_prev, d = d, d_next
        return p, d, p_prev


def eval_poly(rec: RecurrenceTable, k: int, z) -> mpc:
    """p_k(z) by the forward three-term recurrence."""
    return eval_poly_and_derivative(rec, k, z)[0]


def monic_coefficients(rec: RecurrenceTable, n: int) -> MonicPolynomial:
    rec.require(n)
    with rec.ctx.scope():
        prev: list = []
        cur = [mpc(1)]
        for j in range(n):
            nxt = [mpc(0)] + cur  # z * p_j
            for i, c in enumerate(cur):
                nxt[i] -= rec.b[j] * c
            if j:
                for i, c in enumerate(prev):
                    nxt[i] -= rec.a_sq[j] * c
            prev, cur = cur, nxt
        cur[-1] = mpc(1)
        return MonicPolynomial(tuple(cur))


def orthogonality_residual(rec: RecurrenceTable, mom: MomentTable, n: int) -> mpf:
    """max_{k<n} |<p_n, x^k>| / |h_{n-1}| computed from the coefficients."""
    if n == 0:
        return mpf(0)
    poly = monic_coefficients(rec, n)
    with rec.ctx.scope():
        worst = mpf(0)
        for k in range(n):
            s = mpmath.fsum(c * mom.m[j + k] for j, c in enumerate(poly.coeffs))
            worst = max(worst, abs(s))
        return worst / abs(rec.h[n - 1])


# -- zeros and quadrature -----------------------------------------------------

def _initial_guesses(n: int, init) -> list:
    if init is not None:
        return [init.point_at_mass(mpf(2 * j + 1) / (2 * n)) for j in range(n)]
    # Chebyshev points, nudged off the real axis to break the symmetry
    return [mpc(mpmath.cos(mpmath.pi * (2 * j + 1) / (2 * n)), mpf(1) / (10 * n) * (j % 3 - 1) + mpf(1) / 50)
            for j in range(n)]


def _horner(coeffs, z):
    p = mpc(0)
    d = mpc(0)
    for c in reversed(coeffs):
        d = d * z + p
        p = p * z + c
    return p, d


def zeros(rec: RecurrenceTable, n: int, ctx: PrecisionContext | None = None, init=None) -> list:
    """All n zeros of p_n (Aberth-Ehrlich on the monic coefficients).

    ``init`` is an optional traced S-curve; starting points are then the
    points of equal equilibrium mass (j + 1/2)/n along it, otherwise
    Chebyshev points of [-1, 1].  Converged roots are polished by Newton
    steps evaluated through the recurrence.
    """
    ctx = ctx or rec.ctx
    rec.require(n)
    if n == 1:
        with ctx.scope():
            return [mpc(rec.b[0])]
    poly = monic_coefficients(rec, n)
    with ctx.scope():
        roots = _initial_guesses(n, init)
        stop = mpf(10) ** (-ctx.digits / 2)
        for it in range(_ABERTH_CAP):
            worst = mpf(0)
            for k in range(n):
                zk = roots[k]
                p, d = _horner(poly.coeffs, zk)
                if p == 0:
                    continue
                ratio = p / d
                s = mpmath.fsum(1 / (zk - roots[j]) for j in range(n) if j != k)
                step = ratio / (1 - ratio * s)
                roots[k] = zk - step
                worst = max(worst, abs(step) / max(1, abs(zk)))
            if worst < stop:
                break
        else:
            raise NonConvergence(f"Aberth iteration hit {_ABERTH_CAP} sweeps for n={n}")
        polished = []
        for zk in roots:
            for _ in range(3):
                p, d, _pm = eval_poly_and_derivative(rec, n, zk)
                if d == 0:
                    break
                zk = zk - p / d
            polished.append(zk)
        tol_half = mpmath.sqrt(ctx.tol)
        for zk in polished:
            p = eval_poly(rec, n, zk)
            scale = mpmath.fsum(abs(c) * abs(zk) ** j for j, c in enumerate(poly.coeffs))
            if abs(p) > tol_half * scale:
                raise NonConvergence(f"root {zk} has residual {abs(p)}")
        return polished


def quadrature_rule(rec: RecurrenceTable, n: int, ctx: PrecisionContext | None = None,
                    init=None) -> QuadratureRule:
    """n-point Gaussian rule for the oscillatory weight.

    Weights are Christoffel quotients h_{n-1} / (p_{n-1}(x_j) p_n'(x_j)),
    which need no square roots of the (complex) norms.
    """
    ctx = ctx or rec.ctx
    nodes = zeros(rec, n, ctx, init=init)
    with ctx.scope():
        weights = []
        for x in nodes:
            _p, d, pm = eval_poly_and_derivative(rec, n, x)
            if abs(d) < ctx.tol:
                raise DegenerateNode(f"p_n'(x) vanishes at node {x}")
            weights.append(rec.h[n - 1] / (pm * d))
    return QuadratureRule(n, rec.omega, tuple(nodes), tuple(weights), ctx)


def integrate(rule: QuadratureRule, f: Callable) -> mpc:
    """sum_j w_j f(x_j)."""
    with rule.ctx.scope():
        return mpmath.fsum(w * f(x) for x, w in zip(rule.nodes, rule.weights))


# -- reference integrator -------------------------------------------------------

def _gl_nodes(order_level: int, ctx: PrecisionContext):
    from mpmath.calculus.quadrature import GaussLegendre

    with ctx.scope():
        gl = GaussLegendre(mpmath.mp)
        return gl.calc_nodes(order_level, mpmath.mp.prec)


def oracle_integrate(f: Callable, omega, ctx: PrecisionContext, max_halvings: int = 12) -> mpc:
    """Reference value of int_{-1}^{1} f(x) exp(i omega x) dx.

    Composite Gauss-Legendre on panels no wider than pi/max(omega, 1);
    panels are halved until two successive sums agree to ctx.tol.
    """
    with ctx.scope():
        omega = mpf(omega)
        level = max(3, int(math.log2(max(ctx.digits, 8) / 3)) + 2)
        nodes = _gl_nodes(level, ctx)
        panels = max(2, int(mpmath.ceil(2 * max(omega, 1) / mpmath.pi)))
        tol = ctx.tol

        def composite(npan: int) -> mpc:
            width = mpf(2) / npan
            total = mpc(0)
            for p in range(npan):
                a = -1 + p * width
                c = a + width / 2
                for x, w in nodes:
                    t = c + x * width / 2
                    total += w * f(t) * mpmath.expj(omega * t)
            return total * width / 2

        last = composite(panels)
        for _ in range(max_halvings):
            panels *= 2
            cur = composite(panels)
            if abs(cur - last) <= tol * max(1, abs(cur)):
                return cur
            last = cur
    raise PrecisionExhausted("oracle quadrature did not settle")
