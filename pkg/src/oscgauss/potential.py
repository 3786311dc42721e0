"""Equilibrium measure of the field V(x) = -i*lambda*x and its S-curve.

Notation: s(z) = (z^2 - 1)^(1/2), varphi = z + s, phi = 2 log varphi + i lambda s,
xi = i phi / 2.  For 0 <= lambda < lambda0 the measure lives on a single arc
gamma_lambda from -1 to 1 along which Re phi = 0.

Near gamma it is convenient to use the "+" boundary values continued off the
arc, which only have cuts on the real rays |x| >= 1:

    phi_plus(z) = 2i arccos z - lambda sqrt(1 - z^2)
    psi_plus(z) = (2 + i lambda z) / (2 pi sqrt(1 - z^2))

On gamma the cumulative equilibrium mass from -1 is 1 - phi_plus / (2 pi i).
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from mpmath import mpc, mpf

from .errors import DomainError, NonConvergence, OnBoundary, OnCut, PoleAt
from .precision import BranchMode, PrecisionContext, sqrt_zsq_minus_one

__all__ = [
    "Regime",
    "QDClassification",
    "SCurve",
    "Trajectory",
    "h_of_lambda",
    "solve_lambda0",
    "varphi",
    "phi",
    "xi",
    "g_function",
    "equilibrium_density",
    "cauchy_transform_w",
    "Q_lambda",
    "z_star",
    "classify",
    "phi_plus",
    "phi_plus_prime",
    "psi_plus",
    "trace_scurve",
    "trace_trajectory",
    "launch_angles",
    "s_property_residual",
    "s_property_residuals",
    "variational_defect",
    "in_lens_region",
]

CURVE_CTX = PrecisionContext(30)
_END_ZONE = 0.25


def _ctx(ctx):
    return ctx if ctx is not None else CURVE_CTX


# -- scalar functions -----------------------------------------------------------

def h_of_lambda(lam, ctx: PrecisionContext | None = None) -> mpf:
    """2 log((2 + sqrt(lambda^2 + 4)) / lambda) - sqrt(lambda^2 + 4)."""
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        if lam <= 0:
            raise DomainError("h(lambda) needs lambda > 0")
        r = mpmath.sqrt(lam * lam + 4)
        return 2 * mpmath.log((2 + r) / lam) - r


def _h_prime(lam):
    r = mpmath.sqrt(lam * lam + 4)
    return 2 * (lam / (r * (2 + r)) - 1 / lam) - lam / r


@lru_cache(maxsize=16)
def _lambda0_cached(digits: int, guard: int) -> mpf:
    ctx = PrecisionContext(digits, guard)
    with ctx.scope():
        lo, hi = mpf(1), mpf(2)
        for _ in range(30):
            mid = (lo + hi) / 2
            if h_of_lambda(mid, ctx) > 0:
                lo = mid
            else:
                hi = mid
        x = (lo + hi) / 2
        for _ in range(100):
            dx = h_of_lambda(x, ctx) / _h_prime(x)
            x -= dx
            if abs(dx) < ctx.tol * x / 100:
                break
        return x


def solve_lambda0(ctx: PrecisionContext | None = None) -> mpf:
    """The positive root of h: below it the S-curve is a single arc."""
    ctx = _ctx(ctx)
    return _lambda0_cached(ctx.digits, ctx.guard)


def varphi(z, ctx: PrecisionContext | None = None, branch: BranchMode = BranchMode.PRINCIPAL,
           curve: "SCurve | None" = None) -> mpc:
    """z + (z^2 - 1)^(1/2), the exterior conformal map of the cut."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        return z + sqrt_zsq_minus_one(z, ctx, branch, curve)


def phi(z, lam, ctx: PrecisionContext | None = None, branch: BranchMode = BranchMode.PRINCIPAL,
        curve: "SCurve | None" = None) -> mpc:
    """2 log varphi(z) + i lambda (z^2 - 1)^(1/2)."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        return 2 * mpmath.log(z + s) + mpc(0, mpf(lam)) * s


def xi(z, lam, ctx: PrecisionContext | None = None, branch: BranchMode = BranchMode.PRINCIPAL,
       curve: "SCurve | None" = None) -> mpc:
    """Local parameter i log varphi - lambda s / 2 (equal to i phi / 2)."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        return 1j * mpmath.log(z + s) - mpf(lam) * s / 2


def g_function(z, lam, ctx: PrecisionContext | None = None, branch: BranchMode = BranchMode.PRINCIPAL,
               curve: "SCurve | None" = None) -> mpc:
    """Log transform of the equilibrium measure, ~ log z at infinity."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        if abs(z.imag) <= ctx.tol and z.real <= -1:
            raise OnCut(z, "g has a logarithmic cut on (-inf, -1]")
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        il = mpc(0, mpf(lam))
        return mpmath.log(z + s) + il * s / 2 - il * z / 2 - mpmath.log(2)


def equilibrium_density(z, lam, ctx: PrecisionContext | None = None,
                        branch: BranchMode = BranchMode.PRINCIPAL, curve: "SCurve | None" = None) -> mpc:
    """psi(z) = -(2 + i lambda z) / (2 pi i s(z))."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        return -(2 + mpc(0, mpf(lam)) * z) / (2j * mpmath.pi * s)


def cauchy_transform_w(z, lam, ctx: PrecisionContext | None = None,
                       branch: BranchMode = BranchMode.PRINCIPAL, curve: "SCurve | None" = None) -> mpc:
    """w(z) = -i lambda/2 + (2 + i lambda z) / (2 s(z)), ~ 1/z at infinity."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        s = sqrt_zsq_minus_one(z, ctx, branch, curve)
        il = mpc(0, mpf(lam))
        return -il / 2 + (2 + il * z) / (2 * s)


def Q_lambda(z, lam, ctx: PrecisionContext | None = None) -> mpc:
    """(2 + i lambda z)^2 / (4 (z^2 - 1)), the quadratic differential."""
    ctx = _ctx(ctx)
    with ctx.scope():
        z = mpc(z)
        if abs(z - 1) <= ctx.tol or abs(z + 1) <= ctx.tol:
            raise PoleAt(z)
        return (2 + mpc(0, mpf(lam)) * z) ** 2 / (4 * (z * z - 1))


def z_star(lam, ctx: PrecisionContext | None = None) -> mpc:
    """Double zero 2i/lambda of Q."""
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        if lam <= 0:
            raise DomainError("no double zero for lambda = 0")
        return mpc(0, 2 / lam)


class Regime(enum.Enum):
    SINGLE_ARC = "single_arc"
    CRITICAL = "critical"
    TWO_ARC = "two_arc"


@dataclass(frozen=True)
class QDClassification:
    lam: mpf
    regime: Regime
    z_star: mpc | None
    im_xi_zstar: mpf


def classify(lam, ctx: PrecisionContext | None = None) -> QDClassification:
    """Regime from the sign of Im xi(z*) = h(lambda) / 2."""
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        if lam < 0:
            raise DomainError("lambda must be nonnegative")
        if lam == 0:
            return QDClassification(lam, Regime.SINGLE_ARC, None, mpmath.inf)
        v = h_of_lambda(lam, ctx) / 2
        if abs(v) < ctx.tol:
            regime = Regime.CRITICAL
        elif v > 0:
            regime = Regime.SINGLE_ARC
        else:
            regime = Regime.TWO_ARC
        return QDClassification(lam, regime, z_star(lam, ctx), v)


# -- "+" side functions, analytic across the arc ----------------------------------

def phi_plus(z, lam) -> mpc:
    """2i arccos z - lambda sqrt(1 - z^2) at the current working precision."""
    z = mpc(z)
    return 2j * mpmath.acos(z) - mpf(lam) * mpmath.sqrt(1 - z * z)


def phi_plus_prime(z, lam) -> mpc:
    z = mpc(z)
    return -1j * (2 + 1j * mpf(lam) * z) / mpmath.sqrt(1 - z * z)


def psi_plus(z, lam) -> mpc:
    z = mpc(z)
    return (2 + 1j * mpf(lam) * z) / (2 * mpmath.pi * mpmath.sqrt(1 - z * z))


# -- S-curve ----------------------------------------------------------------------

@dataclass(frozen=True)
class SCurve:
    """Traced arc from -1 to 1 with its cumulative equilibrium mass."""

    lam: mpf
    points: tuple
    tangents: tuple
    mass: tuple
    step: float
    curve_tol: mpf
    ctx: PrecisionContext
    _fpts: tuple = field(repr=False, compare=False, default=())

    def __post_init__(self):
        if not self._fpts:
            object.__setattr__(self, "_fpts", tuple(complex(p) for p in self.points))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_segment(self) -> bool:
        return self.lam == 0

    def arclength(self) -> list[float]:
        out = [0.0]
        for a, b in zip(self._fpts, self._fpts[1:]):
            out.append(out[-1] + abs(b - a))
        return out

    def distance(self, z) -> float:
        """Euclidean distance from z to the polyline (double precision)."""
        return self._nearest(complex(z))[0]

    def _nearest(self, z: complex) -> tuple[float, int, float]:
        best = (math.inf, 0, 0.0)
        pts = self._fpts
        for j in range(len(pts) - 1):
            a, b = pts[j], pts[j + 1]
            d = b - a
            L2 = d.real * d.real + d.imag * d.imag
            t = 0.0 if L2 == 0 else ((z - a) * d.conjugate()).real / L2
            t = min(1.0, max(0.0, t))
            dist = abs(z - (a + t * d))
            if dist < best[0]:
                best = (dist, j, t)
        return best

    def exact_distance(self, z) -> mpf:
        """Distance to the polyline at working precision.

        The nearest segment is located in double precision, then the
        distance to it and its neighbours is recomputed exactly.
        """
        with self.ctx.scope():
            z = mpc(z)
            _d, j, _t = self._nearest(complex(z))
            best = mpmath.inf
            for k in range(max(0, j - 1), min(len(self.points) - 1, j + 2)):
                a, b = self.points[k], self.points[k + 1]
                d = b - a
                L2 = abs(d) ** 2
                t = mpf(0) if L2 == 0 else min(mpf(1), max(mpf(0), ((z - a) * mpmath.conj(d)).real / L2))
                best = min(best, abs(z - (a + t * d)))
            return best

    def mass_at(self, z) -> mpf:
        """Cumulative mass at the polyline point nearest z (linear in the segment)."""
        _d, j, t = self._nearest(complex(z))
        with self.ctx.scope():
            return self.mass[j] + mpf(t) * (self.mass[j + 1] - self.mass[j])

    def nearest_parameter(self, z) -> float:
        """Arc-length fraction in [0, 1] of the polyline point nearest z."""
        _d, j, t = self._nearest(complex(z))
        arc = self.arclength()
        return (arc[j] + t * (arc[j + 1] - arc[j])) / arc[-1]

    def contains(self, z) -> bool:
        """Whether z lies strictly inside the region between [-1, 1] and the arc.

        Raises OnBoundary within tolerance of either boundary piece.
        """
        with self.ctx.scope():
            z = mpc(z)
            tol = self.ctx.tol
            if abs(z.imag) <= tol and abs(z.real) <= 1 + tol:
                raise OnBoundary(z, "point on the segment [-1, 1]")
            if self.is_segment or z.imag < 0:
                return False
            zf = complex(z)
            dist, _j, _t = self._nearest(zf)
            if dist < 4 * self.step:
                # Re phi_plus < 0 inside, > 0 outside, 0 on the arc
                v = phi_plus(z, self.lam).real
                d = abs(phi_plus_prime(z, self.lam))
                if abs(v) <= 10 * self.curve_tol * max(1, d):
                    raise OnBoundary(z, "point on the S-curve")
                return v < 0
            # vertical ray casting against the arc
            inside = False
            pts = self._fpts
            for a, b in zip(pts, pts[1:]):
                if (a.real > zf.real) != (b.real > zf.real):
                    y = a.imag + (zf.real - a.real) * (b.imag - a.imag) / (b.real - a.real)
                    if y > zf.imag:
                        inside = not inside
            return inside

    def point_at_mass(self, m, refine: bool = True) -> mpc:
        """Point of the arc with cumulative mass m (interpolated, then Newton)."""
        with self.ctx.scope():
            m = mpf(m)
            if m <= 0:
                return mpc(-1)
            if m >= 1:
                return mpc(1)
            fm = [float(v) for v in self.mass]
            j = min(max(bisect.bisect_left(fm, float(m)) - 1, 0), len(fm) - 2)
            span = self.mass[j + 1] - self.mass[j]
            t = (m - self.mass[j]) / span if span else mpf(0)
            guess = self.points[j] + t * (self.points[j + 1] - self.points[j])
            if not refine or self.is_segment:
                if self.is_segment:
                    return mpc(-mpmath.cos(mpmath.pi * m))
                return guess
            return _invert_mass(guess, m, self.lam, self.ctx)


def _invert_mass(guess, m, lam, ctx: PrecisionContext) -> mpc:
    """Solve mass(s) = m near ``guess``.

    Works with (phi_plus - c)^2, which is analytic at the endpoint where
    phi_plus = c, so Newton converges all the way to the ends of the arc.
    """
    target = 2j * mpmath.pi * (1 - m)
    c = mpc(0) if m >= mpf(1) / 2 else mpc(0, 2 * mpmath.pi)
    rhs = (target - c) ** 2
    s = mpc(guess)
    for _ in range(60):
        f = phi_plus(s, lam) - c
        df = 2 * f * phi_plus_prime(s, lam)
        if df == 0:
            break
        ds = (f * f - rhs) / df
        s -= ds
        if abs(ds) < ctx.tol:
            return s
    raise NonConvergence(f"mass inversion failed for m={m}")


def _unit(z):
    return z / abs(z)


def _tangent(z, lam, ref):
    t = _unit(1j * mpmath.conj(phi_plus_prime(z, lam)))
    return t if (t * mpmath.conj(ref)).real >= 0 else -t


def _correct(z, lam, level, tol, fn, dfn, limit: int = 40):
    for _ in range(limit):
        v = fn(z).real - level
        if abs(v) < tol:
            return z
        d = dfn(z)
        z = z - v * mpmath.conj(d) / abs(d) ** 2
    raise NonConvergence(f"corrector failed near z={complex(z)}")


def _rk4(z, h, field_at, ref):
    k1 = field_at(z, ref)
    k2 = field_at(z + h / 2 * k1, k1)
    k3 = field_at(z + h / 2 * k2, k2)
    k4 = field_at(z + h * k3, k3)
    return z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _gl_rule(level: int = 1):
    """Gauss-Legendre nodes and weights on [0, 1] (3 * 2**(level-1) points)."""
    from mpmath.calculus.quadrature import GaussLegendre

    nodes = GaussLegendre(mpmath.mp).calc_nodes(level, mpmath.mp.prec)
    return [(1 + x) / 2 for x, _w in nodes], [w / 2 for _x, w in nodes]


def _chord_mass(a, b, lam, xs, ws, endpoint=None):
    """Integral of psi_plus dz along the chord a -> b.

    Near an endpoint e the density blows up like |z - e|^(-1/2); there the
    chord is integrated in u = sqrt(z - e), where the integrand is smooth.
    """
    if endpoint is None:
        d = b - a
        return d * mpmath.fsum(w * psi_plus(a + x * d, lam) for x, w in zip(xs, ws))
    e = endpoint
    ua, ub = mpmath.sqrt(a - e), mpmath.sqrt(b - e)
    du = ub - ua
    total = mpmath.fsum(w * psi_plus(e + u * u, lam) * 2 * u
                        for u, w in ((ua + x * du, w) for x, w in zip(xs, ws)))
    return du * total


def trace_scurve(lam, step: float = 1e-3, curve_tol=None, ctx: PrecisionContext | None = None,
                 start: int = 1) -> SCurve:
    """Trace gamma_lambda = {Re phi = 0} between the endpoints.

    Predictor-corrector continuation: RK4 along the unit tangent
    i conj(phi') / |phi'|, then Newton along the normal until
    |Re phi| < curve_tol.  The arc is launched from ``start`` into the upper
    half plane (angle 2 arctan(2/lambda) at z = 1, mirrored at z = -1) and
    stops on arrival at the other endpoint.  Points are returned ordered
    from -1 to 1.
    """
    ctx = _ctx(ctx)
    if start not in (1, -1):
        raise ValueError("start must be +1 or -1")
    with ctx.scope():
        lam = mpf(lam)
        tol = mpf(curve_tol) if curve_tol is not None else mpf(10) ** -20
        if lam < 0:
            raise DomainError("lambda must be nonnegative")
        lam0 = solve_lambda0(ctx)
        if lam >= lam0 - ctx.tol:
            raise DomainError(f"lambda={lam} is not below lambda0={mpmath.nstr(lam0, 12)}")
        xs, ws = _gl_rule(2)
        if lam == 0:
            count = max(2, int(math.ceil(2 / step)))
            pts = [mpc(-1 + mpf(2 * j) / count) for j in range(count + 1)]
            tangents = [mpc(1)] * len(pts)
            mass = [1 - mpmath.acos(p.real) / mpmath.pi for p in pts]
            mass[0], mass[-1] = mpf(0), mpf(1)
            return SCurve(lam, tuple(pts), tuple(tangents), tuple(mass), float(step), tol, ctx)

        theta = 2 * mpmath.atan(2 / lam)
        if start == -1:
            theta = mpmath.pi - theta
        origin, goal = mpc(start), mpc(-start)
        h = mpf(step)
        launch = mpmath.expj(theta)
        fn = lambda z: phi_plus(z, lam)
        dfn = lambda z: phi_plus_prime(z, lam)
        field_at = lambda z, ref: _tangent(z, lam, ref)

        pts = [origin, _correct(origin + h * launch, lam, 0, tol, fn, dfn)]
        max_steps = int(50 / step)
        while abs(pts[-1] - goal) >= 1.5 * h:
            if len(pts) > max_steps:
                raise NonConvergence("S-curve tracing exceeded its step budget")
            z = pts[-1]
            ref = _unit(z - pts[-2])
            znew = _correct(_rk4(z, h, field_at, ref), lam, 0, tol, fn, dfn)
            if abs(znew) > 10:
                raise NonConvergence("S-curve left the bounding box")
            pts.append(znew)
        pts.append(goal)
        if start == 1:
            pts.reverse()

        tangents = [_unit(pts[1] - pts[0])]
        for j in range(1, len(pts) - 1):
            tangents.append(_tangent(pts[j], lam, pts[j + 1] - pts[j - 1]))
        tangents.append(_unit(pts[-1] - pts[-2]))

        mass = [mpf(0)]
        acc = mpc(0)
        for j in range(len(pts) - 1):
            a, b = pts[j], pts[j + 1]
            endpoint = None
            if abs(a + 1) < _END_ZONE:
                endpoint = mpc(-1)
            elif abs(b - 1) < _END_ZONE:
                endpoint = mpc(1)
            acc += _chord_mass(a, b, lam, xs, ws, endpoint)
            mass.append(acc.real)
        return SCurve(lam, tuple(pts), tuple(tangents), tuple(mass), float(step), tol, ctx)


def in_lens_region(z, curve: SCurve) -> bool:
    return curve.contains(z)


def variational_defect(curve: SCurve) -> mpf:
    """max over curve points of |Re(2g - V - l)|, i.e. |Re phi| on the arc."""
    with curve.ctx.scope():
        return max(abs(phi_plus(p, curve.lam).real) for p in curve.points)


# -- S-property -------------------------------------------------------------------

def _m_panels(m0, delta):
    """Breakpoints on [0, 1] graded geometrically toward m0."""
    left = [m0 - delta]
    d = delta
    while left[-1] > 0:
        d *= 2
        left.append(m0 - d)
    left[-1] = mpf(0)
    right = [m0 + delta]
    d = delta
    while right[-1] < 1:
        d *= 2
        right.append(m0 + d)
    right[-1] = mpf(1)
    return list(reversed(left)) + right


def _measure_nodes(curve: SCurve, m0, delta, order: int = 24):
    from mpmath.calculus.quadrature import GaussLegendre

    level = max(1, int(round(math.log2(order / 3))) + 1)
    gl = GaussLegendre(mpmath.mp).calc_nodes(level, mpmath.mp.prec)
    nodes, weights = [], []
    bps = _m_panels(m0, delta)
    for a, b in zip(bps, bps[1:]):
        half, mid = (b - a) / 2, (a + b) / 2
        for x, w in gl:
            m = mid + half * x
            nodes.append(curve.point_at_mass(m))
            weights.append(w * half)
    return nodes, weights


def _potential(z, nodes, weights):
    return -mpmath.fsum(w * mpmath.log(abs(z - s)) for s, w in zip(nodes, weights))


def s_property_residuals(curve: SCurve, sample_count: int, hsteps, ctx: PrecisionContext | None = None):
    """S-property residuals at ``sample_count`` arc points for each h in ``hsteps``.

    F = U^mu + Re V / 2 with U^mu(z) = -int log|z - s| dmu(s).  The one-sided
    normal derivatives of F on the two sides of the arc are taken with
    second-order stencils; their mismatch,
    |4 (F(z+hn) - F(z-hn)) - (F(z+2hn) - F(z-2hn))| / (2h),
    is returned as a list per h.  Samples keep 5% of arc length away from
    either end.
    """
    ctx = ctx or curve.ctx
    hsteps = [mpf(h) for h in hsteps]
    arc = curve.arclength()
    idx = []
    for k in range(sample_count):
        frac = 0.05 + 0.9 * (k + 0.5) / sample_count
        idx.append(min(range(len(arc)), key=lambda j: abs(arc[j] / arc[-1] - frac)))
    out = {h: [] for h in hsteps}
    with ctx.scope():
        lam = curve.lam
        for j in idx:
            z0 = curve.points[j]
            m0 = curve.mass[j]
            d = phi_plus_prime(z0, lam)
            normal = mpmath.conj(d) / abs(d)
            dens = abs(psi_plus(z0, lam))
            delta = min(hsteps) * dens / 4
            delta = min(delta, m0 / 2, (1 - m0) / 2)
            nodes, weights = _measure_nodes(curve, m0, delta)

            def F(z):
                return _potential(z, nodes, weights) + lam * z.imag / 2

            for h in hsteps:
                d1 = F(z0 + h * normal) - F(z0 - h * normal)
                d2 = F(z0 + 2 * h * normal) - F(z0 - 2 * h * normal)
                out[h].append(abs(4 * d1 - d2) / (2 * h))
    return [out[h] for h in hsteps]


def s_property_residual(curve: SCurve, sample_count: int = 5, hstep=1e-3,
                        ctx: PrecisionContext | None = None) -> list:
    return s_property_residuals(curve, sample_count, [hstep], ctx)[0]


# -- trajectories -------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    lam: mpf
    points: tuple
    origin: str
    termination: str
    level: mpf
    crossings: tuple  # real-axis crossing abscissae in order


def launch_angles(lam, ctx: PrecisionContext | None = None) -> list:
    """The four directions in which trajectories leave the double zero z*."""
    ctx = _ctx(ctx)
    with ctx.scope():
        zs = z_star(lam, ctx)
        s = sqrt_zsq_minus_one(zs, ctx)
        xi2 = -mpf(lam) / (2 * s)  # xi'' at z*
        base = -mpmath.arg(xi2) / 2
        return sorted(mpmath.atan2(mpmath.sin(base + k * mpmath.pi / 2), mpmath.cos(base + k * mpmath.pi / 2))
                      for k in range(4))


def _phi_principal(z, lam):
    s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
    return 2 * mpmath.log(z + s) + 1j * mpf(lam) * s


def _phi_principal_prime(z, lam):
    s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
    return (2 + 1j * mpf(lam) * z) / s


def trace_trajectory(z0, lam, direction, step: float = 1e-2, ctx: PrecisionContext | None = None,
                     box: float = 10.0, max_steps: int = 100000, max_crossings: int | None = None,
                     level_tol=None) -> Trajectory:
    """Follow the level line Im xi = Im xi(z0) starting in ``direction`` (an angle).

    The line is continued across (-1, 1), where phi changes sign, by
    tracking that sign.  Tracing stops at a pole (+-1), on leaving the box
    |z| < box, on closing up, or after ``max_crossings`` real-axis crossings.
    """
    ctx = _ctx(ctx)
    with ctx.scope():
        lam = mpf(lam)
        z0 = mpc(z0)
        h = mpf(step)
        tol = mpf(level_tol) if level_tol is not None else mpf(10) ** (-min(20, ctx.digits - 8))
        origin = "regular"
        if lam > 0 and abs(z0 - z_star(lam, ctx)) < ctx.tol:
            origin = "z*"
        elif abs(z0 - 1) < ctx.tol:
            origin, z0 = "+1", mpc(1)
        elif abs(z0 + 1) < ctx.tol:
            origin, z0 = "-1", mpc(-1)
        if origin in ("+1", "-1"):
            level = mpf(0)
        else:
            if abs(z0.imag) <= ctx.tol and abs(z0.real) <= 1:
                raise OnCut(z0)
            level = _phi_principal(z0, lam).real
        sign = [1]
        fn = lambda z: sign[0] * _phi_principal(z, lam)
        dfn = lambda z: sign[0] * _phi_principal_prime(z, lam)

        def field_at(z, ref):
            t = _unit(1j * mpmath.conj(_phi_principal_prime(z, lam)))
            return t if (t * mpmath.conj(ref)).real >= 0 else -t

        launch = mpmath.expj(mpf(direction))
        if origin == "regular":
            launch = field_at(z0, launch)
        pts = [z0]
        crossings = []
        termination = None
        z_prev_dir = launch

        def advance(z, znew):
            # flip the sign of phi when stepping across (-1, 1)
            if (z.imag > 0) != (znew.imag > 0) and z.imag != 0:
                t = z.imag / (z.imag - znew.imag)
                x = z.real + t * (znew.real - z.real)
                crossings.append(x)
                if abs(x) < 1:
                    sign[0] = -sign[0]

        first = z0 + h * launch
        advance(z0, first)
        pts.append(_correct(first, lam, level, tol, fn, dfn))
        while termination is None:
            if len(pts) > max_steps:
                raise NonConvergence("trajectory exceeded its step budget")
            z = pts[-1]
            ref = _unit(z - pts[-2])
            guess = _rk4(z, h, field_at, ref)
            advance(z, guess)
            znew = _correct(guess, lam, level, tol, fn, dfn)
            pts.append(znew)
            if min(abs(znew - 1), abs(znew + 1)) < 1.5 * h:
                termination = "reached pole"
            elif abs(znew) > box:
                termination = "left bounding box"
            elif len(pts) > 10 and abs(znew - z0) < h:
                termination = "closed loop"
            elif max_crossings is not None and len(crossings) >= max_crossings:
                termination = "crossing limit"
        return Trajectory(lam, tuple(pts), origin, termination, level / 2, tuple(crossings))
