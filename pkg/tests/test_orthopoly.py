from __future__ import annotations

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpc, mpf

from oracles import gauss_legendre, legendre_a_sq, moments_by_parts, monic_legendre
from oscgauss.errors import DomainError, ExistenceFailure
from oscgauss.orthopoly import (
    ProblemParams,
    build_recurrence,
    default_digits,
    eval_poly,
    eval_poly_and_derivative,
    integrate,
    moments,
    monic_coefficients,
    oracle_integrate,
    orthogonality_residual,
    quadrature_rule,
    recurrence_from_moments,
    zeros,
)
from oscgauss.precision import PrecisionContext

CTX = PrecisionContext(50)


def test_problem_params():
    p = ProblemParams.from_lambda(20, "0.5")
    with p.ctx.scope():
        assert p.omega == 10 and p.lam * p.n == p.omega
    assert p.ctx.digits == default_digits(20) == 80
    assert ProblemParams.from_omega(4, 8, digits=100).ctx.digits == 100
    with pytest.raises(DomainError):
        ProblemParams.from_omega(0, 1)
    with pytest.raises(DomainError):
        ProblemParams.from_lambda(3, -1)


def test_moments_at_zero_frequency():
    m = moments(0, 4, CTX).m
    with CTX.scope():
        assert m[0] == 2 and m[1] == 0
        assert abs(m[2] - mpf(2) / 3) < CTX.tol
        assert abs(m[4] - mpf(2) / 5) < CTX.tol


def test_first_moment_at_pi():
    with CTX.scope():
        m = moments(mpmath.pi, 1, CTX).m
        assert abs(m[1] - mpc(0, 2 / mpmath.pi)) < CTX.tol


@pytest.mark.parametrize("omega", ["0.7", "5", "31.5", "120"])
def test_moments_against_integration_by_parts(omega):
    table = moments(omega, 12, CTX)
    with mpmath.workdps(150):
        ref = moments_by_parts(mpf(omega), 12)
    with CTX.scope():
        for k in range(13):
            assert abs(table.m[k] - ref[k]) <= CTX.tol * max(1, abs(ref[k]))


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0, max_value=80, allow_nan=False))
def test_moment_symmetry(omega):
    table = moments(omega, 9, CTX)
    with CTX.scope():
        for k, m in enumerate(table.m):
            assert abs(mpmath.conj(m) - (-1) ** k * m) <= CTX.tol * max(1, abs(m))


def test_legendre_recurrence():
    rec = recurrence_from_moments(moments(0, 8, CTX), 4, CTX)
    with CTX.scope():
        for k in range(1, 5):
            assert abs(rec.a_sq[k] - legendre_a_sq(k)) < CTX.tol
        assert all(abs(b) < CTX.tol for b in rec.b)
        for k in range(1, 5):
            assert abs(rec.h[k] - rec.h[0] * mpmath.fprod(rec.a_sq[1:k + 1])) < CTX.tol


def test_existence_failure_at_pi():
    with CTX.scope():
        mom = moments(mpmath.pi, 4, CTX)
    rec = recurrence_from_moments(mom, 2, CTX)
    assert rec.exists == (True, False, False)
    assert rec.max_degree == 0
    with pytest.raises(ExistenceFailure) as info:
        rec.require(1)
    assert info.value.degree == 1 and info.value.pivot < 1e-40
    with pytest.raises(ExistenceFailure):
        recurrence_from_moments(mom, 2, CTX, strict=True)
    with pytest.raises(ExistenceFailure):
        eval_poly(rec, 1, 0)


@pytest.mark.parametrize("omega", ["1", "7.5", "23"])
def test_coefficient_symmetry(omega):
    _m, rec = build_recurrence(10, omega)
    with rec.ctx.scope():
        tol = rec.ctx.tol * 1e3
        for a in rec.a_sq[1:]:
            assert abs(a.imag) <= tol * abs(a)
        for b in rec.b:
            assert abs(b.real) <= tol * max(1, abs(b))


def test_tiny_frequency_is_continuous_with_legendre():
    _m, rec = build_recurrence(12, mpf(10) ** -30)
    with rec.ctx.scope():
        for k in range(1, 13):
            assert abs(rec.a_sq[k] - legendre_a_sq(k)) < mpf(10) ** -25
        assert max(abs(b) for b in rec.b) < mpf(10) ** -25


def test_eval_poly_small_degrees():
    _m, rec = build_recurrence(3, 2)
    with rec.ctx.scope():
        z = mpc("0.3", "-0.7")
        assert eval_poly(rec, 0, z) == 1
        assert abs(eval_poly(rec, 1, z) - (z - rec.b[0])) < rec.ctx.tol
    _m, leg = build_recurrence(3, 0)
    with leg.ctx.scope():
        assert abs(eval_poly(leg, 2, z) - (z * z - mpf(1) / 3)) < leg.ctx.tol


def test_derivative_by_finite_difference():
    _m, rec = build_recurrence(8, 6)
    with rec.ctx.scope():
        z = mpc("0.2", "0.4")
        h = mpf(10) ** -20
        p, d, _ = eval_poly_and_derivative(rec, 8, z)
        fd = (eval_poly(rec, 8, z + h) - eval_poly(rec, 8, z - h)) / (2 * h)
        assert abs(d - fd) < 1e-30 * abs(d)


def test_monic_coefficients_match_recurrence():
    _m, rec = build_recurrence(6, 4)
    poly = monic_coefficients(rec, 6)
    assert poly.degree == 6 and poly.coeffs[-1] == 1
    with rec.ctx.scope():
        for z in (mpc(0.1, 0.2), mpc(-1.3, 0.5), mpc(2, -1)):
            assert abs(poly(z) - eval_poly(rec, 6, z)) < rec.ctx.tol * max(1, abs(poly(z)))
        one = monic_coefficients(rec, 1)
        assert one.coeffs == (-rec.b[0], 1)
    _m, leg = build_recurrence(2, 0)
    with leg.ctx.scope():
        c = monic_coefficients(leg, 2).coeffs
        assert abs(c[0] + mpf(1) / 3) < leg.ctx.tol and c[1] == 0 and c[2] == 1


def test_zeros_simple_cases():
    _m, leg = build_recurrence(2, 0)
    with leg.ctx.scope():
        zs = sorted(zeros(leg, 2), key=lambda z: z.real)
        r = 1 / mpmath.sqrt(3)
        assert abs(zs[0] + r) < leg.ctx.tol and abs(zs[1] - r) < leg.ctx.tol
    _m, rec = build_recurrence(3, 5)
    assert zeros(rec, 1) == [rec.b[0]]


@pytest.mark.parametrize("n,omega", [(7, 3), (12, 10), (16, "12.5")])
def test_zero_set_symmetry(n, omega):
    _m, rec = build_recurrence(n, omega)
    zs = zeros(rec, n)
    with rec.ctx.scope():
        tol = mpf(10) ** (-rec.ctx.digits // 3)
        for z in zs:
            mirror = -mpmath.conj(z)
            assert min(abs(mirror - w) for w in zs) < tol
            assert abs(eval_poly(rec, n, z)) < tol


def test_zeros_with_curve_initial_guess(curves):
    curve = curves(0.5, 5e-3)
    _m, rec = build_recurrence(20, 10)
    a = zeros(rec, 20, init=curve)
    b = zeros(rec, 20)
    with rec.ctx.scope():
        for z in a:
            assert min(abs(z - w) for w in b) < mpf(10) ** -30


def test_quadrature_simple_rules():
    _m, rec = build_recurrence(3, 4)
    rule = quadrature_rule(rec, 1)
    with rec.ctx.scope():
        assert rule.nodes == (rec.b[0],)
        assert abs(rule.weights[0] - rec.h[0]) < rec.ctx.tol
    _m, leg = build_recurrence(2, 0)
    rule = quadrature_rule(leg, 2)
    with leg.ctx.scope():
        assert all(abs(w - 1) < leg.ctx.tol for w in rule.weights)


@pytest.mark.parametrize("n,omega", [(4, 2), (9, 20)])
def test_quadrature_exactness(n, omega):
    mom, rec = build_recurrence(n, omega)
    rule = quadrature_rule(rec, n)
    with rec.ctx.scope():
        assert abs(mpmath.fsum(rule.weights) - mom.m[0]) < rec.ctx.tol * 10
        for k in range(2 * n):
            assert abs(integrate(rule, lambda x: x ** k) - mom.m[k]) < rec.ctx.tol * 10 * abs(mom.m[0])
        assert abs(integrate(rule, lambda x: 1) - 2 * mpmath.sin(mpf(omega)) / omega) < rec.ctx.tol * 10


def test_gauss_legendre_reduction():
    _m, leg = build_recurrence(5, 0)
    rule = quadrature_rule(leg, 5)
    with leg.ctx.scope():
        ref = sorted(zip(*gauss_legendre(5)), key=lambda t: t[0])
        got = sorted(zip(rule.nodes, rule.weights), key=lambda t: t[0].real)
        for (xn, wn), (xr, wr) in zip(got, ref):
            assert abs(xn - xr) < mpf(10) ** -40 and abs(wn - wr) < mpf(10) ** -40
        val = integrate(rule, mpmath.exp)
        assert abs(val - (mpmath.e - 1 / mpmath.e)) < 1e-9


def test_oracle_integrate_closed_forms():
    ctx = PrecisionContext(30)
    with ctx.scope():
        w = mpf("7.3")
        assert abs(oracle_integrate(lambda x: 1, w, ctx) - 2 * mpmath.sin(w) / w) < ctx.tol * 10
        got = oracle_integrate(lambda x: x, mpmath.pi, ctx)
        assert abs(got - mpc(0, 2 / mpmath.pi)) < ctx.tol * 10
        assert abs(oracle_integrate(mpmath.exp, 0, ctx) - (mpmath.e - 1 / mpmath.e)) < ctx.tol * 10


def test_orthogonality_residual_policy():
    mom, rec = build_recurrence(40, 20)
    with rec.ctx.scope():
        assert orthogonality_residual(rec, mom, 40) < mpf(10) ** (-rec.ctx.digits / 3)
        assert orthogonality_residual(rec, mom, 0) == 0
    # too few digits: elimination error shows up in the residual
    low = PrecisionContext(20)
    mom_low = moments(20, 80, low)
    rec_low = recurrence_from_moments(mom_low, 40, low)
    if rec_low.max_degree >= 40:
        with low.scope():
            assert orthogonality_residual(rec_low, mom_low, 40) > orthogonality_residual(rec, mom, 40)
