from __future__ import annotations

import math

import mpmath
import pytest
from mpmath import mpc, mpf

from oscgauss.errors import DomainError, OnBoundary, OnCut, PoleAt
from oscgauss.potential import (
    Regime,
    Q_lambda,
    cauchy_transform_w,
    classify,
    equilibrium_density,
    g_function,
    h_of_lambda,
    launch_angles,
    phi,
    phi_plus,
    psi_plus,
    s_property_residuals,
    solve_lambda0,
    trace_scurve,
    trace_trajectory,
    variational_defect,
    varphi,
    xi,
    z_star,
)
from oscgauss.precision import PrecisionContext

CTX = PrecisionContext(30)


def close(a, b, tol=1e-25):
    return abs(a - b) <= tol * max(1, abs(b))


def test_h_at_one_and_two():
    with CTX.scope():
        r5 = mpmath.sqrt(5)
        assert close(h_of_lambda(1, CTX), 2 * mpmath.log(2 + r5) - r5)
        r8 = mpmath.sqrt(8)
        assert close(h_of_lambda(2, CTX), 2 * mpmath.log((2 + r8) / 2) - r8)
    assert h_of_lambda(1, CTX) > 0 > h_of_lambda(2, CTX)
    with pytest.raises(DomainError):
        h_of_lambda(0, CTX)


def test_lambda0():
    lam0 = solve_lambda0(CTX)
    assert abs(lam0 - mpf("1.32548")) < 1e-5
    assert abs(h_of_lambda(lam0, CTX)) < 1e-25
    assert abs(solve_lambda0(PrecisionContext(60)) - lam0) < 1e-28


def test_varphi_values():
    with CTX.scope():
        assert close(varphi(2, CTX), 2 + mpmath.sqrt(3))
        assert close(varphi(1j, CTX), mpc(0, 1 + mpmath.sqrt(2)))
        assert close(varphi(-2, CTX), -2 - mpmath.sqrt(3))
        for z in (mpc(3, 1), mpc(-0.5, 2), mpc(0.2, -0.1)):
            v = varphi(z, CTX)
            assert abs(v) > 1
            assert close((v + 1 / v) / 2, z)


def test_phi_and_xi_relations():
    with CTX.scope():
        for lam in (0, mpf("0.5"), 1):
            for z in (mpc(2, 0.5), mpc(-0.3, 1.2), mpc(0.4, -0.7)):
                assert close(xi(z, lam, CTX), 1j * phi(z, lam, CTX) / 2)
        z, lam = mpc("1.3", "0.4"), mpf("0.7")
        s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
        assert close(phi(z, lam, CTX), 2 * mpmath.log(z + s) + 1j * lam * s)


def test_phi_vanishes_at_plus_one():
    with CTX.scope():
        assert abs(phi(1 + mpf(10) ** -24, mpf("0.5"), CTX)) < 1e-10
    with pytest.raises(OnCut):
        phi(1, "0.5", CTX)


def test_g_function_asymptotics_and_cut():
    with CTX.scope():
        lam = mpf("0.6")
        z = mpc(10) ** 8
        assert abs(g_function(z, lam, CTX) - mpmath.log(z)) < 1e-7
        # 2g - V - l = phi with V = -i lambda z and l = -2 log 2
        for w in (mpc(2, 1), mpc(-0.4, 0.9)):
            lhs = 2 * g_function(w, lam, CTX) + 1j * lam * w + 2 * mpmath.log(2)
            assert close(lhs, phi(w, lam, CTX))
    with pytest.raises(OnCut):
        g_function(-3, lam, CTX)


def test_density_and_cauchy_transform():
    with CTX.scope():
        lam = mpf("0.8")
        assert close(equilibrium_density(1j, 0, CTX), 1 / (mpmath.pi * mpmath.sqrt(2)))
        big = mpc(0, 1) * mpf(10) ** 12
        assert abs(cauchy_transform_w(big, lam, CTX) * big - 1) < 1e-10
        z = mpc("1.5", "0.3")
        h = mpf(10) ** -12
        dg = (g_function(z + h, lam, CTX) - g_function(z - h, lam, CTX)) / (2 * h)
        assert abs(dg - cauchy_transform_w(z, lam, CTX)) < 1e-15


def test_quadratic_differential():
    with CTX.scope():
        lam = mpf("0.9")
        zs = z_star(lam, CTX)
        assert zs == mpc(0, 2 / lam)
        assert abs(Q_lambda(zs, lam, CTX)) < 1e-25
        z = mpc(2, 1)
        s = mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
        h = mpf(10) ** -10
        w = (phi(z + h, lam, CTX) - phi(z - h, lam, CTX)) / (2 * h)
        assert close(w * w / 4, Q_lambda(z, lam, CTX), 1e-15)
    with pytest.raises(PoleAt):
        Q_lambda(1, lam, CTX)
    with pytest.raises(DomainError):
        z_star(0, CTX)


@pytest.mark.parametrize("lam,regime", [(0, Regime.SINGLE_ARC), ("0.5", Regime.SINGLE_ARC),
                                        ("1.2", Regime.SINGLE_ARC), ("1.5", Regime.TWO_ARC),
                                        ("3", Regime.TWO_ARC)])
def test_classify(lam, regime):
    c = classify(lam, CTX)
    assert c.regime is regime
    if c.z_star is not None:
        with CTX.scope():
            assert close(c.im_xi_zstar, xi(c.z_star, c.lam, CTX).imag, 1e-20)


def test_classify_critical_and_negative():
    assert classify(solve_lambda0(CTX), CTX).regime is Regime.CRITICAL
    with pytest.raises(DomainError):
        classify(-1, CTX)


def test_segment_curve():
    c = trace_scurve(0, step=0.01)
    assert c.is_segment and c.points[0] == -1 and c.points[-1] == 1
    assert all(p.imag == 0 for p in c.points)
    with CTX.scope():
        assert abs(c.point_at_mass(mpf(1) / 2)) < 1e-25
    assert c.contains(0.2j) is False


def test_curve_rejects_two_arc_regime():
    with pytest.raises(DomainError):
        trace_scurve(1.5)
    with pytest.raises(DomainError):
        trace_scurve(-0.1)


@pytest.mark.parametrize("lam", ["0.5", "1"])
def test_curve_geometry(curves, lam):
    c = curves(lam)
    assert c.points[0] == -1 and c.points[-1] == 1
    assert all(p.imag >= 0 for p in c.points)
    assert c.mass[0] == 0 and abs(c.mass[-1] - 1) < 1e-20
    assert all(b > a for a, b in zip(c.mass, c.mass[1:]))
    assert variational_defect(c) < 1e-19
    # symmetric under z -> -conj(z)
    with c.ctx.scope():
        for p in c.points[:: max(1, len(c) // 20)]:
            assert c.exact_distance(-mpmath.conj(p)) < 1e-5
    # launch angle at z = 1
    d = complex(c.points[-2] - c.points[-1])
    assert abs(math.atan2(d.imag, d.real) - 2 * math.atan(2 / float(lam))) < 0.05


def test_curve_traced_from_either_end(curves):
    a = curves("0.5")
    b = trace_scurve("0.5", step=1e-2, start=-1)
    with a.ctx.scope():
        for p in b.points[:: 10]:
            assert a.exact_distance(p) < 1e-5


def test_mass_symmetry_and_inversion(curves):
    c = curves("0.5")
    with c.ctx.scope():
        mid = c.point_at_mass(mpf(1) / 2)
        assert abs(mid.real) < 1e-20
        for m in (mpf("0.1"), mpf("0.37"), mpf("0.9")):
            z = c.point_at_mass(m)
            assert abs(phi_plus(z, c.lam).real) < 1e-20
            assert abs(1 + 1j * phi_plus(z, c.lam) / (2 * mpmath.pi) - m) < 1e-20
            assert abs(c.mass_at(z) - m) < 1e-5


def test_contains(curves):
    c = curves("0.5")
    top = c.point_at_mass(mpf(1) / 2)
    assert c.contains(mpc(0, top.imag / 2))
    assert not c.contains(mpc(0, top.imag * 2))
    assert not c.contains(mpc(0, -0.1))
    assert not c.contains(mpc(3, 0.1))
    with pytest.raises(OnBoundary):
        c.contains(0.3)
    with pytest.raises(OnBoundary):
        c.contains(c.point_at_mass(mpf("0.3")))


def test_s_property_residual_shrinks(curves):
    c = curves("0.5")
    r = s_property_residuals(c, 2, [mpf("0.004"), mpf("0.002")])
    for big, small in zip(*r):
        assert small < big / 3


def test_launch_angles():
    for lam in ("0.8", "1.5"):
        angles = launch_angles(lam, CTX)
        assert len(angles) == 4
        got = sorted(float(a) for a in angles)
        want = [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4]
        assert max(abs(a - b) for a, b in zip(got, want)) < 1e-20


@pytest.mark.parametrize("lam,x", [("0.8", 1.1670), ("1.5", 0.9794)])
def test_trajectory_from_zstar_crosses_axis(lam, x):
    zs = z_star(lam, CTX)
    tr = trace_trajectory(zs, lam, -math.pi / 4, step=1e-2, max_crossings=1)
    assert tr.origin == "z*" and tr.termination == "crossing limit"
    assert abs(float(tr.crossings[0]) - x) < 5e-3


def test_trajectory_level_is_preserved():
    lam = mpf("0.5")
    tr = trace_trajectory(mpc(2, 1), lam, 0.0, step=5e-2, max_steps=2000)
    assert tr.termination in {"left bounding box", "reached pole", "closed loop"}
    with CTX.scope():
        lvl = phi(mpc(2, 1), lam, CTX).real
        for p in tr.points:
            if p.imag > 0.01:
                assert abs(phi(p, lam, CTX).real - lvl) < 1e-15


def test_trajectory_rejects_cut():
    with pytest.raises(OnCut):
        trace_trajectory(mpc("0.3"), "0.5", 0.0)


def test_density_boundary_value_on_curve(curves):
    from oscgauss.precision import BranchMode

    c = curves("0.5")
    with c.ctx.scope():
        for m in (mpf("0.3"), mpf("0.7")):
            p = c.point_at_mass(m)
            j = min(range(len(c)), key=lambda k: abs(c.points[k] - p))
            left = p + mpf(10) ** -15 * 1j * c.tangents[j]
            right = p - mpf(10) ** -15 * 1j * c.tangents[j]
            want = psi_plus(p, c.lam)
            got = equilibrium_density(left, c.lam, c.ctx, BranchMode.SCURVE, c)
            assert abs(got - want) < 1e-12
            got = equilibrium_density(right, c.lam, c.ctx, BranchMode.SCURVE, c)
            assert abs(got + want) < 1e-12
