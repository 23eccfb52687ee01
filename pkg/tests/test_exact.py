"""Exact surd arithmetic and CM-point reduction."""

from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cmlv.cmpoint import CMPoint, cm_point_value, nome, reduce_fricke, reduce_sl2z
from cmlv.precision import PrecisionContext
from cmlv.surd import QuadraticSurd, Surd, squarefree_decompose

from conftest import assert_close

ctx = PrecisionContext()


def test_squarefree_decompose():
    assert squarefree_decompose(12) == (2, 3)
    assert squarefree_decompose(1) == (1, 1)
    assert squarefree_decompose(-18) == (3, -2)
    assert squarefree_decompose(49) == (7, 1)


def test_surd_multiplication_rules():
    r5, r3i = Surd.sqrt(5), Surd.sqrt(-3)
    assert r5 * r5 == Surd.rational(5)
    assert r3i * r3i == Surd.rational(-3)
    assert r5 * r3i == Surd.sqrt(-15)
    # (sqrt5 - sqrt(-3))^2 = 2 - 2 sqrt(-15)
    v = (r5 - r3i) ** 2
    assert v == Surd.rational(2) - Surd.sqrt(-15, 2)


def test_surd_conjugate_and_norm():
    z = Surd.rational(F(1, 2)) + Surd.sqrt(-7, F(1, 2))
    n = z * z.conjugate()
    assert n.as_rational() == F(1 + 7, 4)


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40),
       st.integers(-40, 40))
@settings(max_examples=60, deadline=None)
def test_surd_ring_properties(a, b, c, d):
    x = Surd.rational(a) + Surd.sqrt(-5, b)
    y = Surd.rational(c) + Surd.sqrt(3, d)
    assert x * y == y * x
    assert (x + y).conjugate() == x.conjugate() + y.conjugate()
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


def test_quadratic_surd_sqrt_of_rational():
    z = QuadraticSurd.sqrt_of_rational(F(63, 64))
    assert z.radicand == 7 and z.surd_coefficient == F(3, 8)
    with mpmath.mp.workprec(120):
        assert_close(z.embed(ctx), mpmath.sqrt(mpmath.mpf(63) / 64), 1e-30)


def test_cm_point_values():
    i = CMPoint.make(0, 1, 1)
    with ctx.workprec():
        assert_close(cm_point_value(i, ctx), mpmath.mpc(0, 1), 1e-70)
        tau7 = CMPoint.make(F(1, 2), F(1, 2), 7)
        assert_close(cm_point_value(tau7, ctx),
                     mpmath.mpc(0.5, mpmath.sqrt(7) / 2), 1e-70)
        assert str(mpmath.nstr(cm_point_value(tau7, ctx).imag, 11)) == "1.3228756555"
        s3 = CMPoint.make(0, 1, 3)
        assert_close(cm_point_value(s3, ctx), mpmath.mpc(0, mpmath.sqrt(3)), 1e-70)


def test_nome_examples():
    with ctx.workprec():
        q_i = nome(CMPoint.make(0, 1, 1), ctx)
        assert_close(q_i, mpmath.exp(-2 * mpmath.pi), 1e-70)
        q7 = nome(CMPoint.make(F(1, 2), F(1, 2), 7), ctx)
        assert abs(q7.imag) < mpmath.mpf(10) ** -70
        assert_close(q7, -mpmath.exp(-mpmath.pi * mpmath.sqrt(7)), 1e-70)
        assert_close(nome(CMPoint.make(0, 2, 1), ctx),
                     mpmath.exp(-4 * mpmath.pi), 1e-70)


def test_nome_decreasing_in_im():
    with ctx.workprec():
        mags = [abs(nome(CMPoint.make(F(1, 3), F(k, 4), 3), ctx))
                for k in range(1, 6)]
    assert all(m < 1 for m in mags)
    assert all(mags[k + 1] < mags[k] for k in range(4))


def test_reduce_sl2z_examples():
    out, g = reduce_sl2z(CMPoint.make(0, F(1, 2), 1))
    assert out == CMPoint.make(0, 2, 1) and g == ((0, -1), (1, 0))
    out, g = reduce_sl2z(CMPoint.make(F(1, 2), 2, 1))
    assert out == CMPoint.make(F(-1, 2), 2, 1)
    # boundary convention Re in [-1/2, 1/2): the corner point moves to -1/2
    out, g = reduce_sl2z(CMPoint.make(F(1, 2), F(1, 2), 3))
    assert out == CMPoint.make(F(-1, 2), F(1, 2), 3)
    # |tau| = 1 tie resolved toward Re <= 0
    out, _ = reduce_sl2z(CMPoint.make(F(3, 5), F(4, 5), 1))
    assert out.norm() == 1 and out.a <= 0


def _in_domain(pt: CMPoint) -> bool:
    return (F(-1, 2) <= pt.a < F(1, 2) and pt.norm() > 1) or \
        (pt.norm() == 1 and F(-1, 2) <= pt.a <= 0)


@given(st.fractions(min_value=-4, max_value=4),
       st.fractions(min_value=F(1, 8), max_value=3),
       st.sampled_from([1, 2, 3, 5, 7, 11, 15]))
@settings(max_examples=80, deadline=None)
def test_reduce_sl2z_roundtrip(a, b, D):
    tau = CMPoint(a, b, D)
    out, g = reduce_sl2z(tau)
    assert _in_domain(out)
    (p, q), (r, s) = g
    assert p * s - q * r == 1
    assert tau.moebius(g) == out
    # numeric Moebius image agrees with the exact one
    with ctx.workprec():
        tv = cm_point_value(tau, ctx)
        image = (p * tv + q) / (r * tv + s)
        assert_close(image, cm_point_value(out, ctx), 1e-60)


def test_reduce_fricke_invariance():
    from cmlv.modforms import hauptmodul
    tau = CMPoint.make(F(1, 3), F(1, 5), 2)
    out2, g2 = reduce_fricke(tau, 2)
    assert 2 * out2.norm() >= 1 and F(-1, 2) <= out2.a < F(1, 2)
    out3, _ = reduce_fricke(tau, 3)
    assert 3 * out3.norm() >= 1
    with ctx.workprec():
        assert_close(hauptmodul(4, tau, ctx), hauptmodul(4, out2, ctx), 1e-30)
        assert_close(hauptmodul(3, tau, ctx), hauptmodul(3, out3, ctx), 1e-30)


def test_moebius_exactness():
    tau = CMPoint.make(F(3, 7), F(2, 9), 5)
    m = ((3, -2), (7, -4))   # det = 3*(-4) - (-2)*7 = 2 > 0
    img = tau.moebius(m)
    assert img.D == 5
    with ctx.workprec():
        tv = cm_point_value(tau, ctx)
        assert_close((3 * tv - 2) / (7 * tv - 4), cm_point_value(img, ctx), 1e-60)
