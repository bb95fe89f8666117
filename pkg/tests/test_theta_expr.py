from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dclab import expr as E
from dclab import theta as th

P = th.EllipticParams(1j)
coords = st.floats(-0.45, 0.45, allow_nan=False).filter(lambda v: abs(v) > 0.02)


def _z(a, b):
    return mpmath.mpc(a, b * 0.3)


def test_theta_odd_at_zero():
    assert th.eval_theta(1, 0, P) == 0


@settings(max_examples=100, deadline=None)
@given(coords, coords)
def test_theta_oddness(a, b):
    z = _z(a, b)
    assert abs(th.eval_theta(1, z, P) + th.eval_theta(1, -z, P)) < 1e-30


@settings(max_examples=30, deadline=None)
@given(coords, coords)
def test_theta_quasi_periodic(a, b):
    with mpmath.workprec(P.bits):
        z = _z(a, b)
        assert abs(th.eval_theta(1, z + 1, P) + th.eval_theta(1, z, P)) < 1e-30


@settings(max_examples=30, deadline=None)
@given(coords, coords)
def test_wp_even(a, b):
    z = _z(a, b)
    assert abs(th.eval_sigma("wp", 0, z, P) - th.eval_sigma("wp", 0, -z, P)) < 1e-25


@settings(max_examples=30, deadline=None)
@given(coords, coords, coords)
def test_sigma_product_identity(a, b, c):
    z, mu = _z(a, b), mpmath.mpc(c, 0.11)
    lhs = th.eval_sigma("sigma", mu, z, P) * th.eval_sigma("sigma", mu, -z, P)
    rhs = th.eval_sigma("wp", 0, mu, P) - th.eval_sigma("wp", 0, z, P)
    assert abs(lhs - rhs) < 1e-25 * (1 + abs(rhs))


def test_sigma_derivative_limit():
    z = mpmath.mpc("0.31", "0.07")
    target = -th.eval_sigma("wp", 0, z, P) - 2 * th.eval_sigma("zeta_half", 0, 0, P)
    vals = [th.eval_sigma("sigma", mpmath.mpf(m), z, P, 1) for m in ("1e-3", "5e-4", "2.5e-4")]
    # Richardson step on the O(mu) error
    r1, r2 = 2 * vals[1] - vals[0], 2 * vals[2] - vals[1]
    assert abs(r2 - target) < 1e-6
    assert abs(r2 - target) < abs(vals[2] - target)
    assert abs(r1 - target) < 1e-5


def test_sigma_derivative_vs_finite_difference():
    with mpmath.workprec(P.bits):
        mu, z, h = mpmath.mpf("0.13"), mpmath.mpc("0.21", "0.05"), mpmath.mpf("1e-12")
        fd = (th.eval_sigma("sigma", mu, z + h, P) - th.eval_sigma("sigma", mu, z - h, P)) / (2 * h)
        d = th.eval_sigma("sigma", mu, z, P, 1)
        assert abs(fd - d) / abs(d) < 1e-6


def test_bad_modulus():
    with pytest.raises(th.EllipticError):
        th.EllipticParams(-1j)


def test_precision_env(monkeypatch):
    monkeypatch.setenv("DCLAB_PRECISION_BITS", "200")
    assert th.default_bits() == 200
    assert th.EllipticParams(1j).bits == 200


def test_expr_constant():
    assert E.expr_diff_eval(E.const(5), "exact", (F(1), F(2))) == 5


def test_expr_linear_derivative():
    a = (F(2), F(-3))
    e = E.lin(a)
    for i in range(2):
        assert E.expr_diff_eval(E.diff(e, i), "exact", (F(1, 3), F(1, 7))) == a[i]


def test_expr_sigma_derivative_fd():
    x = E.lin((1, -1))
    e = E.sigma(F(1, 5), x)
    d = E.diff(e, 0)
    with mpmath.workprec(P.bits):
        x0, h = mpmath.mpf("0.3"), mpmath.mpf("1e-12")
        v = E.expr_diff_eval(d, "mp", [x0, 0.1], params=P)
        fp = E.expr_diff_eval(e, "mp", [x0 + h, 0.1], params=P)
        fm = E.expr_diff_eval(e, "mp", [x0 - h, 0.1], params=P)
        assert abs((fp - fm) / (2 * h) - v) / abs(v) < 1e-6


def test_exact_mode_rejects_elliptic():
    with pytest.raises(E.ExprError):
        E.expr_diff_eval(E.wp(E.lin((1,))), "exact", (F(1, 3),))


def test_render_is_canonical():
    a = E.add(E.lin((1, 0)), E.const(F(1, 2)))
    b = E.add(E.const(F(1, 2)), E.lin((1, 0)))
    assert E.render(a) == E.render(b)
