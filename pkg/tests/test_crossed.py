import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dclab import rational as ra
from dclab.crossed import (ContractViolation, CrossedOp, FlavorError, apply, classical_limit, commutator, compose,
                           conjugate, equal_probabilistic, momentum, poisson_bracket, res)
from dclab.ratfunc import LinearField
from dclab.roots import build_root_system
from dclab.weyl import identity, weyl_group

F2 = LinearField(2)
rats = st.fractions(min_value=-5, max_value=5, max_denominator=9)


def _d(i, dom=F2, m=2, flavor="differential"):
    return CrossedOp.derivative(flavor, dom, m, tuple(int(j == i) for j in range(m)))


def _x(i, dom=F2, m=2, flavor="differential"):
    return CrossedOp.scalar(flavor, dom, m, dom.var(i))


def test_heisenberg():
    lhs = compose(_d(0), _x(0))
    rhs = compose(_x(0), _d(0)) + CrossedOp.scalar("differential", F2, 2, 1)
    assert equal_probabilistic(lhs, rhs)


def test_unequal_has_witness():
    v = equal_probabilistic(compose(_x(0), _d(0)), compose(_d(0), _x(0)))
    assert not v and v.witness is not None


def test_self_equal():
    a = compose(_d(1), _x(0)) + _x(1)
    assert equal_probabilistic(a, a)


def test_translation_moves_functions():
    dom = LinearField(2, with_c=True)
    t = CrossedOp.translation("difference", dom, 2, (1, 0))
    f = dom.var(0) * dom.var(0) + dom.var(1)
    lhs = compose(t, CrossedOp.scalar("difference", dom, 2, f))
    shifted = dom.linear_form((1, 0), 1) ** 2 + dom.var(1)
    rhs = compose(CrossedOp.scalar("difference", dom, 2, shifted), t)
    assert equal_probabilistic(lhs, rhs)


def test_dunkl_equivariance():
    rs = build_root_system("B", 2, {"long": F(1, 3), "short": F(2, 5)})
    P = ra.DunklParams(rs, F(3, 4))
    W = weyl_group(rs)
    xi = (F(2), F(-1))
    y = ra.dunkl(P, xi)
    for a in rs.positive:
        s = W.reflection(a)
        assert equal_probabilistic(conjugate(s, y), ra.dunkl(P, tuple(W.act(s, xi))))


def test_res_basics():
    rs = build_root_system("A", 1)
    W = weyl_group(rs)
    m = rs.dim
    dom = LinearField(m)
    f = dom.var(0) + 3
    assert equal_probabilistic(res(CrossedOp.scalar("differential", dom, m, f)),
                               CrossedOp.scalar("differential", dom, m, f))
    total = CrossedOp.zero("differential", dom, m)
    for w in W.elements():
        total = total + CrossedOp.group("differential", dom, m, w)
    assert equal_probabilistic(res(total), CrossedOp.scalar("differential", dom, m, W.order()))
    s = CrossedOp.group("differential", dom, m, W.gens[0])
    assert equal_probabilistic(res(s, sign="det"), CrossedOp.scalar("differential", dom, m, -1))


def test_apply_identity():
    f = F2.var(0) * F2.var(1) + 1
    assert apply(CrossedOp.scalar("differential", F2, 2, 1), f) == f


def test_flavor_mismatch():
    with pytest.raises(FlavorError):
        _d(0) + CrossedOp.scalar("difference", F2, 2, 1)


def test_classical_limit_of_derivative():
    dom = LinearField(2, with_h=True)
    a = CrossedOp.derivative("differential", dom, 2, (1, 0), coef=dom.h())
    assert equal_probabilistic(classical_limit(a), momentum(dom, 2, 0))


def test_classical_limit_needs_symbolic_hbar():
    with pytest.raises(ContractViolation):
        classical_limit(_d(0))


def _classical_dunkl_check(P, Pc, xi):
    return equal_probabilistic(classical_limit(ra.dunkl(P, xi)), ra.dunkl(Pc, xi))


def test_classical_limit_of_dunkl():
    rs = build_root_system("A", 2, F(2, 7))
    P = ra.DunklParams(rs, "h")
    Pc = ra.DunklParams(rs, 0, "classical", field=P.field)
    assert _classical_dunkl_check(P, Pc, (1, 0, -1))


@settings(max_examples=15, deadline=None)
@given(rats, rats, rats, rats)
def test_classical_limit_multiplicative(a, b, c, d):
    dom = LinearField(2, with_h=True)
    h = dom.h()
    A = CrossedOp.derivative("differential", dom, 2, (a, b), coef=h) + CrossedOp.scalar(
        "differential", dom, 2, dom.var(0) * c)
    B = CrossedOp.derivative("differential", dom, 2, (d, 1), coef=h) + CrossedOp.scalar(
        "differential", dom, 2, dom.var(1) + a)
    assert equal_probabilistic(classical_limit(compose(A, B)),
                               compose(classical_limit(A), classical_limit(B)))


def test_poisson_basics():
    dom = LinearField(2)
    p1 = momentum(dom, 2, 0)
    x1 = CrossedOp.scalar("classical-differential", dom, 2, dom.var(0))
    one = CrossedOp.scalar("classical-differential", dom, 2, 1)
    assert equal_probabilistic(poisson_bracket(p1, x1), one)
    H = compose(p1, p1) + CrossedOp.scalar("classical-differential", dom, 2, 1 / (dom.var(0) - dom.var(1)) ** 2)
    assert equal_probabilistic(poisson_bracket(H, H), None)


def test_poisson_exponential():
    dom = LinearField(2)
    lam, mu = (1, 2), (F(3), F(-1))
    e = CrossedOp.translation("classical-difference", dom, 2, lam)
    lin = CrossedOp.scalar("classical-difference", dom, 2, dom.linear_form(mu))
    pairing = sum(a * b for a, b in zip(lam, mu))
    assert equal_probabilistic(poisson_bracket(e, lin), e.scale(pairing))


@settings(max_examples=20, deadline=None)
@given(rats, rats, rats)
def test_commutator_antisymmetric(a, b, c):
    A = _d(0) + _x(1).scale(a)
    B = compose(_x(0), _d(1)).scale(b) + CrossedOp.scalar("differential", F2, 2, c)
    assert equal_probabilistic(commutator(A, B) + commutator(B, A), None)


def test_group_composition():
    rs = build_root_system("A", 2)
    W = weyl_group(rs)
    m = rs.dim
    dom = LinearField(m)
    rng = random.Random(3)
    els = W.elements()
    for _ in range(10):
        u, v = rng.choice(els), rng.choice(els)
        g = compose(CrossedOp.group("differential", dom, m, u), CrossedOp.group("differential", dom, m, v))
        assert set(g.terms) == {(tuple(0 for _ in range(m)), W.mul(u, v))}
    assert W.mul(els[0], W.inv(els[0])) == identity(m)
