from fractions import Fraction as F

import mpmath
import pytest

from dclab import elliptic as el
from dclab import expr as E
from dclab import theta as th
from dclab.crossed import CrossedOp, commutator, max_residual
from dclab.rational import generator_set
from dclab.roots import build_root_system as R

SPEC3 = (F(1, 7), F(2, 9), F(-1, 5))
CC = dict(mu=F(1, 5), nu=F(2, 7), nubar=F(1, 9), g=[F(1, 3), F(1, 4), F(1, 6), F(2, 5)],
          gbar=[F(1, 8), F(2, 3), F(1, 7), F(1, 2)])


@pytest.fixture(scope="module")
def a2():
    return el.EllipticContext(R("A", 2, F(1, 3)), spectral=SPEC3)


@pytest.fixture(scope="module")
def gl3():
    return el.EllipticContext(R("GLn", 3, F(1, 3)), spectral=SPEC3)


def test_zero_k_is_derivative():
    ctx = el.EllipticContext(R("A", 2, 0), spectral=SPEC3)
    xi = (1, 0, -1)
    d = CrossedOp.derivative("differential", ctx.dom, 3, xi, coef=E.const(1))
    assert max_residual(el.elliptic_dunkl(ctx, xi), d, points=3) == 0


def test_a2_dunkl_commute(a2):
    ys = el.basis_elliptic_dunkl(a2)
    for i in range(3):
        for j in range(i + 1, 3):
            assert max_residual(commutator(ys[i], ys[j]), points=50) < 1e-10


def test_equivariance(a2):
    for w in a2.W.elements():
        assert el.equivariance_residual(a2, (1, 0, 0), w, points=3) < 1e-10


def test_spectral_pole_rejected():
    ctx = el.EllipticContext(R("A", 1, F(1, 3)), spectral=(F(1, 2), F(-1, 2)))
    with pytest.raises(el.SpectralPole):
        el.elliptic_dunkl(ctx, (1, 0))


def test_a1_cm_potential():
    k = F(1, 3)
    ctx = el.EllipticContext(R("A", 1, k))
    L, C = el.elliptic_cm_hamiltonian(ctx)
    a = ctx.rs.positive[0]
    expect = el.laplacian(ctx, E.const(1)) + CrossedOp.scalar(
        "differential", ctx.dom, 2, E.add(E.mul(E.const(-k * (k - 1) * 2), E.wp(E.lin(a))), E.const(C)))
    assert max_residual(L, expect, points=5) < 1e-25


def test_zero_k_cm_is_laplacian():
    ctx = el.EllipticContext(R("A", 2, 0))
    L, C = el.elliptic_cm_hamiltonian(ctx)
    assert C == 0
    assert max_residual(L, el.laplacian(ctx, E.const(1)), points=3) == 0


def test_a2_general_limit_commute():
    ctx = el.EllipticContext(R("A", 2, F(1, 3)))
    gens = generator_set(ctx.rs)
    L2 = el.elliptic_cm_hamiltonian(ctx, gens[0][1], "general-limit")
    L3 = el.elliptic_cm_hamiltonian(ctx, gens[1][1], "general-limit")
    worst, err = L2.combine(L3, commutator).max_abs(points=2, check=False)
    assert worst < 1e-8, (worst, err)


def test_inozemtsev_commute_and_reduction():
    rs = R("B", 2, 1)
    c = el.EllipticContext(rs, spectral=(F(1, 7), F(2, 9)), couplings=dict(k=F(1, 3), g=[F(1, 5), F(1, 7), F(2, 9), F(1, 4)]))
    y = el.inozemtsev_dunkl(c)
    assert max_residual(commutator(y[0], y[1]), points=30) < 1e-9
    c0 = el.EllipticContext(rs, k={"long": F(1, 3), "short": F(1, 5)}, spectral=(F(1, 7), F(2, 9)),
                            couplings=dict(k=F(1, 3), g=[F(1, 5), 0, 0, 0]))
    for a, b in zip(el.inozemtsev_dunkl(c0), el.basis_elliptic_dunkl(c0)):
        assert max_residual(a, b, points=3) < 1e-25


def test_yang_baxter_and_unitarity(gl3):
    assert el.yang_baxter_residual(gl3, 0, 1, 2, points=3) < 1e-25
    for a in gl3.rs.positive:
        assert el.unitarity_residual(gl3, a, points=3) < 1e-25


def test_cc_odd_root_uses_bar_couplings():
    base = el.EllipticContext(R("CCn", 2), spectral=(F(1, 7), F(2, 9)), couplings=CC)
    other = el.EllipticContext(R("CCn", 2), spectral=(F(1, 7), F(2, 9)), couplings=dict(CC, nubar=F(3, 5)))
    a = (2, 0)
    assert max_residual(el.ell_R(base, a, 1), el.ell_R(other, a, 1), points=2) > 1e-3
    assert max_residual(el.ell_R(base, a, 0), el.ell_R(other, a, 0), points=2) < 1e-25


def test_gl3_y1_product(gl3):
    assert max_residual(el.ell_cherednik_Y(gl3, (1, 0, 0)), el.gl_Y1_explicit(gl3), points=3) < 1e-25


def test_b2_words_and_commutativity():
    ctx = el.EllipticContext(R("B", 2, F(1, 5)), spectral=(F(1, 7), F(2, 9)))
    assert max_residual(el.R_word(ctx, [1, 2, 1, 2]), el.R_word(ctx, [2, 1, 2, 1]), points=2) < 1e-10
    b1, b2 = ctx.rs.coweights
    Y1, Y2 = el.ell_cherednik_Y(ctx, b1), el.ell_cherednik_Y(ctx, b2)
    assert max_residual(commutator(Y1, Y2), points=2) < 1e-9


def test_g2_alternate_word():
    ctx = el.EllipticContext(R("G2", 2, F(1, 5)), spectral=(F(1, 7), F(2, 9)))
    b = ctx.rs.coweights[0]
    assert max_residual(el.ell_cherednik_Y(ctx, b), el.ell_cherednik_Y(ctx, b, alt=True), points=2) < 1e-10


def test_emr1_and_eru(gl3):
    for b, r in (((1, 0, 0), 1), ((1, 1, 0), 2)):
        L, _ = el.ell_hamiltonian(gl3, b)
        assert el.constant_offset(L, el.gl_ruijsenaars(gl3, r)) is not None


def test_van_diejen():
    cc = el.EllipticContext(R("CCn", 2), spectral=(F(1, 7), F(2, 9)), couplings=CC)
    L, X = el.ell_hamiltonian(cc, (1, 0), explicit=True)
    assert el.constant_offset(L, X) is not None
    shifts = {lam for lam, _ in X.terms}
    assert {(1, 0), (-1, 0), (0, 1), (0, -1), (0, 0)} <= shifts


def test_trig_degeneration():
    assert el.trig_degeneration() < 1e-10


def test_precision_certify():
    rs = R("A", 2)

    def fn(bits):
        ctx = el.EllipticContext(rs, k=F(1, 5), params=th.EllipticParams(1j, bits=bits))
        return el.unitarity_residual(ctx, rs.positive[0], points=2)

    rep = el.precision_certify(fn)
    assert rep["ok"] and rep["residual_2x"] < rep["residual"] / 1e4


def test_precision_certify_flags_non_identity():
    rep = el.precision_certify(lambda bits: 1e-3)
    assert not rep["ok"]


def test_evaluation_precision():
    ctx = el.EllipticContext(R("A", 1, F(1, 3)), params=th.EllipticParams(1j, bits=256))
    v = E.evaluate(E.wp(E.lin((1, -1))), ctx.dom.env([0.3, 0.1]))
    with mpmath.workprec(256):
        assert abs(v - th.eval_sigma("wp", 0, mpmath.mpf(0.3) - mpmath.mpf(0.1), ctx.params)) < 1e-70
