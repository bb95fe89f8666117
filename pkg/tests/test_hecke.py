import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dclab import hecke as hk
from dclab.crossed import LaurentPoly, apply_laurent, commutator, compose, equal_probabilistic
from dclab.roots import build_root_system
from dclab.weyl import finite, translation

TAU, Q = F(2, 3), F(5, 7)


def gl(n, tau=TAU, q=Q):
    return hk.HeckeContext(build_root_system("GLn", n, 1), tau=tau, q=q)


def test_zero_parameter_rejected():
    with pytest.raises(hk.HeckeError):
        hk.HeckeContext(build_root_system("A", 1), tau=0)


def test_c_function_trivial_at_tau_one():
    ctx = gl(3, tau=1)
    for a in ctx.rs.positive:
        assert ctx.F.is_zero(hk.c_function(ctx, a) - ctx.F.one)


def test_basic_rep_at_tau_one_is_reflection():
    ctx = gl(3, tau=1)
    for i in range(len(ctx.A.gens)):
        assert equal_probabilistic(hk.basic_rep(ctx, i), ctx.element(ctx.A.gens[i]))


def test_t_on_constant():
    ctx = gl(3)
    one = LaurentPoly.monomial((0, 0, 0))
    for i in range(1, 3):
        assert apply_laurent(hk.basic_rep(ctx, i), one) == one.scale(TAU)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3), st.integers(0, 2))
def test_quadratic_on_monomials(mu, i):
    ctx = gl(3)
    T = hk.basic_rep(ctx, i)
    f = LaurentPoly.monomial(tuple(mu))
    Tf = apply_laurent(T, f)
    lhs = apply_laurent(T, Tf) - Tf.scale(TAU - 1 / TAU) - f
    assert lhs.is_zero()


def test_omega_conjugation_gl3():
    ctx = gl(3)
    om = ctx.A.omega_gln()
    O, Oi = ctx.element(om), ctx.element(om.inverse())
    n = len(ctx.A.gens)
    for i in range(n):
        j = (i + 1) % n
        assert equal_probabilistic(compose(compose(O, hk.basic_rep(ctx, i)), Oi), hk.basic_rep(ctx, j))


def test_y_at_tau_one_is_translation():
    ctx = gl(3, tau=1)
    for lam in [(1, 0, 0), (1, 1, 0), (0, 0, 1)]:
        assert equal_probabilistic(hk.cherednik_Y(ctx, lam), ctx.element(translation(lam, 3)))


def test_gl3_yit_equals_yi():
    ctx = gl(3)
    for i in (1, 2, 3):
        assert equal_probabilistic(hk.gl_Y_yit(ctx, i), hk.gl_Y_yi(ctx, i))


def test_b2_y_commute():
    ctx = hk.HeckeContext(build_root_system("B", 2), tau=TAU, q=F(25, 49))
    b1, b2 = ctx.rs.coweights
    assert equal_probabilistic(commutator(hk.cherednik_Y(ctx, b1), hk.cherednik_Y(ctx, b2)), None)


def test_ruijsenaars_shape():
    ctx = gl(3)
    L = hk.ruijsenaars(ctx, 1)
    assert {lam for lam, _ in L.terms} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert L.is_group_free()
    for r in (1, 2, 3):
        assert equal_probabilistic(hk.mr_hamiltonian(ctx, {"e": r}), hk.ruijsenaars(ctx, r))


def test_b2_orbit_hamiltonians_commute():
    ctx = hk.HeckeContext(build_root_system("B", 2), tau=TAU, q=F(25, 49))
    b1, b2 = ctx.rs.coweights
    L1, L2 = hk.mr_hamiltonian(ctx, {"orbit": b1}), hk.mr_hamiltonian(ctx, {"orbit": b2})
    assert equal_probabilistic(commutator(L1, L2), None)


def test_koornwinder_pair():
    ctx = hk.HeckeContext(build_root_system("CCn", 2), tau=TAU, q=F(25, 49))
    L1, L2 = hk.mr_hamiltonian(ctx, {"e": 1}), hk.mr_hamiltonian(ctx, {"e": 2})
    assert equal_probabilistic(commutator(L1, L2), None)
    for w in ctx.W.gens:
        g = ctx.element(finite(w))
        assert equal_probabilistic(compose(compose(g, L1), g), L1)


def test_non_invariant_f_rejected():
    ctx = gl(2)
    with pytest.raises(hk.HeckeError):
        hk.mr_hamiltonian(ctx, {(1, 0): 1})


def test_relation_suite_mutation_fails():
    rep = hk.relation_suite(gl(3), mutate=True, y_pairs=False)
    assert not rep["ok"]
    assert all(c["witness"] for c in rep["checks"] if not c["ok"])


def test_qkz_character_cocycle_trivial():
    ctx = hk.HeckeContext(build_root_system("A", 1), tau=TAU, q=F(25, 49))
    rep = hk.qkz_cocycle(ctx, hk.character_module(ctx, 1), pairs=4, words=6)
    assert rep["ok"] and rep["residual"] == 0


@pytest.mark.parametrize("fam,n,q", [("A", 1, F(25, 49)), ("A", 2, F(125, 343)), ("B", 2, F(25, 49))])
def test_qkz_word_independence(fam, n, q):
    ctx = hk.HeckeContext(build_root_system(fam, n), tau=TAU, q=q)
    mods = [hk.character_module(ctx, -1)] + ([hk.regular_module_A1(ctx)] if n == 1 else [])
    for mod in mods:
        rep = hk.qkz_cocycle(ctx, mod, pairs=4, words=20, seed=random.Random(n).randrange(100))
        assert rep["ok"] and rep["residual"] < 1e-12
