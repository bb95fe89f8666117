from fractions import Fraction as F

import pytest

from dclab import trig as tr
from dclab.crossed import CrossedOp, commutator, compose, equal_probabilistic
from dclab.roots import build_root_system
from dclab.weyl import weyl_group


def test_zero_k_cherednik_is_derivative():
    ctx = tr.TrigContext(build_root_system("A", 2, 0))
    xi = (1, 0, -1)
    assert equal_probabilistic(tr.trig_dunkl(ctx, "cherednik", xi=xi),
                               CrossedOp.derivative("differential", ctx.F, 3, xi))


def test_a2_cherednik_commute():
    ctx = tr.TrigContext(build_root_system("A", 2, F(2, 3)))
    T = [tr.trig_dunkl(ctx, "cherednik", i=i) for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            assert equal_probabilistic(commutator(T[i], T[j]), None)


def test_polychronakos_gl3():
    k = F(2, 3)
    rs = build_root_system("GLn", 3, k)
    ctx = tr.TrigContext(rs)
    W = weyl_group(rs)
    pi = [tr.trig_dunkl(ctx, "polychronakos", i=i) for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            a = tuple(int(t == i) - int(t == j) for t in range(3))
            s = CrossedOp.group("differential", ctx.F, 3, W.reflection(a))
            assert equal_probabilistic(commutator(pi[i], pi[j]) + compose(pi[i] - pi[j], s).scale(k), None)


def test_cmsrad():
    ctx = tr.TrigContext(build_root_system("A", 2, F(2, 3)))
    assert equal_probabilistic(tr.cms_hamiltonian(ctx), tr.cmsrad_explicit(ctx))


def test_heckman_and_polychronakos_families():
    ctx = tr.TrigContext(build_root_system("GLn", 3, F(2, 3)))
    H2 = tr.cms_hamiltonian(ctx, "heckman", ((1, 0, 0), 2))
    H3 = tr.cms_hamiltonian(ctx, "heckman", ((1, 0, 0), 3))
    assert equal_probabilistic(commutator(H2, H3), None)
    I2, I3 = (tr.cms_hamiltonian(ctx, "polychronakos", r) for r in (2, 3))
    assert equal_probabilistic(commutator(I2, I3), None)


def test_gauge_zero_k():
    ctx = tr.TrigContext(build_root_system("A", 2, 0))
    L = tr.cms_hamiltonian(ctx)
    out, c = tr.gauge_to_potential(L, ctx)
    assert equal_probabilistic(out, L) and c == 0


@pytest.mark.parametrize("fam,n", [("A", 1), ("GLn", 2), ("B", 2)])
def test_gauge_reaches_potential_form(fam, n):
    ctx = tr.TrigContext(build_root_system(fam, n, F(2, 5)))
    out, c = tr.gauge_to_potential(tr.cms_hamiltonian(ctx), ctx)
    assert equal_probabilistic(out, tr.cms_explicit(ctx) + CrossedOp.scalar("differential", ctx.F, ctx.m, c))


def test_degenerate_zero_k():
    rep, _ = tr.degenerate_rep(build_root_system("A", 2, 0), check=False)
    for i, r in enumerate(rep.gens):
        assert equal_probabilistic(r, rep._elt(rep.A.gens[i]))


def test_degenerate_a1_involution():
    rep, report = tr.degenerate_rep(build_root_system("A", 1, F(3, 5)))
    assert report["ok"]
    one = CrossedOp.scalar("difference", rep.F, rep.m, 1)
    assert equal_probabilistic(compose(rep.gens[1], rep.gens[1]), one)


@pytest.mark.parametrize("fam", ["A", "B"])
def test_degenerate_relations(fam):
    _, report = tr.degenerate_rep(build_root_system(fam, 2, F(3, 5)))
    assert report["ok"]
    assert any(c["relation"].startswith("[pi") for c in report["checks"])


def test_degenerate_rejects_gl():
    with pytest.raises(ValueError):
        tr.degenerate_rep(build_root_system("GLn", 2))
