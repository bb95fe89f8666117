import random
from fractions import Fraction as F

import numpy as np
import pytest

from dclab import elliptic as el
from dclab import expr as E
from dclab import lax
from dclab import rational as ra
from dclab.crossed import CrossedOp as C
from dclab.roots import build_root_system as R
from dclab.weyl import weyl_group


@pytest.fixture(scope="module")
def a2_rational():
    rs = R("A", 2, F(2, 7))
    P = ra.DunklParams(rs)
    return rs, weyl_group(rs), ra.basis_dunkl(P), P


def test_induced_multiplicative(a2_rational):
    rs, W, ys, P = a2_rational
    els = W.elements()
    gens = ys + [C.group("differential", P.field, rs.dim, w) for w in els]
    rng = random.Random(3)
    for _ in range(50):
        a, b = rng.choice(gens), rng.choice(gens)
        assert lax.multiplicativity_residual(a, b, W) == []


def test_function_is_diagonal_and_group_is_permutation(a2_rational):
    rs, W, _, P = a2_rational
    f = C.scalar("differential", P.field, rs.dim, P.field.var(0))
    M = lax.induced_rep(f, W)
    for i, row in enumerate(M):
        for j, x in enumerate(row):
            assert x.is_zero() == (i != j)
    w = W.gens[0]
    G = lax.induced_rep(C.group("differential", P.field, rs.dim, w), W)
    for row in G:
        assert sum(not x.is_zero() for x in row) == 1


def test_coset_restrict_sizes(a2_rational):
    rs, W, ys, P = a2_rational
    s = ys[0] + ys[1] + ys[2]
    assert lax.coset_restrict(s, W, W.elements()).size == 1
    L = lax.coset_restrict(ys[0], W, [W.e])
    assert L.size == W.order()
    rho = lax.induced_rep(ys[0], W, lax.ordered_elements(W))
    assert all(lax.op_equal(a, b) for r1, r2 in zip(L.entries, rho) for a, b in zip(r1, r2))


def test_coset_restrict_rejects_non_invariant(a2_rational):
    rs, W, ys, _ = a2_rational
    with pytest.raises(lax.LaxError):
        lax.coset_restrict(ys[0], W, W.elements())


def test_a2_stabiliser_gives_three_by_three():
    ctx = el.EllipticContext(R("A", 2, F(1, 3)))
    Lq, Lc = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
    assert Lq.size == 3 and Lc.size == 3 and not Lc.quantum


def test_gl2_difference_lax_size_and_diagonal_at_zero_k():
    ctx = el.EllipticContext(R("GLn", 2, F(1, 5)))
    Lq, _ = lax.lax_matrix("elliptic-difference", ctx, (1, 0))
    assert Lq.size == 2
    c0 = el.EllipticContext(R("A", 2, 0))
    _, L0 = lax.lax_matrix("elliptic-differential", c0, c0.rs.weights[0])
    for i, row in enumerate(L0.entries):
        for j, x in enumerate(row):
            if i != j:
                assert x.is_zero()


def test_b2_difference_lax_size():
    ctx = el.EllipticContext(R("B", 2, F(1, 5)))
    Lq, _ = lax.lax_matrix("elliptic-difference", ctx, (1, 0))
    assert Lq.size == 4


def test_wrong_subgroup_rejected():
    ctx = el.EllipticContext(R("A", 2, F(1, 3)))
    with pytest.raises(lax.LaxError):
        lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0], subgroup=[ctx.W.e])


def test_spectral_invariants():
    c0 = el.EllipticContext(R("A", 2, 0))
    _, L0 = lax.lax_matrix("elliptic-differential", c0, c0.rs.weights[0])
    assert lax.spectral_invariants(L0, 3, points=3)["exact_zero"]
    ctx = el.EllipticContext(R("A", 2, F(1, 3)))
    _, Lc = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
    assert lax.spectral_invariants(Lc, 3, points=10)["max_residual"] < 1e-8


def test_quantum_matrix_rejected_by_flows():
    ctx = el.EllipticContext(R("A", 1, F(1, 3)))
    Lq, _ = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
    with pytest.raises(lax.LaxError):
        lax.spectral_invariants(Lq)


@pytest.fixture(scope="module")
def a1_flow():
    ctx = el.EllipticContext(R("A", 1), k=0.5j)
    _, Lc = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
    return ctx, lax.classical_cm_hamiltonian(ctx), Lc


def test_free_flow_has_no_drift():
    ctx = el.EllipticContext(R("A", 1, 0))
    _, Lc = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
    r = lax.integrate_flow(lax.classical_cm_hamiltonian(ctx), Lc, [0.3, -0.1], [0.4, -0.2], 0.27, 1.0, 1e-2)
    assert r["status"] == "ok" and r["drift"] < 1e-12


def test_a1_flow_conserves_spectrum_and_energy(a1_flow):
    _, H, Lc = a1_flow
    r = lax.integrate_flow(H, Lc, [0.3, -0.1], [0.4, -0.2], 0.27, 1.0, 1e-3)
    assert r["status"] == "ok"
    assert r["drift"] < 1e-6 and r["energy_drift"] < 1e-8
    assert len(r["energies"]) == len(r["times"]) == 1001


def test_a1_drift_order(a1_flow):
    _, H, Lc = a1_flow
    assert lax.drift_order(H, Lc, [0.3, -0.1], [0.4, -0.2], 0.27, 1.0, 0.02)["order"] >= 3.5


def test_pole_at_start(a1_flow):
    _, H, Lc = a1_flow
    r = lax.integrate_flow(H, Lc, [0.3, 0.3], [0.4, -0.2], 0.27, 1.0, 1e-2)
    assert r["status"] == "pole" and r["pole"]["time"] == 0.0 and r["energies"] == []


def test_isospectral_rate_and_control():
    ctx = el.EllipticContext(R("GLn", 2, F(1, 5)))
    _, Lc = lax.lax_matrix("elliptic-difference", ctx, (1, 0))
    H = lax.classical_difference_hamiltonian(ctx, (1, 0))
    assert lax.isospectral_rate(H, Lc, points=3) < 1e-8
    bad = C("classical-difference", ctx.dom, 2, {((1, 0), ((1, 0), (0, 1))): E.ONE})
    assert lax.isospectral_rate(bad, Lc, points=3) > 1e-3


def test_ruijsenaars_momenta_real_theta_gives_finite_values():
    ctx = el.EllipticContext(R("GLn", 2), k=0.2j)
    p = lax.ruijsenaars_momenta(ctx, [0.3, -0.1], [0.3, -0.3])
    assert len(p) == 2 and all(np.isfinite(v) for v in p)
