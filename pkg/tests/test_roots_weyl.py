from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dclab.roots import RootSystemError, build_root_system, dot, dual_root_system
from dclab.weyl import AffineWeyl, Orders, act_affine, translation, weyl_group

FAMILIES = [("A", 1, 2), ("A", 2, 6), ("A", 3, 24), ("B", 2, 8), ("B", 3, 48), ("C", 2, 8),
            ("D", 4, 192), ("G2", 2, 12), ("GLn", 3, 6), ("CCn", 2, 8)]


def test_a2_data():
    rs = build_root_system("A", 2, 1)
    assert len(rs.roots) == 6
    assert weyl_group(rs).order() == 6
    assert [[dot(a, b) for b in rs.coweights] for a in rs.simple] == [[1, 0], [0, 1]]


def test_gl3_roots():
    rs = build_root_system("GLn", 3, F(1, 3))
    assert set(rs.roots) == {tuple(int(t == i) - int(t == j) for t in range(3))
                             for i in range(3) for j in range(3) if i != j}


def test_ccn_roots():
    rs = build_root_system("CCn", 2)
    assert set(rs.roots) == {(2, 0), (-2, 0), (0, 2), (0, -2), (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_unknown_family():
    with pytest.raises(RootSystemError):
        build_root_system("Q", 2)


@pytest.mark.parametrize("fam,n,order", FAMILIES)
def test_weyl_order_and_root_closure(fam, n, order):
    rs = build_root_system(fam, n)
    W = weyl_group(rs)
    assert W.order() == order
    roots = set(rs.roots)
    for w in W.gens:
        assert {tuple(W.act_cov(w, a)) for a in roots} == roots


@pytest.mark.parametrize("fam,n,order", FAMILIES)
def test_reduced_word_roundtrip(fam, n, order):
    W = weyl_group(build_root_system(fam, n))
    for w in W.elements():
        word = W.reduced_word(w)
        assert W.from_word(word) == w
        assert len(word) == W.length(w)


def test_dual_swaps_b_and_c():
    rs = build_root_system("B", 2, 1)
    assert len(dual_root_system(rs).roots) == 8


def test_s0_ccn_action():
    A = AffineWeyl(build_root_system("CCn", 2))
    x = (F(1, 3), F(2, 5))
    assert act_affine(A.gens[0], x, c=F(7)) == (F(7) - x[0], x[1])


def test_identity_acts_trivially():
    A = AffineWeyl(build_root_system("B", 2))
    x = (F(1, 3), F(2, 5))
    assert act_affine(A.e, x, c=F(1, 2)) == x


def test_gl_omega():
    A = AffineWeyl(build_root_system("GLn", 3))
    om = A.omega_gln()
    assert len(A.omega()) == 3
    n = len(A.gens)
    for i in range(n):
        conj = om * A.gens[i] * om.inverse()
        assert conj == A.gens[(i + 1) % n]


@pytest.mark.parametrize("fam,n,size", [("G2", 2, 1), ("A", 1, 2), ("A", 2, 3), ("B", 2, 2)])
def test_omega_order(fam, n, size):
    assert len(AffineWeyl(build_root_system(fam, n)).omega()) == size


def test_simple_word():
    A = AffineWeyl(build_root_system("B", 2))
    word, om = A.reduced_word(A.s(1))
    assert word == [1] and om.is_identity()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("A", 2), ("B", 2), ("G2", 2), ("GLn", 3), ("CCn", 2)]),
       st.lists(st.integers(0, 10), max_size=12))
def test_affine_word_reproduces_element(fam_n, raw):
    A = AffineWeyl(build_root_system(*fam_n))
    g = A.e
    for i in raw:
        g = g * A.gens[i % len(A.gens)]
    word, om = A.reduced_word(g)
    assert A.from_word(word, om) == g
    assert len(word) == A.length(g) <= len(raw)


def test_translation_length_positive():
    A = AffineWeyl(build_root_system("GLn", 3))
    word, om = A.reduced_word(translation((1, 0, 0)))
    assert word and not om.is_identity()


def test_macdonald_order_reflexive_and_antidominant():
    rs = build_root_system("A", 1)
    o = Orders(rs)
    w = rs.weights[0]
    assert o.macdonald_leq(w, w)
    neg = tuple(-x for x in w)
    # the antidominant weight is the highest element of its orbit
    assert o.macdonald_leq(w, neg) and not o.macdonald_leq(neg, w)
