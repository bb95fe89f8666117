"""Nonsymmetric and symmetric Macdonald polynomials by exact triangular algebra."""

from fractions import Fraction

import flint

from .crossed import LaurentPoly, apply_laurent, ContractViolation
from .hecke import (HeckeContext, HeckeError, y_word, y_generators, factor_op, basic_rep,
                    mr_hamiltonian)
from .weyl import Orders, order_leq, translation, finite, _normal


class DegenerateSpectrum(HeckeError):
    """The Y-spectrum does not separate the lower set; resample (q, tau)."""


def _key(v):
    return tuple(_normal(x) for x in v)


def action_leq(ctx, lam, mu):
    """The order for which the basic representation is triangular.

    Dominant parts compare as in the Macdonald order, but within an orbit the
    Bruhat comparison of v(.) is reversed: T_i moves X^{s_i mu} towards
    X^{mu} for dominant mu, so the dominant weight heads its orbit.
    """
    o = _orders(ctx)
    lp, mp = o.dominant(lam), o.dominant(mu)
    if tuple(lp) == tuple(mp):
        return o.bruhat_leq(o.v_of(lam), o.v_of(mu))
    return o.in_positive_cone(tuple(x - y for x, y in zip(mp, lp)))


_ORD = {}


def _orders(ctx):
    key = (ctx.rs.family, ctx.rs.rank)
    if key not in _ORD:
        _ORD[key] = Orders(ctx.rs)
    return _ORD[key]


def lower_set(ctx, mu, cap=2000, order="action"):
    """{nu : nu <= mu}; order is 'action' (see action_leq) or 'macdonald'."""
    rs = ctx.rs
    o = _orders(ctx)
    top = _key(o.dominant(mu))
    dom = {top}
    todo = [top]
    while todo:
        nu = todo.pop()
        for a in rs.positive:
            nd = _key(o.dominant(tuple(x - y for x, y in zip(nu, a))))
            if nd in dom:
                continue
            if nd != top and not o.in_positive_cone(tuple(x - y for x, y in zip(top, nd))):
                continue
            dom.add(nd)
            todo.append(nd)
            if len(dom) > cap:
                raise HeckeError(f"lower set exceeds cap {cap}")
    out = set()
    for d in dom:
        for v in ctx.W.orbit_cov(d):
            v = _key(v)
            ok = order_leq(rs, "macdonald", v, mu) if order == "macdonald" else action_leq(ctx, v, mu)
            if ok:
                out.add(v)
        if len(out) > cap:
            raise HeckeError(f"lower set exceeds cap {cap}")
    return sorted(out)


def apply_word(ctx, factors, f):
    """Apply a word of generators (left to right as written) to a LaurentPoly."""
    for fac in reversed(factors):
        f = apply_laurent(factor_op(ctx, fac), f)
    return f


def apply_Y(ctx, lam, f):
    return apply_word(ctx, y_word(ctx, lam), f)


def y_matrix(ctx, lam, basis):
    """Matrix of Y^lam on span{X^nu : nu in basis}; fails if not closed."""
    idx = {b: i for i, b in enumerate(basis)}
    n = len(basis)
    M = [[Fraction(0)] * n for _ in range(n)]
    for j, b in enumerate(basis):
        img = apply_Y(ctx, lam, LaurentPoly.monomial(b))
        for k, v in img.terms.items():
            if k not in idx:
                raise ContractViolation(f"Y^{lam} X^{b} leaves the lower set (X^{k})")
            M[idx[k]][j] = v
    return M


def _nullspace(M):
    n = len(M)
    A = flint.fmpq_mat(n, n, [flint.fmpq(x.numerator, x.denominator) for r in M for x in r])
    R, rank = A.rref()
    pivots = []
    r = 0
    for c in range(n):
        if r < rank and R[r, c] != 0:
            pivots.append(c)
            r += 1
    free = [c for c in range(n) if c not in pivots]
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x = R[i, f]
            v[p] = -Fraction(int(x.p), int(x.q))
        vecs.append(v)
    return vecs


def nonsym_macdonald(ctx, mu, gens=None, cap=2000):
    """E_mu and its eigenvalues gamma_{lam, mu} for lam in a generating set."""
    if ctx.q is None:
        raise HeckeError("Macdonald polynomials need q specialised")
    mu = _key(mu)
    basis = lower_set(ctx, mu, cap)
    gens = gens or y_generators(ctx)
    mats = [y_matrix(ctx, g, basis) for g in gens]
    i0 = basis.index(mu)
    spec = [tuple(M[i][i] for M in mats) for i in range(len(basis))]
    gamma = spec[i0]
    if spec.count(gamma) > 1:
        raise DegenerateSpectrum(f"eigenvalues {gamma} repeat in the lower set of {mu}")
    n = len(basis)
    # joint kernel of all (Y - gamma)
    stacked = []
    for M, g in zip(mats, gamma):
        stacked += [[M[r][c] - (g if r == c else 0) for c in range(n)] for r in range(n)]
    rows = len(stacked)
    A = flint.fmpq_mat(rows, n, [flint.fmpq(x.numerator, x.denominator) for r in stacked for x in r])
    ns = _nullspace_rect(A, n)
    if len(ns) != 1:
        raise DegenerateSpectrum(f"joint eigenspace of dimension {len(ns)}")
    v = ns[0]
    if v[i0] == 0:
        raise DegenerateSpectrum("eigenvector has no leading term")
    E = LaurentPoly({b: x / v[i0] for b, x in zip(basis, v)})
    for g, val in zip(gens, gamma):
        if apply_Y(ctx, g, E) != E.scale(val):
            raise ContractViolation(f"E_{mu} is not an eigenfunction of Y^{g}")
    return E, {g: val for g, val in zip(gens, gamma)}


def _nullspace_rect(A, n):
    R, rank = A.rref()
    pivots = []
    r = 0
    for c in range(n):
        if r < rank and R[r, c] != 0:
            pivots.append(c)
            r += 1
    out = []
    for f in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x = R[i, f]
            v[p] = -Fraction(int(x.p), int(x.q))
        out.append(v)
    return out


def finite_words(ctx):
    """Reduced words and tau_w for all w in the finite Weyl group."""
    out = []
    for w in ctx.W.elements():
        word, om = ctx.A.reduced_word(finite(w))
        if not om.is_identity() or 0 in word:
            raise HeckeError("unexpected affine letters in a finite word")
        t = Fraction(1)
        for i in word:
            t *= ctx.tau_i(i)
        out.append((word, t))
    return out


def symmetrize(ctx, f):
    """e_tau f = sum_w tau_w T_w f / sum_w tau_w^2."""
    total = LaurentPoly()
    norm = Fraction(0)
    for word, t in finite_words(ctx):
        g = f
        for i in reversed(word):
            g = apply_laurent(basic_rep(ctx, i), g)
        total = total + g.scale(t)
        norm += t * t
    return total.scale(1 / norm)


def sym_macdonald(ctx, lam, f=None):
    """P_lam, W-invariant, monic in X^lam; also its L_f eigenvalue.

    f defaults to the first elementary data for GLn/CCn and to the orbit sum
    of the first coweight otherwise.
    """
    rs = ctx.rs
    lam = _key(lam)
    o = Orders(rs)
    if _key(o.dominant(lam)) != lam:
        raise HeckeError(f"{lam} is not dominant")
    E, _ = nonsym_macdonald(ctx, lam)
    P = symmetrize(ctx, E)
    lead = P.coefficient(lam)
    if lead == 0:
        raise DegenerateSpectrum("symmetrised polynomial vanishes at the leading term")
    P = P.scale(1 / lead)
    for w in ctx.W.gens:
        from .weyl import AffineWeylElement
        g = AffineWeylElement(w, tuple(0 for _ in range(rs.dim)))
        if P.act_affine(g) != P:
            raise ContractViolation("P is not W-invariant")
    if f is None:
        f = {"e": 1} if rs.family in ("GLn", "CCn") else {"orbit": y_generators(ctx)[0]}
    L = mr_hamiltonian(ctx, f)
    LP = apply_laurent(L, P)
    ev = LP.coefficient(lam)
    if LP != P.scale(ev):
        raise ContractViolation("P is not an eigenfunction of L_f")
    return P, ev


def orbit_sum(ctx, lam):
    return LaurentPoly({_key(v): 1 for v in ctx.W.orbit_cov(lam)})


def faithfulness_check(ctx, max_len=4, points=None, seed=0):
    """Linear independence of beta(T_w), l(w) <= max_len, via evaluation."""
    import random
    from .crossed import compose, RandomPoints
    rng = random.Random(seed)
    A = ctx.A
    # finite-length affine elements: BFS on words
    elems = {A.e: []}
    frontier = [A.e]
    for _ in range(max_len):
        new = []
        for g in frontier:
            for i, s in enumerate(A.gens):
                h = g * s
                if h not in elems and A.length(h) == A.length(g) + 1:
                    elems[h] = elems[g] + [i]
                    new.append(h)
        frontier = new
    ops = []
    for g, word in elems.items():
        op = ctx.one()
        for i in word:
            op = compose(op, basic_rep(ctx, i))
        ops.append(op)
    keys = sorted(set().union(*[op.terms for op in ops]), key=repr)
    samp = RandomPoints(ctx.F, rng)
    rows = []
    for _ in range(points or 2):
        pt = samp.sample()
        for k in keys:
            rows.append([ctx.F.evaluate(op.terms[k], pt) if k in op.terms else Fraction(0) for op in ops])
    Mx = flint.fmpq_mat(len(rows), len(ops), [flint.fmpq(x.numerator, x.denominator) for r in rows for x in r])
    return {"elements": len(ops), "rank": Mx.rank(), "ok": Mx.rank() == len(ops)}
