"""Trigonometric Dunkl operators and the Calogero-Moser-Sutherland family.

Coefficients live in an ExpField: Z_i = e^{x_i}, so e^{a} for a root a is a
Laurent monomial and d_xi = sum xi_i Z_i d/dZ_i.  The degenerate DAHA
representation (r_i, pi_k) lives instead in the difference crossed product
over Q(x, c).
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .crossed import (CrossedOp, compose, commutator, conjugate, equal_probabilistic,
                      res_apply, split_by_group, FlavorError)
from .ratfunc import ExpField, LinearField
from .rational import quadratic_form, is_invariant, generator_set, _laplacian, DunklError
from .roots import dual_root_system
from .weyl import (weyl_group, identity, mat_mul, mat_vec, mat_inv, AffineWeyl,
                   AffineWeylElement, translation)


KINDS = ("cherednik", "heckman", "polychronakos")


@dataclass
class TrigContext:
    rs: object
    k: dict = None
    F: object = None
    rho: tuple = field(default=None, init=False)

    def __post_init__(self):
        if self.k is None:
            self.k = dict(self.rs.k)
        if self.F is None:
            self.F = ExpField(self.rs.dim, 1, q=1)
        self.rho = self.rs.rho_k(self.k)

    @property
    def m(self):
        return self.rs.dim

    def e(self, a, sign=1):
        return self.F.monomial(tuple(sign * x for x in a))

    def frac(self, a):
        """1 / (1 - e^{-a})."""
        return self.F.one / (self.F.one - self.e(a, -1))

    def coth(self, a):
        """(1 + e^{-a}) / (1 - e^{-a})."""
        em = self.e(a, -1)
        return (self.F.one + em) / (self.F.one - em)


def _pair(a, xi):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, xi))


def _unit(m, i):
    return tuple(int(j == i) for j in range(m))


def trig_dunkl(ctx, kind, xi=None, i=None):
    """Dunkl-Cherednik T_xi, Dunkl-Heckman S_xi, or Polychronakos pi_i."""
    rs, F, m = ctx.rs, ctx.F, ctx.m
    if kind not in KINDS:
        raise FlavorError(f"unknown kind {kind!r}")
    W = weyl_group(rs)
    zero = tuple(0 for _ in range(m))
    e = identity(m)
    terms = {}

    def add(w, v):
        key = (zero, w)
        terms[key] = terms[key] + v if key in terms else v

    if kind == "polychronakos":
        if rs.family not in ("A", "GLn"):
            raise FlavorError("Polychronakos operators need family A or GLn")
        if i is None:
            raise ValueError("polychronakos needs an index i")
        xi = _unit(m, i)
        out = CrossedOp.derivative("differential", F, m, xi)
        k = next(iter(ctx.k.values()))
        Z = [F.var(j) for j in range(m)]
        for j in range(m):
            if j == i:
                continue
            a = tuple(int(t == i) - int(t == j) for t in range(m))
            c = F.const(k) * Z[i] / (Z[i] - Z[j])
            add(e, c)
            add(W.reflection(a if rs.is_positive(a) else tuple(-x for x in a)), -c)
        return out + CrossedOp("differential", F, m, terms)
    if xi is None:
        xi = _unit(m, i)
    out = CrossedOp.derivative("differential", F, m, xi)
    for a in rs.positive:
        s = _pair(a, xi) * Fraction(ctx.k[a])
        if not s:
            continue
        if kind == "cherednik":
            c = F.const(s) * ctx.frac(a)
        else:
            c = F.const(s / 2) * ctx.coth(a)
        add(e, c)
        add(W.reflection(a), -c)
    if kind == "cherednik":
        r = _pair(ctx.rho, xi)
        if r:
            add(e, F.const(-r))
    return out + CrossedOp("differential", F, m, terms)


class TrigRes:
    """Res of products of trigonometric Dunkl operators via res_apply."""

    def __init__(self, ctx, kind):
        self.ctx = ctx
        self.kind = kind
        self.ops = {}
        self.cache = {}

    def op(self, key):
        if key not in self.ops:
            if self.kind == "polychronakos":
                o = trig_dunkl(self.ctx, self.kind, i=key)
            else:
                o = trig_dunkl(self.ctx, self.kind, xi=key)
            self.ops[key] = (o, split_by_group(o))
        return self.ops[key]

    def one(self):
        return CrossedOp.scalar("differential", self.ctx.F, self.ctx.m, 1)

    def power(self, key, r):
        ck = ("pow", key, r)
        if ck not in self.cache:
            cur = self.one() if r == 0 else None
            if r:
                cur = self.power(key, r - 1)
                o, parts = self.op(key)
                cur = res_apply(o, cur, parts=parts)
            self.cache[ck] = cur
        return self.cache[ck]

    def monomial(self, expo):
        expo = tuple(expo)
        ck = ("mono", expo)
        if ck in self.cache:
            return self.cache[ck]
        if not any(expo):
            r = self.one()
        else:
            i = next(t for t, v in enumerate(expo) if v)
            rest = tuple(v - (1 if t == i else 0) for t, v in enumerate(expo))
            o, parts = self.op(_unit(self.ctx.m, i))
            r = res_apply(o, self.monomial(rest), parts=parts)
        self.cache[ck] = r
        return r

    def poly(self, p):
        out = CrossedOp.zero("differential", self.ctx.F, self.ctx.m)
        for e, c in sorted(p.items()):
            out = out + self.monomial(e).scale(Fraction(c))
        return out


def cms_hamiltonian(ctx, source="cherednik", data=None):
    """Res-images: L_q = Res T_q, L_{v,r} (Heckman) or I_r (Polychronakos)."""
    rs, m = ctx.rs, ctx.m
    if source == "cherednik":
        q = quadratic_form(rs) if data is None else data
        if not is_invariant(rs, q):
            raise DunklError("polynomial is not W-invariant")
        return TrigRes(ctx, "cherednik").poly(q)
    if source == "heckman":
        v, r = data
        if r < 0:
            raise ValueError("r must be a natural number")
        W = weyl_group(rs)
        orbit = sorted({tuple(mat_vec(w, v)) for w in W.elements()})
        eng = TrigRes(ctx, "heckman")
        out = CrossedOp.zero("differential", ctx.F, m)
        for xi in orbit:
            out = out + eng.power(xi, r)
        return out
    if source == "polychronakos":
        r = data
        if not 1 <= r <= m:
            raise ValueError("need 1 <= r <= n")
        eng = TrigRes(ctx, "polychronakos")
        out = CrossedOp.zero("differential", ctx.F, m)
        for i in range(m):
            out = out + eng.power(i, r)
        return out
    raise ValueError(f"unknown source {source!r}")


def cmsrad_explicit(ctx):
    """Delta + sum k_a coth(a/2) d_a + <rho_k, rho_k>."""
    rs, F, m = ctx.rs, ctx.F, ctx.m
    out = _laplacian(rs, F, "differential", F.one)
    for a in rs.positive:
        if ctx.k[a]:
            out = out + CrossedOp.derivative("differential", F, m, rs.to_vector(a),
                                             coef=F.const(ctx.k[a]) * ctx.coth(a))
    return out + CrossedOp.scalar("differential", F, m, rs.form(ctx.rho, ctx.rho))


def cms_explicit(ctx):
    """Delta - sum k(k-1)<a,a> / (4 sinh^2(a/2)), with 4 sinh^2(a/2) = e^a (1 - e^{-a})^2."""
    rs, F, m = ctx.rs, ctx.F, ctx.m
    out = _laplacian(rs, F, "differential", F.one)
    pot = F.zero
    for a in rs.positive:
        k = Fraction(ctx.k[a])
        if k * (k - 1):
            d = F.one - ctx.e(a, -1)
            pot = pot + F.const(k * (k - 1) * rs.form(a, a)) * ctx.e(a, -1) / (d * d)
    return out - CrossedOp.scalar("differential", F, m, pot)


def gauge_to_potential(L, ctx):
    """g L g^{-1} with d log g = (1/2) sum k_a coth(a/2) a.

    g = prod (e^{a/2} - e^{-a/2})^{k_a}.  Returns (operator, constant) where
    constant is the additive difference to the potential form, which must be
    a scalar; anything else raises.
    """
    rs, F, m = ctx.rs, ctx.F, ctx.m
    for (mono, w), _ in L.terms.items():
        if sum(mono) > 2 or w != identity(m):
            raise ValueError("expected a second-order group-free operator")
    u = []
    for i in range(m):
        ui = F.zero
        for a in rs.positive:
            if ctx.k[a] and a[i]:
                ui = ui + F.const(Fraction(ctx.k[a]) * a[i] / 2) * ctx.coth(a)
        u.append(ui)
    # g d_i g^{-1} = d_i - u_i
    D = [CrossedOp.derivative("differential", F, m, _unit(m, i))
         - CrossedOp.scalar("differential", F, m, u[i]) for i in range(m)]
    out = CrossedOp.zero("differential", F, m)
    for (mono, w), v in L.terms.items():
        t = CrossedOp.scalar("differential", F, m, v)
        for i, p in enumerate(mono):
            for _ in range(p):
                t = compose(t, D[i])
        out = out + t
    diff = out - cms_explicit(ctx)
    zero = tuple(0 for _ in range(m))
    const = Fraction(0)
    for (mono, w), v in diff.terms.items():
        if mono != zero or not v.is_constant():
            raise ArithmeticError("gauge transform does not reach the potential form")
        const = v.constant_value()
    return out, const


# ---------------------------------------------------------------------------
# degenerate DAHA: r_i and pi_k(lambda)


class DegenerateRep:
    """r_0..r_n and pi_k(lambda) in the difference crossed product over Q(x, c).

    Affine roots of R^v are affine-linear functions; a_0^v = c - <psi^v, x>.
    The lattice of translations is P (weights, as vectors).
    """

    def __init__(self, rs, k=None):
        if rs.family in ("GLn", "CCn"):
            raise ValueError("degenerate_rep needs a reduced family")
        self.rs = rs
        self.k = dict(rs.k if k is None else k)
        self.dual = dual_root_system(rs)
        self.A = AffineWeyl(self.dual)
        self.F = LinearField(rs.dim, with_c=True)
        self.m = rs.dim
        self.gens = [self._r(i) for i in range(rs.n_simple + 1)]
        self.omegas = self.A.omega()

    def _elt(self, g, coef=None):
        return CrossedOp.translation("difference", self.F, self.m, g.lam, coef=coef, w=g.w)

    def _r(self, i):
        rs, F = self.rs, self.F
        g = self.A.gens[i]
        s = self._elt(g)
        if i == 0:
            kv = self.k[rs.highest_short_root]
            a, mm = self.A.simple_affine[0]
        else:
            kv = self.k[rs.simple[i - 1]]
            a, mm = self.A.simple_affine[i]
        if not kv:
            return s
        f = F.linear_form(a, mm)
        c = F.const(kv) / f
        one = CrossedOp.scalar("difference", F, self.m, 1)
        return s - (one - s).scale(c)

    def element(self, g):
        """pi_k(g) along a reduced word."""
        word, om = self.A.reduced_word(g)
        out = self._elt(om)
        for i in reversed(word):
            out = compose(self.gens[i], out)
        return out

    def pi(self, lam):
        return self.element(translation(lam, self.m))

    def braid_orders(self):
        n = len(self.A.gens)
        orders = {}
        for i in range(n):
            for j in range(i + 1, n):
                g = self.A.gens[i] * self.A.gens[j]
                cur, o = g, 1
                while not cur.is_identity() and o <= 12:
                    cur = cur * g
                    o += 1
                if o <= 12:
                    orders[(i, j)] = o
        return orders

    def check(self, trials=20, seed=0):
        checks = []
        one = CrossedOp.scalar("difference", self.F, self.m, 1)
        for i, r in enumerate(self.gens):
            v = equal_probabilistic(compose(r, r), one, trials=trials, seed=seed)
            checks.append({"relation": f"r_{i}^2 = 1", "ok": bool(v), "witness": v.witness})
        for (i, j), o in self.braid_orders().items():
            a, b = self.gens[i], self.gens[j]
            lhs, rhs = one, one
            for t in range(o):
                lhs = compose(lhs, a if t % 2 == 0 else b)
                rhs = compose(rhs, b if t % 2 == 0 else a)
            v = equal_probabilistic(lhs, rhs, trials=trials, seed=seed)
            checks.append({"relation": f"braid({i},{j}) m={o}", "ok": bool(v), "witness": v.witness})
        pis = [self.pi(b) for b in self.dual.coweights]
        for i in range(len(pis)):
            for j in range(i + 1, len(pis)):
                v = equal_probabilistic(commutator(pis[i], pis[j]), None, trials=trials, seed=seed)
                checks.append({"relation": f"[pi(b{i + 1}), pi(b{j + 1})] = 0", "ok": bool(v),
                               "witness": v.witness})
        return {"checks": checks, "ok": all(c["ok"] for c in checks)}


def degenerate_rep(ctx_or_rs, k=None, check=True, trials=20, seed=0):
    rs = getattr(ctx_or_rs, "rs", ctx_or_rs)
    if k is None and hasattr(ctx_or_rs, "k"):
        k = ctx_or_rs.k
    rep = DegenerateRep(rs, k)
    report = rep.check(trials, seed) if check else None
    return rep, report


# ---------------------------------------------------------------------------
# algebra coincidence (GL_n): I_2 against polynomials in L_1, L_2


def span_coefficients(target, basis, trials=6, seed=0):
    """Exact c with target = sum c_j basis_j, or None.

    Coefficients are constants; the linear system uses coefficient values at
    random rational points for every operator key.
    """
    from .crossed import RandomPoints
    from .roots import solve_exact
    keys = sorted(set(target.terms).union(*[b.terms for b in basis]), key=repr)
    rng = random.Random(seed)
    F = target.dom
    rows, rhs = [], []
    samp = RandomPoints(F, rng)
    for _ in range(trials):
        pt = samp.sample()
        for k in keys:
            rows.append([F.evaluate(b.terms[k], pt) if k in b.terms else Fraction(0) for b in basis])
            rhs.append(F.evaluate(target.terms[k], pt) if k in target.terms else Fraction(0))
    sol = _least_solve(rows, rhs)
    if sol is None:
        return None
    combo = CrossedOp.zero(target.flavor, F, target.m)
    for c, b in zip(sol, basis):
        combo = combo + b.scale(c)
    return sol if equal_probabilistic(combo, target) else None


def _least_solve(rows, rhs):
    """Exact solution of an overdetermined consistent system (None if inconsistent)."""
    import flint
    n = len(rows[0])
    A = flint.fmpq_mat(len(rows), n, [flint.fmpq(x.numerator, x.denominator) for r in rows for x in r])
    b = flint.fmpq_mat(len(rows), 1, [flint.fmpq(x.numerator, x.denominator) for x in rhs])
    At = A.transpose()
    try:
        x = (At * A).solve(At * b)
    except ZeroDivisionError:
        return None
    sol = [Fraction(int(x[i, 0].p), int(x[i, 0].q)) for i in range(n)]
    if A * x != b:
        return None
    return sol
