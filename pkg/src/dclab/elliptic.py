"""Elliptic Dunkl operators, elliptic R-matrices and Cherednik operators.

Coefficients are Expr trees evaluated with mpmath (ExprDomain, mode 'mp').
Spectral variables are covectors: <a^v, lam> = a^v . lam with a^v the coroot
vector, and W acts on them through the cotangent representation.
"""

import dataclasses
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import expr as E
from . import theta as th
from .crossed import (CrossedOp, ExprDomain, compose, commutator, conjugate, res, res_apply,
                      split_by_group, max_residual)
from .roots import dot
from .weyl import weyl_group, identity, mat_vec, cov, AffineWeyl, _normal


class SpectralPole(ValueError):
    pass


class ExtrapolationError(ArithmeticError):
    pass


def _num(v):
    if isinstance(v, E.Expr):
        return v
    return v if isinstance(v, (Fraction, complex, float, mpmath.mpc, mpmath.mpf)) else Fraction(v)


@dataclass
class EllipticContext:
    """Root data, couplings and spectral vector for the elliptic layer.

    k: multiplicities (scalar, {'long','short'} or per-root dict; floats or
    complex allowed).  spectral: covector lambda (Dunkl) or xi (R-matrices).
    couplings (BC_n / C^vC_n): dict with any of k, g (4-list), mu, nu, nubar,
    gbar (4-list).
    """
    rs: object
    k: object = None
    params: th.EllipticParams = None
    spectral: tuple = None
    hbar: object = 1
    c: object = Fraction(3, 10)
    couplings: dict = None
    k_root: dict = field(default=None, init=False)

    def __post_init__(self):
        rs = self.rs
        if self.params is None:
            self.params = th.EllipticParams(1j)
        self.k_root = {}
        if self.k is None:
            self.k_root = {a: _num(v) for a, v in rs.k.items()}
        elif isinstance(self.k, dict) and not set(self.k) <= {"long", "short"}:
            self.k_root = {tuple(a): _num(v) for a, v in self.k.items()}
        else:
            if isinstance(self.k, dict):
                long_ = {a for a in rs.long_roots()}
                for a in rs.roots:
                    key = "long" if a in long_ else "short"
                    self.k_root[a] = _num(self.k.get(key, self.k.get("long")))
            else:
                self.k_root = {a: _num(self.k) for a in rs.roots}
        self.couplings = dict(self.couplings or {})
        self.m = rs.dim
        self.dom = ExprDomain(self.m, self.params, "mp", c=self.c)
        if self.spectral is None:
            self.spectral = tuple(Fraction(i + 1, 7 + i) for i in range(self.m))
        self.W = weyl_group(rs)

    def with_spectral(self, s):
        out = EllipticContext(self.rs, self.k_root, self.params, tuple(s), self.hbar, self.c,
                              self.couplings)
        out.dom.syms.update(self.dom.syms)
        return out

    def with_params(self, p):
        out = EllipticContext(self.rs, self.k_root, p, self.spectral, self.hbar, self.c,
                              self.couplings)
        out.dom.syms.update(self.dom.syms)
        return out

    def pair(self, a, lam=None):
        """<a^v, lam> for a root a (covector)."""
        lam = self.spectral if lam is None else lam
        v = self.rs.coroot(a)
        return sum(Fraction(x) * _num(y) for x, y in zip(v, lam))

    def check_regular(self, mu, what):
        """Raise if mu lies on the lattice Z + Z tau (symbolic mu is not checked)."""
        if isinstance(mu, E.Expr):
            return
        t = self.params.tau_ell
        muc = complex(mu)
        b = muc.imag / t.imag
        a = muc.real - b * t.real
        if abs(b - round(b)) < 1e-12 and abs(a - round(a)) < 1e-12:
            raise SpectralPole(f"{what} = {mu} is a lattice point")

    def rho_k(self):
        out = [0] * self.m
        for a in self.rs.positive:
            for i in range(self.m):
                out[i] += Fraction(1, 2) * self.k_root[a] * a[i]
        return tuple(out)


def sigma_lin(mu, a, m=0, r=0):
    """sigma^r_mu(<a, x> + m c)."""
    return E.sigma(E.const(mu) if not isinstance(mu, E.Expr) else mu, E.lin(a, m), r)


def v_fn(mu, a, g, m=0):
    """v_mu(z; g) = sum_r g_r sigma^r_{2 mu}(z), z = <a, x> + m c."""
    terms = [E.mul(E.const(_num(g[r])), sigma_lin(2 * mu, a, m, r)) for r in range(4) if g[r]]
    return E.add(*terms) if terms else E.ZERO


# ---------------------------------------------------------------------------
# Dunkl operators


def elliptic_dunkl(ctx, xi, classical=False):
    """y_xi(lam) = hbar d_xi - sum k <a, xi> sigma_{<a^v, lam>}(<a, x>) s_a."""
    rs, m = ctx.rs, ctx.m
    fl = "classical-differential" if classical else "differential"
    dom = ctx.dom
    out = CrossedOp.derivative(fl, dom, m, xi, coef=None if classical else E.const(_num(ctx.hbar)))
    zero = tuple(0 for _ in range(m))
    terms = dict(out.terms)
    for a in rs.positive:
        s = dot(a, xi)
        kv = ctx.k_root[a]
        if s == 0 or kv == 0:
            continue
        mu = ctx.pair(a)
        ctx.check_regular(mu, "<a^v, lam>")
        c = E.mul(E.const(-kv * Fraction(s)), sigma_lin(mu, a))
        key = (zero, ctx.W.reflection(a))
        terms[key] = terms[key] + c if key in terms else c
    return CrossedOp(fl, dom, m, terms)


def basis_elliptic_dunkl(ctx, classical=False):
    return [elliptic_dunkl(ctx, tuple(int(i == j) for j in range(ctx.m)), classical)
            for i in range(ctx.m)]


def equivariance_residual(ctx, xi, w, points=10, seed=0):
    """|| w y_xi(lam) - y_{w xi}(w lam) w || at random points."""
    m = ctx.m
    wl = tuple(_normal(x) for x in mat_vec(cov(w), ctx.spectral))
    wxi = tuple(_normal(x) for x in mat_vec(w, xi))
    g = CrossedOp.group("differential", ctx.dom, m, w)
    lhs = compose(g, elliptic_dunkl(ctx, xi))
    rhs = compose(elliptic_dunkl(ctx.with_spectral(wl), wxi), g)
    return max_residual(lhs, rhs, points=points, seed=seed)


def y_form(ctx, ys=None):
    """<y, y> = sum G_ij y_i y_j."""
    ys = ys or basis_elliptic_dunkl(ctx)
    out = CrossedOp.zero(ys[0].flavor, ctx.dom, ctx.m)
    for i in range(ctx.m):
        for j in range(ctx.m):
            g = ctx.rs.gram[i][j]
            if g:
                out = out + compose(ys[i], ys[j]).scale(E.const(g))
    return out


def laplacian(ctx, coef):
    m, G = ctx.m, ctx.rs.gram
    terms = {}
    e = identity(m)
    for i in range(m):
        for j in range(m):
            if G[i][j]:
                mono = tuple((t == i) + (t == j) for t in range(m))
                v = E.mul(E.const(G[i][j]), coef)
                terms[(mono, e)] = terms[(mono, e)] + v if (mono, e) in terms else v
    return CrossedOp("differential", ctx.dom, m, terms)


def subtraction_term(ctx, lam=None):
    """sum_{a>0} k_a^2 <a, a> / <a^v, lam>^2."""
    total = 0
    for a in ctx.rs.positive:
        mu = ctx.pair(a, lam)
        total += ctx.k_root[a] ** 2 * ctx.rs.form(a, a) / mu ** 2
    return total


def elliptic_cm_explicit(ctx, with_reflections=False):
    """hbar^2 Delta - sum k (k - hbar [s_a]) <a, a> wp(<a, x>).

    with_reflections=True keeps hbar s_a (the lambda -> 0 limit of <y, y>
    before Res, without the constant C).
    """
    m, h = ctx.m, _num(ctx.hbar)
    out = laplacian(ctx, E.const(h * h))
    zero = tuple(0 for _ in range(m))
    e = identity(m)
    terms = dict(out.terms)
    for a in ctx.rs.positive:
        kv = ctx.k_root[a]
        aa = ctx.rs.form(a, a)
        p = E.wp(E.lin(a))
        if with_reflections:
            v = E.mul(E.const(-kv * kv * aa), p)
            terms[(zero, e)] = terms[(zero, e)] + v if (zero, e) in terms else v
            s = (zero, ctx.W.reflection(a))
            v2 = E.mul(E.const(kv * h * aa), p)
            terms[s] = terms[s] + v2 if s in terms else v2
        else:
            v = E.mul(E.const(-kv * (kv - h) * aa), p)
            terms[(zero, e)] = terms[(zero, e)] + v if (zero, e) in terms else v
    return CrossedOp("differential", ctx.dom, m, terms)


def constant_C(ctx):
    """C = 2 zeta(1/2) hbar sum k <a, a> s_a (returned as an operator) and its Res."""
    z = th.zeta_half(ctx.params)
    h = _num(ctx.hbar)
    m = ctx.m
    zero = tuple(0 for _ in range(m))
    terms = {}
    tot = 0
    for a in ctx.rs.positive:
        v = 2 * z * h * ctx.k_root[a] * ctx.rs.form(a, a)
        terms[(zero, ctx.W.reflection(a))] = E.const(v)
        tot += v
    return CrossedOp("differential", ctx.dom, m, terms), tot


class LimitOp:
    """lim_{t -> 0} of a family of operators op(t), evaluated coefficientwise.

    Richardson extrapolation in t over the nodes ts (polynomial fit through
    all nodes); the error estimate compares with the fit that drops the
    largest node.
    """

    NODES = (Fraction(1, 100), Fraction(1, 200), Fraction(1, 400), Fraction(1, 800))

    def __init__(self, family, ts=NODES, tol=1e-6):
        self.family = family
        self.ts = tuple(ts)
        self._ops = {}
        self.tol = tol

    def op(self, t):
        if t not in self._ops:
            self._ops[t] = self.family(t)
        return self._ops[t]

    def keys(self):
        ks = set()
        for t in self.ts:
            ks |= set(self.op(t).terms)
        return sorted(ks, key=repr)

    @staticmethod
    def _neville(ts, vals):
        ts = [mpmath.mpf(t.numerator) / t.denominator for t in ts]
        p = list(vals)
        n = len(ts)
        for j in range(1, n):
            for i in range(n - j):
                p[i] = (ts[i + j] * p[i] - ts[i] * p[i + 1]) / (ts[i + j] - ts[i])
        return p[0]

    def evaluate(self, x, params=None):
        """{key: (limit value, error estimate)} at the point x."""
        ops = [self.op(t) for t in self.ts]
        dom = ops[0].dom
        out = {}
        with mpmath.workprec(dom.params.bits):
            envs = [dom.env(x) for _ in ops]
            for k in self.keys():
                vals = [E.evaluate(o.terms[k], env) if k in o.terms else 0 for o, env in zip(ops, envs)]
                full = self._neville(self.ts, vals)
                part = self._neville(self.ts[1:], vals[1:])
                out[k] = (full, abs(full - part))
        return out

    def max_abs(self, points=5, seed=0, check=True):
        """Max |limit coefficient| over random points; raises if not regular."""
        rng = random.Random(seed)
        worst, err = 0.0, 0.0
        dom = self.op(self.ts[0]).dom
        done = 0
        while done < points:
            x = [rng.uniform(-0.5, 0.5) for _ in range(dom.m)]
            try:
                vals = self.evaluate(x)
            except (ZeroDivisionError, th.EllipticError):
                continue
            done += 1
            for v, e in vals.values():
                worst = max(worst, float(abs(v)))
                err = max(err, float(e))
        if check and err > self.tol:
            raise ExtrapolationError(f"extrapolation error estimate {err:.3g} exceeds {self.tol}")
        return worst, err

    def combine(self, other, fn):
        return LimitOp(lambda t: fn(self.op(t), other.op(t)), self.ts, self.tol)

    def map(self, fn):
        return LimitOp(lambda t: fn(self.op(t)), self.ts, self.tol)


def elliptic_cm_hamiltonian(ctx, q=None, method="quadratic-explicit", lam0=None, ts=None, tol=1e-6):
    """L_q for the elliptic CM system.

    quadratic-explicit: returns (L, constant) with L = Res of the analytic
    lambda -> 0 limit, equal to the elliptic CM operator plus the constant.
    general-limit: returns a LimitOp for Res lim f_q(lambda, y).
    """
    if method == "quadratic-explicit":
        if q is not None:
            from .rational import quadratic_form
            if {tuple(k): Fraction(v) for k, v in q.items()} != quadratic_form(ctx.rs):
                raise ValueError("quadratic-explicit needs q = <xi, xi>")
        L = elliptic_cm_explicit(ctx)
        _, C = constant_C(ctx)
        return L + CrossedOp.scalar("differential", ctx.dom, ctx.m, E.const(C)), C
    if method != "general-limit":
        raise ValueError(f"unknown method {method!r}")
    fq = dual_classical_hamiltonian(ctx, q)
    lam0 = lam0 or tuple(Fraction(2 * i + 3, 11 + 3 * i) for i in range(ctx.m))
    kw = {"tol": tol}
    if ts is not None:
        kw["ts"] = ts

    def family(t):
        lam = tuple(t * x for x in lam0)
        c2 = ctx.with_spectral(lam)
        return res(substitute_dunkl(c2, fq, lam))
    return LimitOp(family, **kw)


def dual_classical_hamiltonian(ctx, q):
    """f_q: the classical rational CM Hamiltonian of R^v with k_{a^v} = k_a <a,a>/2."""
    from .roots import dual_root_system
    from .rational import DunklParams, cm_hamiltonian, quadratic_form
    rs = ctx.rs
    dual = dual_root_system(rs)
    cor = {tuple(_normal(x) for x in rs.coroot(a)) for a in rs.roots}
    if set(dual.roots) != cor or dual.gram != rs.gram:
        raise ValueError("general-limit needs coroots realised as dual roots (orthonormal families)")
    kd = {}
    for a in rs.roots:
        kv = ctx.k_root[a]
        if not isinstance(kv, Fraction):
            raise ValueError("general-limit needs rational multiplicities")
        kd[tuple(_normal(x) for x in rs.coroot(a))] = kv * rs.form(a, a) / 2
    dual = dataclasses.replace(dual, k=kd)
    P = DunklParams(dual, 1, "classical")
    q = q or quadratic_form(rs)
    return cm_hamiltonian(P, q), P


def substitute_dunkl(ctx, fq, lam):
    """f_q(lam, y): replace p-monomials by products of y(lam)."""
    H, P = fq
    ys = basis_elliptic_dunkl(ctx)
    F = P.field
    m = ctx.m
    out = CrossedOp.zero("differential", ctx.dom, m)
    cache = {}

    def ymono(mono):
        if mono not in cache:
            op = CrossedOp.scalar("differential", ctx.dom, m, 1)
            for i, n in enumerate(mono):
                for _ in range(n):
                    op = compose(op, ys[i])
            cache[mono] = op
        return cache[mono]
    for (mono, w), f in H.terms.items():
        if w != identity(m):
            raise ValueError("classical Hamiltonian has group part")
        val = F.evaluate(f, lam)
        out = out + ymono(mono).scale(E.const(val))
    return out


def regularised_y_form(ctx, lam):
    """<y, y>(lam) minus the subtraction term, as an Expr operator."""
    c2 = ctx.with_spectral(lam)
    L = y_form(c2)
    return L - CrossedOp.scalar("differential", ctx.dom, ctx.m, E.const(subtraction_term(ctx, lam)))


# ---------------------------------------------------------------------------
# Inozemtsev BC_n


def inozemtsev_dunkl(ctx):
    """y_i = hbar d_i - v_{lam_i}(x_i) s_i - k sum_{j != i} (sigma(x_i - x_j) s_ij + sigma(x_i + x_j) s_ij^+)."""
    n = ctx.m
    cp = ctx.couplings
    k = _num(cp.get("k", 0))
    g = [_num(x) for x in cp.get("g", (0, 0, 0, 0))]
    lam = ctx.spectral
    dom = ctx.dom
    h = E.const(_num(ctx.hbar))
    zero = tuple(0 for _ in range(n))
    from .weyl import reflection_matrix
    out = []
    for i in range(n):
        ei = tuple(int(t == i) for t in range(n))
        op = CrossedOp.derivative("differential", dom, n, ei, coef=h)
        terms = dict(op.terms)
        if any(g):
            ctx.check_regular(2 * lam[i], "2 lam_i")
            terms[(zero, _refl(n, ei))] = E.neg(v_fn(lam[i], ei, g))
        if k:
            for j in range(n):
                if j == i:
                    continue
                for sgn in (-1, 1):
                    a = tuple(int(t == i) + sgn * int(t == j) for t in range(n))
                    mu = lam[i] + sgn * lam[j]
                    ctx.check_regular(mu, "lam_i +- lam_j")
                    terms[(zero, _refl(n, a))] = E.mul(E.const(-k), sigma_lin(mu, a))
        out.append(CrossedOp("differential", dom, n, terms))
    return out


def _refl(n, a):
    nn = sum(x * x for x in a)
    return tuple(tuple(_normal(Fraction(int(i == j)) - Fraction(2 * a[i] * a[j], nn)) for j in range(n))
                 for i in range(n))


def inozemtsev_hamiltonian(ctx):
    """hbar^2 Delta - 2k(k-hbar) sum (wp(x_i - x_j) + wp(x_i + x_j)) - sum g_r(g_r - hbar) wp(x_i + omega_r)."""
    n = ctx.m
    cp = ctx.couplings
    k = _num(cp.get("k", 0))
    g = [_num(x) for x in cp.get("g", (0, 0, 0, 0))]
    h = _num(ctx.hbar)
    om = th.half_periods(ctx.params)
    out = laplacian(ctx, E.const(h * h))
    pot = []
    for i in range(n):
        for j in range(i + 1, n):
            for sgn in (-1, 1):
                a = tuple(int(t == i) + sgn * int(t == j) for t in range(n))
                pot.append(E.mul(E.const(-2 * k * (k - h)), E.wp(E.lin(a))))
        for r in range(4):
            if g[r]:
                ei = tuple(int(t == i) for t in range(n))
                pot.append(E.mul(E.const(-g[r] * (g[r] - h)), E.wp(E.add(E.lin(ei), E.const(om[r])))))
    return out + CrossedOp.scalar("differential", ctx.dom, n, E.add(*pot))


# ---------------------------------------------------------------------------
# elliptic R-matrices and Cherednik operators


def _cc_kind(a):
    nz = [x for x in a if x]
    if len(nz) == 2 and all(abs(x) == 1 for x in nz):
        return "short"
    if len(nz) == 1 and abs(nz[0]) == 2:
        return "long"
    return None


def ell_R(ctx, a, m=0):
    """R(a + m delta) = sigma_{k_a}(a~) - sigma_{<a^v, xi>}(a~) s_{a~}."""
    rs = ctx.rs
    a = tuple(a)
    A = _affine(ctx)
    s = A.reflection(a, m)
    dom = ctx.dom
    n = ctx.m
    if rs.family == "CCn":
        cp = ctx.couplings
        kind = _cc_kind(a)
        if kind is None:
            raise ValueError(f"{a} is not a root of C_n")
        mu = ctx.pair(a)
        if kind == "short":
            ctx.check_regular(mu, "<a^v, xi>")
            f1 = sigma_lin(_num(cp["mu"]), a, m)
            f2 = sigma_lin(mu, a, m)
        else:
            half = tuple(Fraction(x, 2) for x in a)
            if m % 2:
                nu, g = _num(cp["nubar"]), cp["gbar"]
            else:
                nu, g = _num(cp["nu"]), cp["g"]
            ctx.check_regular(2 * mu, "2 <a^v, xi>")
            f1 = v_fn(nu, half, g, Fraction(m, 2))
            f2 = v_fn(mu, half, g, Fraction(m, 2))
    else:
        if a not in ctx.k_root:
            raise ValueError(f"{a} is not a root")
        mu = ctx.pair(a)
        ctx.check_regular(mu, "<a^v, xi>")
        f1 = sigma_lin(ctx.k_root[a], a, m)
        f2 = sigma_lin(mu, a, m)
    one = CrossedOp.scalar("difference", dom, n, f1)
    g = CrossedOp.translation("difference", dom, n, s.lam, coef=E.neg(f2), w=s.w)
    return one + g


_AFF = {}


def _affine(ctx):
    key = (ctx.rs.family, ctx.rs.rank)
    if key not in _AFF:
        _AFF[key] = AffineWeyl(ctx.rs)
    return _AFF[key]


def unitarity_residual(ctx, a, points=10, seed=0):
    """|| R(a) R(-a) - (wp(k_a) - wp(<a^v, xi>)) ||."""
    if ctx.rs.family == "CCn":
        raise ValueError("unitarity in the displayed form is for reduced systems")
    a = tuple(a)
    na = tuple(-x for x in a)
    lhs = compose(ell_R(ctx, a), ell_R(ctx, na))
    p = ctx.params
    with mpmath.workprec(p.bits):
        val = th.eval_sigma("wp", 0, ctx.k_root[a], p) - th.eval_sigma("wp", 0, ctx.pair(a), p)
    rhs = CrossedOp.scalar("difference", ctx.dom, ctx.m, E.const(val))
    return max_residual(lhs, rhs, points=points, seed=seed)


def root_sequence(ctx, word):
    """alpha^j = s_{i_1} ... s_{i_{j-1}} (a_{i_j}) as (covector, m)."""
    A = _affine(ctx)
    g = A.e
    out = []
    for i in word:
        a, m = A.simple_affine[i]
        out.append(g.act_root(a, m))
        g = g * A.gens[i]
    return out


def R_word(ctx, word):
    out = CrossedOp.scalar("difference", ctx.dom, ctx.m, 1)
    for a, m in root_sequence(ctx, word):
        out = compose(out, ell_R(ctx, a, m))
    return out


def ell_cherednik_Y(ctx, b, alt=False, factors=False):
    """Y^b = R_{t(b)} t(b) for dominant b."""
    from .weyl import translation
    from .hecke import reduced_word_alt
    A = _affine(ctx)
    g = translation(b, ctx.m)
    word, _ = reduced_word_alt(A, g) if alt else A.reduced_word(g)
    t = CrossedOp.translation("difference", ctx.dom, ctx.m, tuple(b))
    if factors:
        return [ell_R(ctx, a, m) for a, m in root_sequence(ctx, word)] + [t]
    return compose(R_word(ctx, word), t)


def ell_res_Y(ctx, b):
    """Res Y^b computed factor by factor without leaving the group-free part."""
    fs = ell_cherednik_Y(ctx, b, factors=True)
    cur = fs[-1]
    for f in reversed(fs[:-1]):
        cur = res_apply(f, cur, parts=split_by_group(f))
    return cur


def gl_Y1_explicit(ctx):
    """Y_1 = R_12 R_13 ... R_1n t(e_1)."""
    n = ctx.m
    out = CrossedOp.scalar("difference", ctx.dom, n, 1)
    for j in range(1, n):
        a = tuple(int(t == 0) - int(t == j) for t in range(n))
        out = compose(out, ell_R(ctx, a))
    return compose(out, CrossedOp.translation("difference", ctx.dom, n, tuple(int(t == 0) for t in range(n))))


def cc_Y1_explicit(ctx):
    """R(e1-e2)..R(e1-en) R(2e1) R(e1+en)..R(e1+e2) R(delta+2e1) t(e1)."""
    n = ctx.m

    def e(i, j=None, s=1):
        return tuple(int(t == i) + (s * int(t == j) if j is not None else 0) for t in range(n))
    seq = [(e(0, j, -1), 0) for j in range(1, n)] + [(tuple(2 * x for x in e(0)), 0)]
    seq += [(e(0, j, 1), 0) for j in range(n - 1, 0, -1)] + [(tuple(2 * x for x in e(0)), 1)]
    out = CrossedOp.scalar("difference", ctx.dom, n, 1)
    for a, m in seq:
        out = compose(out, ell_R(ctx, a, m))
    return compose(out, CrossedOp.translation("difference", ctx.dom, n, e(0))), seq


def yang_baxter_residual(ctx, i, j, k, points=10, seed=0):
    """GL_n: || R_ij R_ik R_jk - R_jk R_ik R_ij ||."""
    n = ctx.m

    def R(p, q):
        return ell_R(ctx, tuple(int(t == p) - int(t == q) for t in range(n)))
    lhs = compose(compose(R(i, j), R(i, k)), R(j, k))
    rhs = compose(compose(R(j, k), R(i, k)), R(i, j))
    return max_residual(lhs, rhs, points=points, seed=seed)


def specialise(ctx):
    """xi = -rho_k (reduced / GL_n) or xi_i = -nu - (n - i) mu (C^vC_n)."""
    if ctx.rs.family == "CCn":
        cp = ctx.couplings
        n = ctx.m
        xi = tuple(-_num(cp["nu"]) - (n - 1 - i) * _num(cp["mu"]) for i in range(n))
    else:
        xi = tuple(-x for x in ctx.rho_k())
    return ctx.with_spectral(xi)


def ell_hamiltonian(ctx, b, explicit=False):
    """L_b = Res Y^b at the specialised xi; with explicit=True also the closed form.

    Returns (L, explicit_op or None).
    """
    c2 = specialise(ctx)
    L = ell_res_Y(c2, b)
    X = None
    if explicit:
        X = explicit_hamiltonian(c2, b)
    return L, X


def explicit_hamiltonian(ctx, b):
    rs, n, dom = ctx.rs, ctx.m, ctx.dom
    b = tuple(_normal(x) for x in b)
    orbit = sorted({tuple(_normal(x) for x in mat_vec(w, b)) for w in ctx.W.elements()})
    out = CrossedOp.zero("difference", dom, n)
    if rs.family == "CCn":
        if sorted(abs(x) for x in b) != [0] * (n - 1) + [1] or b[0] != 1:
            raise ValueError("explicit C^vC_n Hamiltonian only for b = e_1")
        cp = ctx.couplings
        mu, nu, nub = _num(cp["mu"]), _num(cp["nu"]), _num(cp["nubar"])
        for pi in orbit:
            prod = [sigma_lin(mu, a) for a in rs.roots if dot(pi, a) == 1]
            base = E.mul(v_fn(nu, pi, cp["g"]), *prod)
            A = E.mul(base, v_fn(nub, pi, cp["gbar"], Fraction(1, 2)))
            B = E.mul(base, v_fn(-nu - (n - 1) * mu, pi, cp["gbar"], Fraction(1, 2)))
            out = out + CrossedOp.translation("difference", dom, n, pi, coef=A)
            out = out - CrossedOp.scalar("difference", dom, n, B)
        return out
    vals = {dot(a, b) for a in rs.positive}
    phi = rs.highest_root
    phiv = tuple(_normal(x) for x in rs.coroot(phi))
    minuscule = vals <= {0, 1}
    if not minuscule and b != phiv:
        raise ValueError("b is neither minuscule nor quasi-minuscule")
    for pi in orbit:
        prod = [sigma_lin(ctx.k_root[a], a) for a in rs.roots if dot(pi, a) > 0]
        if minuscule:
            out = out + CrossedOp.translation("difference", dom, n, pi, coef=E.mul(*prod) if prod else E.ONE)
            continue
        beta = next(a for a in rs.roots if tuple(_normal(x) for x in rs.coroot(a)) == pi)
        A = E.mul(sigma_lin(ctx.k_root[phi], beta, 1), *prod)
        mu = ctx.pair(phi)
        B = E.mul(sigma_lin(mu, beta, 1), *prod)
        out = out + CrossedOp.translation("difference", dom, n, pi, coef=A)
        out = out - CrossedOp.scalar("difference", dom, n, B)
    return out


def gl_ruijsenaars(ctx, r):
    """sum_{|I|=r} prod_{i in I, j not in I} sigma_k(x_i - x_j) prod_{i in I} t(e_i)."""
    from itertools import combinations
    n = ctx.m
    k = next(iter(ctx.k_root.values()))
    out = CrossedOp.zero("difference", ctx.dom, n)
    for I in combinations(range(n), r):
        fs = [sigma_lin(k, tuple(int(t == i) - int(t == j) for t in range(n)))
              for i in I for j in range(n) if j not in I]
        out = out + CrossedOp.translation("difference", ctx.dom, n, tuple(int(i in I) for i in range(n)),
                                          coef=E.mul(*fs))
    return out


def constant_offset(a, b, points=5, seed=0):
    """(a - b) restricted to the identity key if that is all that remains, else None."""
    d = a - b
    m = a.m
    zero = tuple(0 for _ in range(m))
    e = identity(m)
    rest = d.like({k: v for k, v in d.terms.items() if k != (zero, e)})
    if rest.terms and max_residual(rest, points=points, seed=seed) > 1e-9:
        return None
    if (zero, e) not in d.terms:
        return 0
    rng = random.Random(seed)
    vals = []
    with mpmath.workprec(a.dom.params.bits):
        while len(vals) < 3:
            x = [rng.uniform(-0.5, 0.5) for _ in range(m)]
            try:
                vals.append(E.evaluate(d.terms[(zero, e)], a.dom.env(x)))
            except (ZeroDivisionError, th.EllipticError):
                continue
    if max(abs(v - vals[0]) for v in vals) > 1e-9:
        return None
    return complex(vals[0])


def w_invariance_residual(ctx, L, points=5, seed=0):
    worst = 0.0
    for s in ctx.W.gens:
        worst = max(worst, max_residual(conjugate(s, L), L, points=points, seed=seed))
    return worst


def precision_certify(fn, bits=None, factor=1e4, floor=None):
    """Run fn(bits) at bits and 2 bits; genuine identities shrink by >= factor.

    Residuals already below floor (default 2^{-bits/2}) at both precisions
    also count as certified.
    """
    bits = bits or th.default_bits()
    r1 = float(fn(bits))
    r2 = float(fn(2 * bits))
    floor = floor if floor is not None else 2.0 ** (-bits // 2)
    ok = (r2 <= r1 / factor) or (r1 < floor and r2 < floor) or r1 == 0
    return {"bits": bits, "residual": r1, "residual_2x": r2, "ok": bool(ok)}


def trig_degeneration(n=3, k=Fraction(1, 5), im_tau=8, points=5, seed=0):
    """Compare normalised elliptic Ruijsenaars coefficients with trigonometric ones.

    sigma_k(z) (-sin pi k)/pi at z = X/(2 pi i) tends to
    (tau e^{X/2} - tau^{-1} e^{-X/2})/(e^{X/2} - e^{-X/2}) with tau = e^{-i pi k}.
    """
    p = th.EllipticParams(1j * im_tau)
    rng = random.Random(seed)
    worst = 0.0
    with mpmath.workprec(p.bits):
        kk = mpmath.mpf(k.numerator) / k.denominator
        tau = mpmath.exp(-1j * mpmath.pi * kk)
        norm = -mpmath.sin(mpmath.pi * kk) / mpmath.pi
        for _ in range(points):
            X = [mpmath.mpf(rng.uniform(-2, 2)) for _ in range(n)]
            for i in range(n):
                ell, trg = mpmath.mpc(1), mpmath.mpc(1)
                for j in range(n):
                    if j == i:
                        continue
                    u = X[i] - X[j]
                    z = u / (2j * mpmath.pi)
                    ell *= norm * th.eval_sigma("sigma", kk, z, p)
                    trg *= (tau * mpmath.exp(u / 2) - mpmath.exp(-u / 2) / tau) / (mpmath.exp(u / 2) - mpmath.exp(-u / 2))
                worst = max(worst, float(abs(ell - trg)))
    return worst
