"""Basic representation of the extended affine Hecke algebra.

Operators are difference-reflection operators over an ExpField: e^{<a, x>}
for a covector a is a Laurent monomial in Z_i = e^{x_i / D}, and q = e^c is
either an exact rational (with a rational D-th root) or the formal
generator Q = q^{1/D}.  An affine root (a, m) is the function <a, x> + m c.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .crossed import (CrossedOp, compose, commutator, conjugate, equal_probabilistic,
                      res_apply, split_by_group, LaurentPoly, apply_laurent)
from .ratfunc import ExpField
from .roots import dot, with_multiplicities
from .weyl import (weyl_group, identity, mat_mul, mat_vec, mat_inv, AffineWeyl,
                   AffineWeylElement, translation, cov, _normal)


class HeckeError(ValueError):
    pass


def _den(x):
    return Fraction(x).denominator


def _choose_D(rs):
    if rs.family == "CCn":
        return 2
    d = 1
    for w in rs.weights:
        for x in w:
            d = lcm(d, _den(x))
        for b in rs.lattice:
            d = lcm(d, _den(dot(w, b)))
    return d


@dataclass
class HeckeContext:
    """Root data, Hecke parameters and q.

    tau: scalar, {'long','short'} dict, per-root dict, or for CCn a dict with
    tau0, tau0v, taun, taunv, tau.  q: exact rational or None (formal).
    """
    rs: object
    tau: object = None
    q: object = None
    D: int = None
    F: object = field(default=None, init=False)

    def __post_init__(self):
        rs = self.rs
        if self.D is None:
            self.D = _choose_D(rs)
        if rs.family == "CCn":
            p = dict(rs.params)
            if isinstance(self.tau, dict):
                p.update({k: Fraction(v) for k, v in self.tau.items()})
            elif self.tau is not None:
                p = {k: Fraction(self.tau) for k in p}
            self.params = p
            self.taus = None
        else:
            if self.tau is None:
                self.taus = dict(rs.k)
            else:
                self.taus = dict(with_multiplicities(rs, self.tau).k)
            self.params = None
        for v in (self.taus or self.params).values():
            if Fraction(v) == 0:
                raise HeckeError("Hecke parameters must be nonzero")
        self.F = ExpField(rs.dim, self.D, self.q)
        self.A = AffineWeyl(rs)
        self.W = weyl_group(rs)
        self.m = rs.dim
        self._gens = {}

    # parameters ----------------------------------------------------------
    def tau_i(self, i):
        rs = self.rs
        if rs.family == "CCn":
            if i == 0:
                return self.params["tau0"]
            if i == rs.rank:
                return self.params["taun"]
            return self.params["tau"]
        if i == 0:
            return Fraction(self.taus[rs.highest_root])
        return Fraction(self.taus[rs.simple[i - 1]])

    def e(self, a, m=0):
        """e^{a + m delta} as a field element."""
        return self.F.monomial(a, m)

    def element(self, g, coef=None):
        """The group element g = t(lam) w in the difference crossed product."""
        return CrossedOp.translation("difference", self.F, self.m, g.lam, coef=coef, w=g.w)

    def one(self):
        return CrossedOp.scalar("difference", self.F, self.m, 1)


# ---------------------------------------------------------------------------


def _cc_kind(rs, a):
    """Classify a finite C_n root: 'short' for +-e_i+-e_j, 'long' for +-2e_i."""
    nz = [x for x in a if x]
    if len(nz) == 2 and all(abs(x) == 1 for x in nz):
        return "short"
    if len(nz) == 1 and abs(nz[0]) == 2:
        return "long"
    return None


def c_function(ctx, a, m=0):
    """c_{a + m delta} for an affine root."""
    rs, F = ctx.rs, ctx.F
    a = tuple(a)
    if rs.family == "CCn":
        kind = _cc_kind(rs, a)
        if kind is None:
            raise HeckeError(f"{a} is not a root of C_n")
        if kind == "short":
            t = ctx.params["tau"]
            ea = ctx.e(a, m)
            return (F.const(1 / t) - F.const(t) * ea) / (F.one - ea)
        if m % 2:
            t, tv = ctx.params["tau0"], ctx.params["tau0v"]
        else:
            t, tv = ctx.params["taun"], ctx.params["taunv"]
        half = ctx.e(tuple(Fraction(x, 2) for x in a), Fraction(m, 2))
        ea = ctx.e(a, m)
        num = (F.one - F.const(t * tv) * half) * (F.one + F.const(t / tv) * half)
        return F.const(1 / t) * num / (F.one - ea)
    if a not in rs.k:
        raise HeckeError(f"{a} is not a root")
    t = Fraction(ctx.taus[a])
    ea = ctx.e(a, m)
    return (F.const(1 / t) - F.const(t) * ea) / (F.one - ea)


def tau_of(ctx, a, m=0):
    rs = ctx.rs
    if rs.family == "CCn":
        kind = _cc_kind(rs, tuple(a))
        if kind == "short":
            return ctx.params["tau"]
        return ctx.params["tau0"] if m % 2 else ctx.params["taun"]
    return Fraction(ctx.taus[tuple(a)])


def basic_rep(ctx, i=None, omega=None, inverse=False):
    """beta(T_i) = tau_i + c_i (s_i - 1), beta(T_omega) = omega.

    inverse=True returns beta(T_i)^{-1} = beta(T_i) - tau_i + tau_i^{-1}.
    """
    if omega is not None:
        g = omega.inverse() if inverse else omega
        return ctx.element(g)
    n = len(ctx.A.gens)
    if i is None or not 0 <= i < n:
        raise HeckeError(f"generator index {i} out of range")
    key = (i, inverse)
    if key in ctx._gens:
        return ctx._gens[key]
    a, m = ctx.A.simple_affine[i]
    t = ctx.tau_i(i)
    c = c_function(ctx, a, m)
    s = ctx.element(ctx.A.gens[i])
    one = ctx.one()
    T = one.scale(t) + (s - one).scale(c)
    if inverse:
        T = T + one.scale(1 / t - t)
    ctx._gens[key] = T
    return T


def R_matrix(ctx, a, m=0):
    """R(a + m delta) = tau s + c (1 - s)."""
    A = ctx.A
    s = ctx.element(A.reflection(a, m))
    one = ctx.one()
    c = c_function(ctx, a, m)
    return s.scale(tau_of(ctx, a, m)) + (one - s).scale(c)


def reflection_inverse(ctx, op, g):
    """Inverse of A + B g for an involution g (two-term operator)."""
    e = identity(ctx.m)
    zero = tuple(0 for _ in range(ctx.m))
    gk = (tuple(_normal(x) for x in g.lam), g.w)
    A = op.terms.get((zero, e), ctx.F.zero)
    B = op.terms.get(gk, ctx.F.zero)
    if set(op.terms) - {(zero, e), gk}:
        raise HeckeError("operator is not of the form A + B g")
    gop = ctx.element(g)

    def act(f):
        return apply_coef(ctx, g, f)
    delta = A * act(A) - B * act(B)
    return CrossedOp.scalar("difference", ctx.F, ctx.m, act(A) / delta) - \
        compose(CrossedOp.scalar("difference", ctx.F, ctx.m, B / delta), gop)


def apply_coef(ctx, g, f):
    """(g.f)(x) = f(g^{-1} x) for g = t(lam) w."""
    winv = mat_inv(g.w)
    if not any(g.lam):
        return ctx.F.pullback(f, winv)
    return ctx.F.pullback(f, winv, mat_vec(winv, g.lam))


# ---------------------------------------------------------------------------
# Y operators as words in the generators


def _dominant_split(ctx, lam):
    """lam = mu - nu with mu, nu dominant (in the coweight basis)."""
    rs = ctx.rs
    from .roots import solve_exact
    B = rs.coweights
    cols = [[B[j][i] for j in range(len(B))] for i in range(rs.dim)]
    c = solve_exact(cols, tuple(lam))
    if c is None or not rs.in_lattice(lam):
        raise HeckeError(f"{lam} is not in the lattice")
    mu = [Fraction(0)] * rs.dim
    nu = [Fraction(0)] * rs.dim
    for j, cj in enumerate(c):
        tgt = mu if cj > 0 else nu
        for i in range(rs.dim):
            tgt[i] += abs(cj) * B[j][i]
    return tuple(_normal(x) for x in mu), tuple(_normal(x) for x in nu)


def y_word(ctx, lam):
    """Factors of Y^lam: list of ('T', i, inverse) / ('O', omega, inverse), left to right."""
    mu, nu = _dominant_split(ctx, lam)
    out = []
    if any(mu):
        word, om = ctx.A.reduced_word(translation(mu, ctx.m))
        out += [("T", i, False) for i in word]
        if not om.is_identity():
            out.append(("O", om, False))
    if any(nu):
        word, om = ctx.A.reduced_word(translation(nu, ctx.m))
        if not om.is_identity():
            out.append(("O", om, True))
        out += [("T", i, True) for i in reversed(word)]
    return out


def factor_op(ctx, f):
    kind, x, inv = f
    if kind == "T":
        return basic_rep(ctx, x, inverse=inv)
    return basic_rep(ctx, omega=x, inverse=inv)


def cherednik_Y(ctx, lam):
    """Y^lam in the basic representation."""
    out = ctx.one()
    for f in y_word(ctx, lam):
        out = compose(out, factor_op(ctx, f))
    return out


class HeckeRes:
    """Res of words in the generators without leaving the group-free part."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.parts = {}

    def _parts(self, f):
        key = (f[0], f[1] if f[0] == "T" else (f[1].w, f[1].lam), f[2])
        if key not in self.parts:
            op = factor_op(self.ctx, f)
            self.parts[key] = (op, split_by_group(op))
        return self.parts[key]

    def word(self, factors, start=None):
        cur = start if start is not None else self.ctx.one()
        for f in reversed(factors):
            op, parts = self._parts(f)
            cur = res_apply(op, cur, parts=parts)
        return cur

    def y(self, lam):
        return self.word(y_word(self.ctx, lam))


def orbit(ctx, b):
    return sorted({tuple(_normal(x) for x in mat_vec(w, b)) for w in ctx.W.elements()})


def mr_hamiltonian(ctx, f):
    """L_f = Res f(Y).

    f: {'orbit': b} for the orbit sum of Y^pi over W b, {'e': r} for the
    elementary symmetric polynomial in Y_i (GL_n) or in Y_i + Y_i^{-1}
    (CCn), or a dict {lam: coefficient} that must be W-invariant.
    """
    rs = ctx.rs
    eng = HeckeRes(ctx)
    if isinstance(f, dict) and "orbit" in f:
        f = {pi: 1 for pi in orbit(ctx, f["orbit"])}
    elif isinstance(f, dict) and "e" in f:
        f = _elementary(ctx, f["e"])
    # W-invariance of the Laurent polynomial in Y
    f = {tuple(_normal(x) for x in k): Fraction(v) for k, v in f.items() if v}
    for w in ctx.W.gens:
        g = {tuple(_normal(x) for x in mat_vec(w, k)): v for k, v in f.items()}
        if g != f:
            raise HeckeError("f is not W-invariant")
    out = CrossedOp.zero("difference", ctx.F, ctx.m)
    for lam, c in sorted(f.items()):
        out = out + eng.y(lam).scale(c)
    return out


def _elementary(ctx, r):
    from itertools import combinations, product
    m = ctx.m
    if ctx.rs.family == "GLn":
        out = {}
        for I in combinations(range(m), r):
            lam = tuple(int(i in I) for i in range(m))
            out[lam] = out.get(lam, 0) + 1
        return out
    if ctx.rs.family == "CCn":
        out = {}
        for I in combinations(range(m), r):
            for signs in product((1, -1), repeat=r):
                lam = [0] * m
                for i, s in zip(I, signs):
                    lam[i] = s
                lam = tuple(lam)
                out[lam] = out.get(lam, 0) + 1
        return out
    raise HeckeError("elementary symmetric data only for GLn and CCn")


# ---------------------------------------------------------------------------
# explicit formulas


def ruijsenaars(ctx, r):
    """sum_{|I|=r} prod_{i in I, j not in I} c_ij prod_{i in I} t(e_i)."""
    from itertools import combinations
    m, F = ctx.m, ctx.F
    out = CrossedOp.zero("difference", F, m)
    for I in combinations(range(m), r):
        coef = F.one
        for i in I:
            for j in range(m):
                if j not in I:
                    a = tuple(int(t == i) - int(t == j) for t in range(m))
                    coef = coef * c_function(ctx, a)
        out = out + CrossedOp.translation("difference", F, m, tuple(int(i in I) for i in range(m)), coef=coef)
    return out


def macdonald_operator(ctx, b):
    """Explicit L_b for minuscule or quasi-minuscule b (without the constant)."""
    rs, F, m = ctx.rs, ctx.F, ctx.m
    vals = {dot(a, b) for a in rs.positive}
    phi = rs.highest_root
    minuscule = vals <= {0, 1}
    quasi = (not minuscule) and tuple(b) == tuple(_normal(x) for x in rs.coroot(phi))
    if not (minuscule or quasi):
        raise HeckeError("b is neither minuscule nor quasi-minuscule")
    out = CrossedOp.zero("difference", F, m)
    one = ctx.one()
    for pi in orbit(ctx, b):
        A = F.one
        for a in rs.roots:
            if dot(pi, a) > 0:
                A = A * c_function(ctx, a)
        t = CrossedOp.translation("difference", F, m, pi)
        if quasi:
            # pi is a coroot; pi^v is the root with coroot pi
            beta = next(a for a in rs.roots if tuple(_normal(x) for x in rs.coroot(a)) == tuple(pi))
            A = A * c_function(ctx, beta, 1)
            t = t - one
        out = out + t.scale(A)
    return out, ("minuscule" if minuscule else "quasi-minuscule")


def constant_difference(a, b):
    """(a - b) if it is a constant multiple of the identity, else None."""
    d = a - b
    zero = tuple(0 for _ in range(a.m))
    e = identity(a.m)
    if not d.terms:
        return Fraction(0)
    if set(d.terms) != {(zero, e)}:
        return None
    v = d.terms[(zero, e)]
    return v.constant_value() if v.is_constant() else None


def gl_omega(ctx):
    return ctx.A.omega_gln()


def gl_Y_yit(ctx, i):
    """Y_i = T_i ... T_{n-1} T_omega T_1^{-1} ... T_{i-1}^{-1}, 1-based i.

    T_omega is realised by the Omega-part of the reduced word of t(e_1),
    i.e. omega^{-1} for the element omega.f(x) = f(x_2, ..., x_n, x_1 - c).
    """
    n = ctx.m
    om = gl_omega(ctx).inverse()
    out = ctx.one()
    for j in range(i, n):
        out = compose(out, basic_rep(ctx, j))
    out = compose(out, basic_rep(ctx, omega=om))
    for j in range(1, i):
        out = compose(out, basic_rep(ctx, j, inverse=True))
    return out


def gl_Y_yi(ctx, i):
    """Y_i = R_{i,i+1} ... R_{i,n} t(e_i) R_{1i}^{-1} ... R_{i-1,i}^{-1}."""
    n, F = ctx.m, ctx.F
    out = ctx.one()
    for j in range(i + 1, n + 1):
        out = compose(out, R_matrix(ctx, _eij(n, i, j)))
    out = compose(out, CrossedOp.translation("difference", F, n, tuple(int(t == i - 1) for t in range(n))))
    for j in range(1, i):
        a = _eij(n, j, i)
        Rm = R_matrix(ctx, a)
        out = compose(out, reflection_inverse(ctx, Rm, ctx.A.reflection(a)))
    return out


def _eij(n, i, j):
    return tuple(int(t == i - 1) - int(t == j - 1) for t in range(n))


def cc_Y_explicit(ctx, i):
    """C^vC_n: Y_i = T_i..T_{n-1} T_n T_{n-1}..T_1 T_0 T_1^{-1}..T_{i-1}^{-1}."""
    n = ctx.rs.rank
    seq = [(j, False) for j in range(i, n)] + [(n, False)] + [(j, False) for j in range(n - 1, 0, -1)]
    seq += [(0, False)] + [(j, True) for j in range(1, i)]
    out = ctx.one()
    for j, inv in seq:
        out = compose(out, basic_rep(ctx, j, inverse=inv))
    return out


# ---------------------------------------------------------------------------
# relation suite


def braid_orders(ctx):
    gens = ctx.A.gens
    out = {}
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            g = gens[i] * gens[j]
            cur, o = g, 1
            while not cur.is_identity() and o <= 12:
                cur = cur * g
                o += 1
            if o <= 12:
                out[(i, j)] = o
    return out


def relation_suite(ctx, trials=20, seed=0, y_pairs=True, mutate=False):
    """Quadratic, braid, Omega and Y-commutativity relations, exact."""
    checks = []
    rng = random.Random(seed)
    one = ctx.one()
    n = len(ctx.A.gens)
    rs = ctx.rs
    skip0 = rs.family == "GLn"

    def rec(name, a, b):
        v = equal_probabilistic(a, b, trials=trials, rng=rng)
        checks.append({"relation": name, "ok": bool(v), "witness": v.witness})

    for i in range(n):
        T = basic_rep(ctx, i)
        t = ctx.tau_i(i)
        if mutate and i == 1:
            T = T + one
        rec(f"(T_{i}-tau)(T_{i}+1/tau)=0", compose(T - one.scale(t), T + one.scale(1 / t)), None)
        rec(f"T_{i} T_{i}^-1 = 1", compose(T, basic_rep(ctx, i, inverse=True)), one)
    for (i, j), o in sorted(braid_orders(ctx).items()):
        if skip0 and 0 in (i, j) and rs.rank > 3:
            continue
        a, b = basic_rep(ctx, i), basic_rep(ctx, j)
        if mutate and 1 in (i, j):
            a = a + one if i == 1 else a
        l, r = one, one
        for t in range(o):
            l = compose(l, a if t % 2 == 0 else b)
            r = compose(r, b if t % 2 == 0 else a)
        rec(f"braid T_{i},T_{j} (m={o})", l, r)
    om = ctx.A.omega()
    for w in om:
        if w.is_identity():
            continue
        O = ctx.element(w)
        Oi = ctx.element(w.inverse())
        for i in range(n):
            g = w * ctx.A.gens[i] * w.inverse()
            j = next((j for j in range(n) if ctx.A.gens[j] == g), None)
            if j is None:
                continue
            rec(f"T_w T_{i} T_w^-1 = T_{j}", compose(compose(O, basic_rep(ctx, i)), Oi), basic_rep(ctx, j))
    if y_pairs:
        gens = y_generators(ctx)
        Ys = [cherednik_Y(ctx, b) for b in gens]
        for i in range(len(Ys)):
            for j in range(i + 1, len(Ys)):
                gi, gj = ("(" + ",".join(str(x) for x in g) + ")" for g in (gens[i], gens[j]))
                rec(f"[Y^{gi}, Y^{gj}] = 0", commutator(Ys[i], Ys[j]), None)
    return {"checks": checks, "ok": all(c["ok"] for c in checks)}


def y_generators(ctx):
    rs = ctx.rs
    if rs.family in ("GLn", "CCn"):
        return [tuple(int(t == i) for t in range(rs.dim)) for i in range(rs.dim)]
    return [tuple(_normal(x) for x in b) for b in rs.coweights]


# ---------------------------------------------------------------------------
# affine q-KZ cocycle


def _mm(a, b):
    n, p, r = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(p)), a[0][0] * 0) for j in range(r)] for i in range(n)]


def _is_id(a, F=None):
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            target = 1 if i == j else 0
            if hasattr(x, "is_zero"):
                if not (x - target).is_zero():
                    return False
            elif x != target:
                return False
    return True


def _qeye(d):
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def _qinv(M):
    import flint
    d = len(M)
    A = flint.fmpq_mat(d, d, [flint.fmpq(Fraction(x).numerator, Fraction(x).denominator) for r in M for x in r])
    Ai = A.inv()
    return [[Fraction(int(Ai[i, j].p), int(Ai[i, j].q)) for j in range(d)] for i in range(d)]


class QKZModule:
    """Matrices for T_0..T_n and a map omega -> matrix (exact rationals)."""

    def __init__(self, ctx, T, omega=None, name="custom"):
        self.ctx = ctx
        self.T = [[[Fraction(x) for x in r] for r in M] for M in T]
        self.d = len(self.T[0])
        self.omega = omega or (lambda w: _qeye(self.d))
        self.name = name

    def Tinv(self, i):
        return _qinv(self.T[i])

    def check(self):
        """Quadratic, braid and Omega-conjugation relations."""
        ctx = self.ctx
        d = self.d
        I = _qeye(d)
        problems = []
        for i, M in enumerate(self.T):
            t = ctx.tau_i(i)
            a = [[M[r][c] - (t if r == c else 0) for c in range(d)] for r in range(d)]
            b = [[M[r][c] + (1 / t if r == c else 0) for c in range(d)] for r in range(d)]
            if any(x != 0 for row in _mm(a, b) for x in row):
                problems.append(f"quadratic relation for T_{i}")
        for (i, j), o in braid_orders(ctx).items():
            l, r = I, I
            for t in range(o):
                l = _mm(l, self.T[i] if t % 2 == 0 else self.T[j])
                r = _mm(r, self.T[j] if t % 2 == 0 else self.T[i])
            if l != r:
                problems.append(f"braid relation T_{i},T_{j}")
        n = len(self.T)
        for w in ctx.A.omega():
            O = self.omega(w)
            Oi = _qinv(O)
            for i in range(n):
                g = w * ctx.A.gens[i] * w.inverse()
                j = next((j for j in range(n) if ctx.A.gens[j] == g), None)
                if j is not None and _mm(_mm(O, self.T[i]), Oi) != self.T[j]:
                    problems.append(f"omega conjugation T_{i} -> T_{j}")
        return problems


def character_module(ctx, sign=1):
    """T_i -> tau_i (sign=1) or -tau_i^{-1} (sign=-1), T_omega -> 1."""
    n = len(ctx.A.gens)
    T = [[[ctx.tau_i(i) if sign == 1 else -1 / ctx.tau_i(i)]] for i in range(n)]
    return QKZModule(ctx, T, name="trivial" if sign == 1 else "sign")


def regular_module_A1(ctx):
    """Regular module of the finite Hecke algebra of A_1 (basis T_e, T_s).

    T_1 acts by left multiplication; T_omega acts trivially, which forces
    T_0 = T_1 (consistent since omega s_1 omega^{-1} = s_0).
    """
    if ctx.rs.family != "A" or ctx.rs.rank != 1:
        raise HeckeError("regular_module_A1 needs A_1")
    t = ctx.tau_i(1)
    T1 = [[Fraction(0), Fraction(1)], [Fraction(1), t - 1 / t]]
    return QKZModule(ctx, [T1, T1], name="regular-A1")


class QKZ:
    """C_w in Q(V) (x) End(tau) along reduced words; exact over the ExpField."""

    def __init__(self, ctx, module):
        if ctx.q is None:
            raise HeckeError("q-KZ checks need q specialised")
        self.ctx = ctx
        self.mod = module
        problems = module.check()
        if problems:
            raise HeckeError("module relations fail: " + "; ".join(problems))
        self._cs = {}

    def C_simple(self, i):
        if i in self._cs:
            return self._cs[i]
        ctx, F = self.ctx, self.ctx.F
        a, m = ctx.A.simple_affine[i]
        t = ctx.tau_i(i)
        ea = ctx.e(a, m)
        den = F.const(1 / t) - F.const(t) * ea
        Ti, Tin = self.mod.T[i], self.mod.Tinv(i)
        d = self.mod.d
        M = [[(F.const(Tin[r][c]) - ea * F.const(Ti[r][c])) / den for c in range(d)] for r in range(d)]
        self._cs[i] = M
        return M

    def act(self, g, M):
        return [[apply_coef(self.ctx, g, x) for x in row] for row in M]

    def from_word(self, word, omega=None):
        """C_w for w = s_{i1}...s_{il} omega via C_{ww'} = C_w (w.C_{w'})."""
        ctx, F = self.ctx, self.ctx.F
        d = self.mod.d
        C = [[F.const(int(r == c)) for c in range(d)] for r in range(d)]
        g = ctx.A.e
        for i in word:
            C = _mm(C, self.act(g, self.C_simple(i)))
            g = g * ctx.A.gens[i]
        if omega is not None and not omega.is_identity():
            O = self.mod.omega(omega)
            C = _mm(C, [[F.const(x) for x in row] for row in O])
        return C

    def C(self, g, alt=False):
        word, om = (reduced_word_alt(self.ctx.A, g) if alt else self.ctx.A.reduced_word(g))
        return self.from_word(word, om)

    def max_residual(self, A, B, points=5, seed=0):
        """Largest entry of A - B at random rational points (0 when exact)."""
        F = self.ctx.F
        worst = Fraction(0)
        for r in range(len(A)):
            for c in range(len(A[0])):
                dlt = A[r][c] - B[r][c]
                if not dlt.is_zero():
                    rng = random.Random(seed)
                    for _ in range(points):
                        pt = [Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(F.nvars)]
                        try:
                            worst = max(worst, abs(F.evaluate(dlt, pt)))
                        except ZeroDivisionError:
                            continue
                    worst = max(worst, Fraction(1, 10 ** 30))
        return float(worst)


def _gen_orders(A):
    out = {}
    n = len(A.gens)
    for i in range(n):
        for j in range(i + 1, n):
            g = A.gens[i] * A.gens[j]
            cur, o = g, 1
            while not cur.is_identity() and o <= 12:
                cur = cur * g
                o += 1
            if o <= 12:
                out[(i, j)] = out[(j, i)] = o
    return out


def braid_variant(A, word):
    """A different reduced word for the same element via one braid move, or None."""
    orders = _gen_orders(A)
    for p in range(len(word)):
        for (i, j), o in orders.items():
            pat = [i if t % 2 == 0 else j for t in range(o)]
            if word[p:p + o] == pat:
                rep = [j if t % 2 == 0 else i for t in range(o)]
                return word[:p] + rep + word[p + o:]
    return None


def reduced_word_alt(A, g):
    """A second reduced word: right descents, largest index first, then a braid move if needed."""
    A.check_lattice(g.lam)
    first, om = A.reduced_word(g)
    h = g * om.inverse()
    word = []
    while True:
        for i in reversed(range(len(A.simple_affine))):
            a, m = A.simple_affine[i]
            b, mm = h.act_root(a, m)
            if not A.is_positive_affine(b, mm):
                word.insert(0, i)
                h = h * A.gens[i]
                break
        else:
            if not h.is_identity():
                raise HeckeError("right-descent reduction did not terminate at the identity")
            break
    if word == first:
        word = braid_variant(A, word) or word
    return word, om


def random_affine_element(A, rng, length):
    g = A.e
    for _ in range(length):
        g = g * A.gens[rng.randrange(len(A.gens))]
    om = A.omega()
    return g * om[rng.randrange(len(om))]


def qkz_cocycle(ctx, module=None, pairs=10, words=20, seed=0, max_len=6):
    """Cocycle identity, reduced-word independence and nabla(s_i)^2 = 1."""
    module = module or character_module(ctx)
    Z = QKZ(ctx, module)
    rng = random.Random(seed)
    A = ctx.A
    checks = []
    worst = 0.0
    for _ in range(pairs):
        g = random_affine_element(A, rng, rng.randint(1, max_len))
        h = random_affine_element(A, rng, rng.randint(1, max_len))
        lhs = Z.C(g * h)
        rhs = _mm(Z.C(g), Z.act(g, Z.C(h)))
        r = Z.max_residual(lhs, rhs)
        worst = max(worst, r)
        checks.append({"check": "cocycle", "ok": r < 1e-12, "residual": r})
    for _ in range(words):
        g = random_affine_element(A, rng, rng.randint(2, max_len + 2))
        r = Z.max_residual(Z.C(g), Z.C(g, alt=True))
        worst = max(worst, r)
        checks.append({"check": "word independence", "ok": r < 1e-12, "residual": r})
    for i in range(len(A.gens)):
        Cs = Z.C_simple(i)
        sq = _mm(Cs, Z.act(A.gens[i], Cs))
        ok = _is_id(sq)
        checks.append({"check": f"nabla(s_{i})^2 = 1", "ok": ok, "residual": 0.0 if ok else 1.0})
    return {"module": module.name, "checks": checks, "residual": worst,
            "ok": all(c["ok"] for c in checks)}
