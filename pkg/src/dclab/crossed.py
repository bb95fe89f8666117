"""Normal-form operators in the crossed products D(V)*W and D_q(V)*W.

An operator is a finite sum of terms  a(x) * M * w  where M is a derivative
monomial (differential flavour), a lattice translation t(lam) (difference
flavour), a momentum monomial p^m or an exponential e^{beta p_lam}
(classical flavours), and w is a finite Weyl group element given by its
matrix.  Coefficients live in a coefficient domain: one of the exact fields
of ratfunc, or ExprDomain for float-valued elliptic coefficients.
"""

import random
from fractions import Fraction
from math import comb

from . import expr as E
from .ratfunc import RF, LinearField, ExpField
from .weyl import identity, mat_mul, mat_vec, mat_inv, mat_det, _normal

FLAVORS = ("differential", "difference", "classical-differential", "classical-difference")


class FlavorError(ValueError):
    pass


class ContractViolation(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# coefficient domains


class ExprDomain:
    """Expr coefficients evaluated in floating point (mpmath or complex)."""

    kind = "expr"

    def __init__(self, m, params=None, mode="mp", c=0, syms=None):
        self.m = m
        self.params = params
        self.mode = mode
        self.c = c
        self.syms = dict(syms or {})
        self.zero = E.ZERO
        self.one = E.ONE

    def key(self):
        return ("expr", self.m)

    def lift(self, v):
        return E.lift(v)

    def const(self, v):
        return E.const(v)

    def is_zero(self, f):
        return f.op == "const" and f.data == 0

    def pullback(self, f, A, b=None):
        return E.subs_affine(f, A, b)

    def diff(self, f, i):
        return E.diff(f, i)

    def linear_form(self, v, m=0):
        return E.lin(v, m)

    def env(self, x, c=None, params=None, mode=None, syms=None):
        s = dict(self.syms)
        s.update(syms or {})
        return E.Env(x, self.c if c is None else c, s, mode or self.mode, params or self.params)

    def evaluate_point(self, f, x, c=None, env=None):
        env = env or self.env(x, c)
        return E.evaluate(f, env)


def domain_zero(dom):
    return dom.zero


def _is_zero(dom, f):
    if isinstance(f, RF):
        return f.is_zero()
    return dom.is_zero(f)


# ---------------------------------------------------------------------------
# helpers for monomials


def _mono_key(v):
    return tuple(_normal(x) for x in v)


_CONJ = {}


def conj_monomial(u, n):
    """Expand u d^n u^{-1} = prod_i (sum_k u_{ki} d_k)^{n_i} into {n': coefficient}."""
    key = (u, n)
    if key in _CONJ:
        return _CONJ[key]
    m = len(n)
    cur = {tuple(0 for _ in range(m)): Fraction(1)}
    for i in range(m):
        lin_ = {}
        for k in range(m):
            if u[k][i]:
                e = [0] * m
                e[k] = 1
                lin_[tuple(e)] = Fraction(u[k][i])
        for _ in range(n[i]):
            nxt = {}
            for a, ca in cur.items():
                for b, cb in lin_.items():
                    s = tuple(x + y for x, y in zip(a, b))
                    nxt[s] = nxt.get(s, 0) + ca * cb
            cur = {k: v for k, v in nxt.items() if v}
    _CONJ[key] = cur
    return cur


def _sub_multi(m, j):
    return tuple(a - b for a, b in zip(m, j))


def _sub_indices(m):
    """All j <= m componentwise, with the binomial weight prod C(m_i, j_i)."""
    out = [((), 1)]
    for mi in m:
        out = [(j + (ji,), w * comb(mi, ji)) for j, w in out for ji in range(mi + 1)]
    return out


# ---------------------------------------------------------------------------


class CrossedOp:
    __slots__ = ("flavor", "dom", "m", "terms", "beta")

    def __init__(self, flavor, dom, m, terms=None, beta=1):
        if flavor not in FLAVORS:
            raise FlavorError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.dom = dom
        self.m = m
        self.beta = beta
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if not _is_zero(dom, v):
                    self.terms[k] = v

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, flavor, dom, m):
        return cls(flavor, dom, m)

    @classmethod
    def scalar(cls, flavor, dom, m, f):
        e = identity(m)
        return cls(flavor, dom, m, {(tuple(0 for _ in range(m)), e): dom.lift(f)})

    @classmethod
    def group(cls, flavor, dom, m, w, coef=None):
        return cls(flavor, dom, m, {(tuple(0 for _ in range(m)), w): dom.one if coef is None else dom.lift(coef)})

    @classmethod
    def derivative(cls, flavor, dom, m, direction, coef=None):
        """sum_i xi_i d_i (or p_xi in the classical flavour)."""
        e = identity(m)
        terms = {}
        for i, a in enumerate(direction):
            if a:
                mono = tuple(int(j == i) for j in range(m))
                terms[(mono, e)] = dom.lift(a) if coef is None else dom.lift(a) * coef
        return cls(flavor, dom, m, terms)

    @classmethod
    def translation(cls, flavor, dom, m, lam, coef=None, w=None):
        return cls(flavor, dom, m, {(_mono_key(lam), w or identity(m)): dom.one if coef is None else dom.lift(coef)})

    def like(self, terms):
        return CrossedOp(self.flavor, self.dom, self.m, terms, self.beta)

    # linear structure ---------------------------------------------------
    def _check(self, o):
        if not isinstance(o, CrossedOp):
            raise TypeError("operand is not a CrossedOp")
        if o.flavor != self.flavor:
            raise FlavorError(f"flavor mismatch: {self.flavor} vs {o.flavor}")
        if o.m != self.m:
            raise FlavorError("rank mismatch")

    def __add__(self, o):
        if not isinstance(o, CrossedOp):
            o = CrossedOp.scalar(self.flavor, self.dom, self.m, o)
        self._check(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t[k] + v if k in t else v
        return self.like(t)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        if not isinstance(o, CrossedOp):
            o = CrossedOp.scalar(self.flavor, self.dom, self.m, o)
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, s):
        s = self.dom.lift(s)
        return self.like({k: s * v for k, v in self.terms.items()})

    def __mul__(self, o):
        if isinstance(o, CrossedOp):
            return compose(self, o)
        return self.scale(o)

    def __rmul__(self, o):
        return self.scale(o)

    def __pow__(self, n):
        out = CrossedOp.scalar(self.flavor, self.dom, self.m, 1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def group_parts(self):
        return sorted({w for _, w in self.terms})

    def is_group_free(self):
        e = identity(self.m)
        return all(w == e for _, w in self.terms)

    def map_coeffs(self, fn):
        return self.like({k: fn(v) for k, v in self.terms.items()})

    def __repr__(self):
        return f"CrossedOp({self.flavor}, {len(self.terms)} terms)"

    def describe(self):
        lines = []
        for (mono, w), v in sorted(self.terms.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            lines.append(f"{v} * {mono} * {w}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# composition


def _act_coef(dom, f, g_w, g_lam):
    """(t(lam) w).f, i.e. x -> f(w^{-1}(x + c lam))."""
    winv = mat_inv(g_w)
    if g_lam is None or not any(g_lam):
        if g_w == identity(len(g_w)):
            return f
        return dom.pullback(f, winv)
    return dom.pullback(f, winv, mat_vec(winv, g_lam))


def compose(a, b):
    a._check(b)
    dom = a.dom
    fl = a.flavor
    out = {}

    def put(k, v):
        if k in out:
            out[k] = out[k] + v
        else:
            out[k] = v

    cache = {}
    if fl == "difference":
        for (lam, u), A in a.terms.items():
            for (mu, v), B in b.terms.items():
                key = (id(B), lam, u)
                if key not in cache:
                    cache[key] = _act_coef(dom, B, u, lam)
                C = cache[key]
                nl = _mono_key(x + y for x, y in zip(lam, mat_vec(u, mu)))
                put((nl, mat_mul(u, v)), A * C)
    elif fl == "classical-difference":
        for (lam, u), A in a.terms.items():
            for (mu, v), B in b.terms.items():
                key = (id(B), u)
                if key not in cache:
                    cache[key] = _act_coef(dom, B, u, None)
                nl = _mono_key(x + y for x, y in zip(lam, mat_vec(u, mu)))
                put((nl, mat_mul(u, v)), A * cache[key])
    elif fl == "classical-differential":
        for (mm, u), A in a.terms.items():
            for (n, v), B in b.terms.items():
                key = (id(B), u)
                if key not in cache:
                    cache[key] = _act_coef(dom, B, u, None)
                C = A * cache[key]
                uv = mat_mul(u, v)
                for n2, cf in conj_monomial(u, n).items():
                    put((tuple(x + y for x, y in zip(mm, n2)), uv), C * dom.lift(cf))
    else:
        dcache = {}

        def deriv(C, j):
            key = (id(C), j)
            if key not in dcache:
                if not any(j):
                    dcache[key] = (C, C)
                else:
                    i = next(t for t, x in enumerate(j) if x)
                    prev = tuple(x - (1 if t == i else 0) for t, x in enumerate(j))
                    dcache[key] = (C, dom.diff(deriv(C, prev), i))
            return dcache[key][1]

        for (mm, u), A in a.terms.items():
            subs = _sub_indices(mm)
            for (n, v), B in b.terms.items():
                key = (id(B), u)
                if key not in cache:
                    cache[key] = _act_coef(dom, B, u, None)
                C = cache[key]
                uv = mat_mul(u, v)
                expand = conj_monomial(u, n)
                for j, wgt in subs:
                    Dj = deriv(C, j)
                    if _is_zero(dom, Dj):
                        continue
                    coef = A * Dj
                    if wgt != 1:
                        coef = coef * dom.lift(wgt)
                    rest = _sub_multi(mm, j)
                    for n2, cf in expand.items():
                        k = (tuple(x + y for x, y in zip(rest, n2)), uv)
                        put(k, coef if cf == 1 else coef * dom.lift(cf))
    return a.like(out)


def commutator(a, b):
    return compose(a, b) - compose(b, a)


def conjugate(w, a, winv=None):
    """w a w^{-1}."""
    g = CrossedOp.group(a.flavor, a.dom, a.m, w)
    gi = CrossedOp.group(a.flavor, a.dom, a.m, winv or mat_inv(w))
    return compose(compose(g, a), gi)


# ---------------------------------------------------------------------------
# Res


def res(a, sign="plain"):
    e = identity(a.m)
    out = {}
    for (mono, w), v in a.terms.items():
        if sign == "det" and mat_det(w) < 0:
            v = -v
        k = (mono, e)
        out[k] = out[k] + v if k in out else v
    return a.like(out)


def split_by_group(a):
    """{w: group-free operator} with a = sum_w a_w w."""
    e = identity(a.m)
    parts = {}
    for (mono, w), v in a.terms.items():
        parts.setdefault(w, {})[(mono, e)] = v
    return {w: a.like(t) for w, t in parts.items()}


def res_apply(op, RQ, sign="plain", parts=None):
    """Res(op Q) from RQ = Res(Q), using Res(w Q) = w.Res(Q).

    With sign="det" this is Res^-, where Res^-(w Q) = det(w) w.Res^-(Q).
    """
    e = identity(op.m)
    out = CrossedOp.zero(op.flavor, op.dom, op.m)
    for w, part in sorted((parts or split_by_group(op)).items()):
        Qw = RQ if w == e else conjugate(w, RQ)
        if sign == "det" and mat_det(w) < 0:
            Qw = -Qw
        out = out + compose(part, Qw)
    return out


# ---------------------------------------------------------------------------
# action on functions


def apply(a, f):
    """Act with an operator on a single coefficient-domain function."""
    dom = a.dom
    total = dom.zero
    for (mono, w), coef in a.terms.items():
        g = _act_coef(dom, f, w, None)
        if a.flavor == "differential":
            for i, k in enumerate(mono):
                for _ in range(k):
                    g = dom.diff(g, i)
        elif a.flavor == "difference":
            if any(mono):
                g = dom.pullback(g, identity(a.m), mono)
        else:
            raise FlavorError("classical operators do not act on functions")
        total = total + coef * g
    return total


class LaurentPoly:
    """Sparse Laurent polynomial sum_mu c_mu X^mu with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                k = _mono_key(k)
                self.terms[k] = self.terms.get(k, 0) + v
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def monomial(cls, mu, c=1):
        return cls({tuple(mu): c})

    def __add__(self, o):
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return LaurentPoly(t)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, s):
        return LaurentPoly({k: v * s for k, v in self.terms.items()})

    def __mul__(self, o):
        if not isinstance(o, LaurentPoly):
            return self.scale(o)
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = _mono_key(x + y for x, y in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return LaurentPoly(t)

    __rmul__ = __mul__

    def __eq__(self, o):
        return isinstance(o, LaurentPoly) and self.terms == o.terms

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted(self.terms)

    def coefficient(self, mu):
        return self.terms.get(_mono_key(mu), Fraction(0))

    def act_affine(self, g, q=None, cov=None):
        """(g.f)(x) = f(g^{-1} x): X^mu -> q^{<w mu, lam>} X^{w mu}."""
        from .weyl import cov as cov_of
        cw = cov_of(g.w)
        out = {}
        for mu, v in self.terms.items():
            nu = _mono_key(mat_vec(cw, mu))
            s = sum(Fraction(a) * Fraction(b) for a, b in zip(nu, g.lam))
            if s:
                if q is None:
                    raise ValueError("unspecialized q")
                v = v * Fraction(q) ** s if s.denominator == 1 else _frac_pow(q, s, v)
            out[nu] = out.get(nu, 0) + v
        return LaurentPoly(out)

    def to_rf(self, F):
        total = F.zero
        d = {}
        for mu, v in self.terms.items():
            e = [Fraction(x) * F.D for x in mu]
            if any(x.denominator != 1 for x in e):
                raise ValueError("exponent outside the field lattice")
            k = tuple(int(x) for x in e) + ((0,) if F.q is None else ())
            d[k] = d.get(k, 0) + v
        if d:
            total = F._laurent(d)
        return total

    @classmethod
    def from_rf(cls, F, f):
        """Inverse of to_rf; raises ContractViolation if f is not Laurent."""
        den = f.den.to_dict()
        if len(den) != 1:
            raise ContractViolation("result is not a Laurent polynomial (nonzero remainder)")
        (dk, dv), = den.items()
        out = {}
        for k, v in f.num.to_dict().items():
            e = tuple(Fraction(int(k[i]) - int(dk[i]), F.D) for i in range(F.m))
            if F.q is None and int(k[F.m]) - int(dk[F.m]) != 0:
                raise ContractViolation("result depends on the formal q")
            out[e] = Fraction(int(v.p), int(v.q)) / Fraction(int(dv.p), int(dv.q))
        return cls(out)

    def evaluate(self, X):
        """Value at X = e^x given as the tuple of X_i (integral exponents only)."""
        total = Fraction(0)
        for mu, v in self.terms.items():
            t = v
            for xi, e in zip(X, mu):
                t *= Fraction(xi) ** int(e)
            total += t
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{_fmt(v)}*X^{tuple(str(x) for x in k)}" for k, v in sorted(self.terms.items()))

    def to_json(self):
        return {",".join(str(x) for x in k): _fmt(v) for k, v in sorted(self.terms.items())}


def _fmt(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _frac_pow(q, s, v):
    raise ValueError("fractional power of q; use an ExpField with a root of q")


def apply_laurent(a, f):
    """Exact action of a difference operator over an ExpField on a LaurentPoly."""
    if a.flavor != "difference":
        raise FlavorError("apply_laurent needs a difference operator")
    F = a.dom
    if not isinstance(F, ExpField):
        raise FlavorError("apply_laurent needs exponential coefficients")
    if F.q is None:
        raise ValueError("unspecialized q")
    return LaurentPoly.from_rf(F, apply(a, f.to_rf(F)))


# ---------------------------------------------------------------------------
# probabilistic equality


def _rand_frac(rng, box=10 ** 6):
    num = rng.randint(-box, box)
    den = rng.randint(1, box)
    return Fraction(num, den)


class RandomPoints:
    """Random regular points for a coefficient domain."""

    def __init__(self, dom, rng, complex_points=False):
        self.dom = dom
        self.rng = rng
        self.complex_points = complex_points

    def sample(self):
        d = self.dom
        r = self.rng
        if isinstance(d, LinearField):
            vals = [_rand_frac(r) for _ in range(d.nvars)]
            return vals
        if isinstance(d, ExpField):
            return [_rand_frac(r) for _ in range(d.nvars)]
        x = [r.uniform(-0.5, 0.5) for _ in range(d.m)]
        if self.complex_points:
            x = [complex(v, r.uniform(-0.2, 0.2)) for v in x]
        return x

    def value(self, f, pt, env_cache):
        d = self.dom
        if isinstance(d, (LinearField, ExpField)):
            return d.evaluate(f, pt)
        env = env_cache.get("env")
        if env is None:
            env = d.env(pt)
            env_cache["env"] = env
        return E.evaluate(f, env)


class Verdict:
    def __init__(self, ok, witness=None, residual=0.0, scale=0.0):
        self.ok = ok
        self.witness = witness
        self.residual = residual
        self.scale = scale

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"Verdict(ok={self.ok}, residual={self.residual}, witness={self.witness})"


def equal_probabilistic(a, b, trials=20, tol=1e-10, rng=None, seed=0, relative=False,
                        complex_points=False, max_resample=200):
    """Compare normal forms term by term by evaluating at random points.

    Exact domains: decided exactly at `trials` points.  Expr domain: the
    largest absolute difference must stay below tol (times the magnitude of
    the compared coefficients when relative=True).
    """
    if b is None:
        b = CrossedOp.zero(a.flavor, a.dom, a.m)
    a._check(b)
    rng = rng or random.Random(seed)
    dom = a.dom
    keys = set(a.terms) | set(b.terms)
    exact = isinstance(dom, (LinearField, ExpField))
    sampler = RandomPoints(dom, rng, complex_points)
    worst, scale = 0.0, 0.0
    if not keys:
        return Verdict(True)
    done = 0
    bad = 0
    while done < trials:
        pt = sampler.sample()
        cache = {}
        try:
            diffs = []
            for k in keys:
                va = sampler.value(a.terms[k], pt, cache) if k in a.terms else 0
                vb = sampler.value(b.terms[k], pt, cache) if k in b.terms else 0
                diffs.append((k, va, vb))
        except (ZeroDivisionError, E.th.EllipticError):
            bad += 1
            if bad > max_resample:
                raise ValueError("all sampled points singular")
            continue
        done += 1
        for k, va, vb in diffs:
            d = va - vb
            if exact:
                if d != 0:
                    return Verdict(False, {"key": _key_json(k), "point": [str(v) for v in pt],
                                           "lhs": str(va), "rhs": str(vb)}, residual=float(abs(d)))
            else:
                mag = abs(d)
                s = max(abs(va), abs(vb))
                scale = max(scale, float(s))
                r = float(mag / (1 + s)) if relative else float(mag)
                worst = max(worst, r)
                if r > tol:
                    return Verdict(False, {"key": _key_json(k), "point": [str(v) for v in pt],
                                           "lhs": str(va), "rhs": str(vb)}, residual=r, scale=scale)
    return Verdict(True, residual=worst, scale=scale)


def max_residual(a, b=None, points=10, seed=0, rng=None, complex_points=False):
    """Largest coefficient difference |a - b| over random points (Expr domain)."""
    if b is None:
        b = CrossedOp.zero(a.flavor, a.dom, a.m)
    rng = rng or random.Random(seed)
    d = a - b
    sampler = RandomPoints(a.dom, rng, complex_points)
    worst = 0.0
    done = 0
    tries = 0
    while done < points:
        tries += 1
        if tries > 50 * points:
            raise ValueError("all sampled points singular")
        pt = sampler.sample()
        cache = {}
        try:
            vals = [abs(sampler.value(v, pt, cache)) for v in d.terms.values()]
        except (ZeroDivisionError, E.th.EllipticError):
            continue
        done += 1
        if vals:
            worst = max(worst, float(max(vals)))
    return worst


def _key_json(k):
    mono, w = k
    return {"monomial": [str(x) for x in mono], "w": [list(map(str, r)) for r in w]}


# ---------------------------------------------------------------------------
# classical limit and Poisson brackets


def _expr_hbar_poly(e, name="hbar", memo=None):
    """Expand an Expr as a polynomial in the symbol hbar: {power: Expr}."""
    memo = {} if memo is None else memo
    k = id(e)
    if k in memo:
        return memo[k][1]
    op = e.op
    if op == "sym" and e.data == name:
        out = {1: E.ONE}
    elif op in ("const", "lin", "sym"):
        out = {0: e}
    elif op == "add":
        out = {}
        for a in e.args:
            for p, c in _expr_hbar_poly(a, name, memo).items():
                out[p] = E.add(out[p], c) if p in out else c
    elif op == "mul":
        out = {0: E.ONE}
        for a in e.args:
            pa = _expr_hbar_poly(a, name, memo)
            nxt = {}
            for p1, c1 in out.items():
                for p2, c2 in pa.items():
                    c = E.mul(c1, c2)
                    nxt[p1 + p2] = E.add(nxt[p1 + p2], c) if p1 + p2 in nxt else c
            out = nxt
    elif op == "pow":
        pb = _expr_hbar_poly(e.args[0], name, memo)
        if set(pb) == {0}:
            out = {0: e}
        elif e.data < 0:
            if len(pb) == 1:
                (p, c), = pb.items()
                out = {p * e.data: E.power(c, e.data)}
            else:
                raise ContractViolation("coefficient with a pole at hbar = 0")
        else:
            out = {0: E.ONE}
            for _ in range(e.data):
                nxt = {}
                for p1, c1 in out.items():
                    for p2, c2 in pb.items():
                        c = E.mul(c1, c2)
                        nxt[p1 + p2] = E.add(nxt[p1 + p2], c) if p1 + p2 in nxt else c
                out = nxt
    else:
        if E.symbols(e) & {name}:
            raise ContractViolation("hbar inside a primitive")
        out = {0: e}
    memo[k] = (e, out)
    return out


def classical_limit(a, beta=1):
    """hbar -> 0 image: d^m -> p^m, t(lam) -> e^{beta p_lam}."""
    dom = a.dom
    out = {}
    if a.flavor == "differential":
        for (mono, w), f in a.terms.items():
            deg = sum(mono)
            if isinstance(dom, LinearField):
                if not dom.with_h:
                    raise ContractViolation("classical limit needs a symbolic hbar")
                hh = dom.h()
                g = f / (hh ** deg) if deg else f
                if _den_vanishes_at(dom, g, dom.h_index, 0):
                    raise ContractViolation("coefficient with a pole at hbar = 0")
                c = dom.specialize(g, dom.h_index, 0)
            elif isinstance(dom, ExprDomain):
                poly = _expr_hbar_poly(f)
                low = [p for p, c in poly.items() if p < deg and not dom.is_zero(c)]
                if low:
                    raise ContractViolation("coefficient with a pole at hbar = 0")
                c = poly.get(deg, E.ZERO)
            else:
                raise ContractViolation("unsupported domain for the classical limit")
            if not _is_zero(dom, c):
                out[(mono, w)] = c
        return CrossedOp("classical-differential", dom, a.m, out, beta)
    if a.flavor == "difference":
        for (lam, w), f in a.terms.items():
            if isinstance(dom, ExpField):
                if dom.q is not None:
                    raise ContractViolation("classical limit needs a formal q")
                if _den_vanishes_at(dom, f, dom.m, 1):
                    raise ContractViolation("coefficient with a pole at q = 1")
                c = dom.specialize_q(f, 1)
            elif isinstance(dom, LinearField):
                if dom.with_c:
                    if _den_vanishes_at(dom, f, dom.c_index, 0):
                        raise ContractViolation("coefficient with a pole at c = 0")
                    c = dom.specialize(f, dom.c_index, 0)
                else:
                    c = f
            else:
                c = E.set_c(f, 0)
            if not _is_zero(dom, c):
                key = (lam, w)
                out[key] = out[key] + c if key in out else c
        return CrossedOp("classical-difference", dom, a.m, out, beta)
    raise FlavorError("operator is already classical")


def _den_vanishes_at(dom, f, index, value):
    subs = list(dom.gens)
    from .ratfunc import fq
    subs[index] = dom.ctx.constant(fq(value))
    return f.den.compose(*subs).is_zero()


def _partials_p(F):
    """dF/dp_i for a group-free classical operator, as classical operators."""
    out = []
    for i in range(F.m):
        t = {}
        for (mono, w), v in F.terms.items():
            if F.flavor == "classical-differential":
                if mono[i]:
                    nm = tuple(x - (1 if j == i else 0) for j, x in enumerate(mono))
                    t[(nm, w)] = v * F.dom.lift(mono[i]) if (nm, w) not in t else t[(nm, w)] + v * F.dom.lift(mono[i])
            else:
                if mono[i]:
                    s = F.dom.lift(Fraction(F.beta) * Fraction(mono[i]) if not isinstance(F.beta, complex) else F.beta * float(mono[i]))
                    t[(mono, w)] = t[(mono, w)] + v * s if (mono, w) in t else v * s
        out.append(F.like(t))
    return out


def _partials_x(F):
    out = []
    for i in range(F.m):
        out.append(F.like({k: F.dom.diff(v, i) for k, v in F.terms.items()}))
    return out


def poisson_bracket(F, G):
    """{F, G} = sum_i dF/dp_i dG/dx_i - dF/dx_i dG/dp_i."""
    F._check(G)
    if not F.flavor.startswith("classical"):
        raise FlavorError("Poisson brackets need classical operators")
    if not (F.is_group_free() and G.is_group_free()):
        raise FlavorError("group part present")
    Fp, Fx = _partials_p(F), _partials_x(F)
    Gp, Gx = _partials_p(G), _partials_x(G)
    total = CrossedOp.zero(F.flavor, F.dom, F.m)
    total.beta = F.beta
    for i in range(F.m):
        total = total + compose(Fp[i], Gx[i]) - compose(Fx[i], Gp[i])
    return total


def momentum(dom, m, i, flavor="classical-differential"):
    return CrossedOp.derivative(flavor, dom, m, tuple(int(j == i) for j in range(m)))
