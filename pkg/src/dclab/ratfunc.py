"""Exact rational-function coefficient fields backed by python-flint.

Two flavours:

* LinearField: rational functions of x_1..x_m (plus optional formal step c
  and Planck constant h), used by the rational and degenerate layers.
* ExpField: rational functions of Z_i = exp(x_i / D), plus optionally a
  formal Q = exp(c / D); used by the trigonometric and q-difference layers.
  Derivatives act as d/dx_i = (1/D) Z_i d/dZ_i.

Elements are kept reduced (gcd-cancelled, monic denominator), so zero tests
are exact.
"""

from fractions import Fraction

import flint


def fq(x):
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def to_fraction(v):
    return Fraction(int(v.p), int(v.q))


class RF:
    __slots__ = ("F", "num", "den")

    def __init__(self, F, num, den=None, reduce=True):
        self.F = F
        if den is None:
            den = F.one_poly
        if reduce == "monic":
            num, den = F._monic(num, den)
        elif reduce:
            num, den = F._reduce(num, den)
        self.num = num
        self.den = den

    # arithmetic -------------------------------------------------------
    def __add__(self, o):
        o = self.F.lift(o)
        if self.den == o.den:
            return RF(self.F, self.num + o.num, self.den)
        return RF(self.F, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RF(self.F, -self.num, self.den, reduce=False)

    def __sub__(self, o):
        return self + (-self.F.lift(o))

    def __rsub__(self, o):
        return self.F.lift(o) - self

    def __mul__(self, o):
        o = self.F.lift(o)
        if self.is_zero() or o.is_zero():
            return self.F.zero
        return RF(self.F, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self.F.lift(o)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RF(self.F, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return self.F.lift(o) / self

    def __pow__(self, n):
        if n < 0:
            return self.F.one / (self ** (-n))
        return RF(self.F, self.num ** n, self.den ** n, reduce=False)

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, o):
        o = self.F.lift(o)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def is_constant(self):
        return self.num.total_degree() <= 0 and self.den.total_degree() <= 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return to_fraction(self.num.leading_coefficient()) / to_fraction(self.den.leading_coefficient())

    def __repr__(self):
        if self.den.is_one():
            return f"{self.num}"
        return f"({self.num})/({self.den})"

    def __str__(self):
        return self.__repr__()


class _Field:
    def _setup(self, names):
        self.names = tuple(names)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "lex")
        self.gens = self.ctx.gens()
        self.one_poly = self.ctx.constant(1)
        self.zero = RF(self, self.ctx.constant(0), self.one_poly, reduce=False)
        self.one = RF(self, self.one_poly, self.one_poly, reduce=False)
        self.nvars = len(self.names)

    def _reduce(self, num, den):
        if num.is_zero():
            return num, self.one_poly
        if den.total_degree() > 0 and num.total_degree() > 0:
            g = num.gcd(den)
            if not g.is_one():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num = num * inv
            den = den * inv
        return num, den

    def _monic(self, num, den):
        if num.is_zero():
            return num, self.one_poly
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num = num * inv
            den = den * inv
        return num, den

    def lift(self, o):
        if isinstance(o, RF):
            return o
        return self.const(o)

    def const(self, v):
        if v == 0:
            return self.zero
        return RF(self, self.ctx.constant(fq(v)), self.one_poly, reduce=False)

    def var(self, i):
        return RF(self, self.gens[i], self.one_poly, reduce=False)

    def is_zero(self, f):
        return f.is_zero()

    def evaluate(self, f, values):
        vals = [fq(v) for v in values]
        d = f.den(*vals) if f.den.total_degree() > 0 else f.den.leading_coefficient()
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        n = f.num(*vals) if f.num.total_degree() > 0 else (
            f.num.leading_coefficient() if not f.num.is_zero() else flint.fmpq(0))
        return to_fraction(n) / to_fraction(d)

    def poly_from_dict(self, d):
        return self.ctx.from_dict({k: fq(v) for k, v in d.items()}) if d else self.ctx.constant(0)


class LinearField(_Field):
    """Q(x_1..x_m[, c][, h])."""

    def __init__(self, m, with_c=False, with_h=False):
        self.m = m
        self.with_c = with_c
        self.with_h = with_h
        names = [f"x{i + 1}" for i in range(m)]
        if with_c:
            names.append("c")
        if with_h:
            names.append("h")
        self._setup(names)
        self.c_index = m if with_c else None
        self.h_index = (m + int(with_c)) if with_h else None
        self.kind = "linear"

    def key(self):
        return ("linear", self.m, self.with_c, self.with_h)

    def linear_form(self, v, m=0):
        p = self.ctx.constant(0)
        for i, a in enumerate(v):
            if a:
                p = p + self.gens[i] * fq(a)
        if m:
            if not self.with_c:
                raise ValueError("field has no step variable c")
            p = p + self.gens[self.c_index] * fq(m)
        return RF(self, p, self.one_poly, reduce=False)

    def h(self):
        return self.var(self.h_index)

    def pullback(self, f, A, b=None):
        """x -> A x + c b."""
        if f.is_constant():
            return f
        subs = []
        for i in range(self.m):
            p = self.ctx.constant(0)
            for j in range(self.m):
                if A[i][j]:
                    p = p + self.gens[j] * fq(A[i][j])
            if b is not None and b[i]:
                if not self.with_c:
                    raise ValueError("translation requires the step variable c")
                p = p + self.gens[self.c_index] * fq(b[i])
            subs.append(p)
        subs += list(self.gens[self.m:])
        return RF(self, f.num.compose(*subs), f.den.compose(*subs), reduce="monic")

    def diff(self, f, i):
        n, d = f.num, f.den
        if d.total_degree() <= 0:
            return RF(self, n.derivative(i), d, reduce=False)
        return RF(self, n.derivative(i) * d - n * d.derivative(i), d * d)

    def evaluate_point(self, f, x, c=0, h=None):
        vals = list(x)
        if self.with_c:
            vals.append(c)
        if self.with_h:
            vals.append(h if h is not None else 0)
        return self.evaluate(f, vals)

    def specialize(self, f, index, value):
        """Substitute a numeric value for one generator."""
        subs = list(self.gens)
        subs[index] = self.ctx.constant(fq(value))
        return RF(self, f.num.compose(*subs), f.den.compose(*subs))


class ExpField(_Field):
    """Q(Z_1..Z_m[, Q]) with Z_i = e^{x_i/D}, Q = e^{c/D}."""

    def __init__(self, m, D=1, q=None):
        self.m = m
        self.D = D
        self.q = None if q is None else Fraction(q)
        names = [f"Z{i + 1}" for i in range(m)]
        if self.q is None:
            names.append("Q")
        self._setup(names)
        self.kind = "exp"
        self.q_root = None
        if self.q is not None:
            self.q_root = _rational_root(self.q, D)

    def key(self):
        return ("exp", self.m, self.D, self.q)

    def monomial(self, mu, qexp=0, coef=1):
        """coef * e^{<mu, x>} * q^{qexp} as an element (mu may be fractional)."""
        e = [Fraction(x) * self.D for x in mu]
        if any(x.denominator != 1 for x in e):
            raise ValueError(f"exponent {mu} not in the lattice of this field")
        e = [int(x) for x in e]
        qe = Fraction(qexp) * self.D
        if qe.denominator != 1:
            raise ValueError("q-exponent outside the field")
        qe = int(qe)
        coef = Fraction(coef)
        if self.q is not None:
            coef *= self.q_root ** qe
            qe = 0
        exps = e + ([qe] if self.q is None else [])
        return self._laurent({tuple(exps): coef})

    def _laurent(self, d):
        """Element from a dict of possibly negative exponent tuples."""
        if not d:
            return self.zero
        lo = [min(0, min(k[i] for k in d)) for i in range(self.nvars)]
        num = self.ctx.from_dict({tuple(k[i] - lo[i] for i in range(self.nvars)): fq(v)
                                  for k, v in d.items()})
        den = self.ctx.from_dict({tuple(-x for x in lo): fq(1)})
        return RF(self, num, den)

    def _map_poly(self, p, A, b):
        """Apply Z^nu -> Z^{A^T nu} Q^{<nu,b>} termwise; returns (num, den)."""
        out = {}
        m = self.m
        for k, v in p.to_dict().items():
            nu = [int(t) for t in k[:m]]
            new = [sum(nu[i] * A[i][j] for i in range(m)) for j in range(m)]
            coef = to_fraction(v)
            qe = 0
            if b is not None:
                s = sum(Fraction(nu[i]) * Fraction(b[i]) for i in range(m))
                if s.denominator != 1:
                    raise ValueError("translation leaves the exponent lattice")
                qe = int(s)
            if self.q is None:
                new.append(int(k[m]) + qe)
            elif qe:
                coef *= self.q_root ** qe
            key = tuple(int(x) for x in new)
            out[key] = out.get(key, 0) + coef
        out = {k: v for k, v in out.items() if v != 0}
        return out

    def pullback(self, f, A, b=None):
        """f(x) -> f(A x + c b)."""
        if f.is_constant():
            return f
        n = self._map_poly(f.num, A, b)
        d = self._map_poly(f.den, A, b)
        num = self._laurent(n)
        den = self._laurent(d)
        return num / den

    def diff(self, f, i):
        n, d = f.num, f.den
        Zi = self.gens[i]
        scale = fq(Fraction(1, self.D))
        dn = n.derivative(i) * Zi * scale
        if d.total_degree() <= 0:
            return RF(self, dn, d, reduce=False)
        dd = d.derivative(i) * Zi * scale
        return RF(self, dn * d - n * dd, d * d)

    def evaluate_point(self, f, Z, Q=None):
        vals = list(Z)
        if self.q is None:
            if Q is None:
                raise ValueError("unspecialized q")
            vals.append(Q)
        return self.evaluate(f, vals)

    def specialize_q(self, f, Qval):
        subs = list(self.gens)
        subs[self.m] = self.ctx.constant(fq(Qval))
        return RF(self, f.num.compose(*subs), f.den.compose(*subs))


def _rational_root(q, D):
    if D == 1:
        return q
    num = _iroot(q.numerator, D)
    den = _iroot(q.denominator, D)
    if num is None or den is None:
        raise ValueError(f"q = {q} has no rational {D}-th root; pass q as a perfect power")
    return Fraction(num, den)


def _iroot(n, D):
    sign = -1 if n < 0 else 1
    n = abs(n)
    r = round(n ** (1.0 / D))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** D == n:
            return sign * c
    return None
