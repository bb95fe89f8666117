"""Expression trees over constants, affine-linear forms and elliptic primitives.

A leaf Lin(v, m) stands for <v, x> + m c, where c is the step of the
difference operators.  Primitives carry a z-derivative order, so symbolic
differentiation only has to bump that order and apply the chain rule.
"""

from fractions import Fraction

import mpmath

from . import theta as th


class ExprError(ValueError):
    pass


def _is_zero_num(v):
    return v == 0


class Expr:
    __slots__ = ("op", "args", "data", "_h")

    def __init__(self, op, args=(), data=None):
        self.op = op
        self.args = args
        self.data = data
        self._h = hash((op, args, data))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Expr) and self._h == other._h and self.op == other.op
                and self.data == other.data and self.args == other.args)

    # arithmetic sugar
    def __add__(self, o):
        return add(self, lift(o))

    __radd__ = __add__

    def __sub__(self, o):
        return add(self, neg(lift(o)))

    def __rsub__(self, o):
        return add(lift(o), neg(self))

    def __mul__(self, o):
        return mul(self, lift(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return mul(self, power(lift(o), -1))

    def __rtruediv__(self, o):
        return mul(lift(o), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    def __repr__(self):
        return render(self)


def const(v):
    if isinstance(v, int):
        v = Fraction(v)
    return Expr("const", (), v)


ZERO = const(0)
ONE = const(1)


def lift(o):
    return o if isinstance(o, Expr) else const(o)


def lin(v, m=0):
    v = tuple(Fraction(x) for x in v)
    m = Fraction(m)
    if not any(v) and m == 0:
        return ZERO
    return Expr("lin", (), (v, m))


def sym(name):
    return Expr("sym", (), name)


def is_const(e):
    return e.op == "const"


def _fold(c, v, kind):
    """Fold constants; mp values are combined at a raised precision."""
    if isinstance(c, (mpmath.mpf, mpmath.mpc)) or isinstance(v, (mpmath.mpf, mpmath.mpc)):
        with mpmath.workprec(max(mpmath.mp.prec, 4 * th.default_bits())):
            return c + v if kind == 0 else c * v
    return c + v if kind == 0 else c * v


def add(*xs):
    terms = []
    c = 0
    for x in xs:
        x = lift(x)
        if x.op == "add":
            for y in x.args:
                if y.op == "const":
                    c = _fold(c, y.data, 0)
                else:
                    terms.append(y)
        elif x.op == "const":
            c = _fold(c, x.data, 0)
        else:
            terms.append(x)
    if c != 0:
        terms.append(const(c))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Expr("add", tuple(terms))


def mul(*xs):
    factors = []
    c = 1
    for x in xs:
        x = lift(x)
        if x.op == "mul":
            for y in x.args:
                if y.op == "const":
                    c = _fold(c, y.data, 1)
                else:
                    factors.append(y)
        elif x.op == "const":
            c = _fold(c, x.data, 1)
        else:
            factors.append(x)
    if c == 0:
        return ZERO
    if c != 1:
        factors.insert(0, const(c))
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Expr("mul", tuple(factors))


def neg(x):
    return mul(const(-1), x)


def power(x, n):
    x = lift(x)
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return x
    if x.op == "const":
        if x.data == 0 and n < 0:
            raise ExprError("division by zero")
        if isinstance(x.data, (mpmath.mpf, mpmath.mpc)):
            with mpmath.workprec(max(mpmath.mp.prec, 4 * th.default_bits())):
                return const(x.data ** n)
        return const(x.data ** n if not isinstance(x.data, Fraction) else Fraction(x.data) ** n)
    if x.op == "pow":
        return power(x.args[0], x.data * n)
    return Expr("pow", (x,), n)


def prim(kind, mu, z, order=0, r=0):
    """Primitive call: sigma (r = 0..3), wp, theta (r = 1..4), exp."""
    if kind not in ("sigma", "wp", "theta", "exp"):
        raise ExprError(f"unknown primitive {kind!r}")
    return Expr("prim", (lift(mu), lift(z)), (kind, r, order))


def sigma(mu, z, r=0, order=0):
    return prim("sigma", mu, z, order, r)


def wp(z, order=0):
    return prim("wp", ZERO, z, order)


def exp(z):
    return prim("exp", ZERO, z)


def theta(r, z, order=0):
    return prim("theta", ZERO, z, order, r)


# ---------------------------------------------------------------------------
# structural queries

def depends_on_x(e, memo=None):
    memo = {} if memo is None else memo
    k = id(e)
    if k in memo:
        return memo[k]
    if e.op == "lin":
        res = any(e.data[0])
    elif e.op in ("const", "sym"):
        res = False
    else:
        res = any(depends_on_x(a, memo) for a in e.args)
    memo[k] = res
    return res


def has_elliptic(e, memo=None):
    memo = {} if memo is None else memo
    k = id(e)
    if k in memo:
        return memo[k]
    if e.op == "prim" and e.data[0] != "exp":
        res = True
    else:
        res = any(has_elliptic(a, memo) for a in e.args)
    memo[k] = res
    return res


def symbols(e, acc=None):
    acc = set() if acc is None else acc
    if e.op == "sym":
        acc.add(e.data)
    for a in e.args:
        symbols(a, acc)
    return acc


# ---------------------------------------------------------------------------
# transformations

def _rebuild(e, args):
    if e.op == "add":
        return add(*args)
    if e.op == "mul":
        return mul(*args)
    if e.op == "pow":
        return power(args[0], e.data)
    if e.op == "prim":
        return Expr("prim", tuple(args), e.data)
    raise ExprError(e.op)


def transform(e, leaf, memo=None):
    memo = {} if memo is None else memo
    k = id(e)
    if k in memo:
        return memo[k]
    if not e.args:
        out = leaf(e)
    else:
        new = tuple(transform(a, leaf, memo) for a in e.args)
        out = e if all(x is y for x, y in zip(new, e.args)) else _rebuild(e, new)
    memo[k] = out
    return out


def subs_affine(e, A, b=None, memo=None):
    """f(x) -> f(A x + c b)."""
    n = len(A)

    def leaf(x):
        if x.op != "lin":
            return x
        v, m = x.data
        nv = tuple(sum(v[i] * A[i][j] for i in range(n)) for j in range(n))
        nm = m + (sum(v[i] * b[i] for i in range(n)) if b is not None else 0)
        return lin(nv, nm)
    return transform(e, leaf, memo)


def set_c(e, value=0):
    """Specialize the step c (used by classical limits)."""
    def leaf(x):
        if x.op != "lin":
            return x
        v, m = x.data
        if value == 0:
            return lin(v, 0)
        return add(lin(v, 0), const(m * value))
    return transform(e, leaf)


def subs_sym(e, mapping):
    def leaf(x):
        if x.op == "sym" and x.data in mapping:
            return lift(mapping[x.data])
        return x
    return transform(e, leaf)


def diff(e, i, memo=None):
    """Partial derivative in x_i (i an index) or along a direction vector."""
    memo = {} if memo is None else memo
    k = id(e)
    if k in memo:
        return memo[k]
    op = e.op
    if op in ("const", "sym"):
        out = ZERO
    elif op == "lin":
        v = e.data[0]
        out = const(v[i] if isinstance(i, int) else sum(a * b for a, b in zip(v, i)))
    elif op == "add":
        out = add(*[diff(a, i, memo) for a in e.args])
    elif op == "mul":
        parts = []
        for j, a in enumerate(e.args):
            da = diff(a, i, memo)
            if da.op == "const" and da.data == 0:
                continue
            parts.append(mul(*(e.args[:j] + (da,) + e.args[j + 1:])))
        out = add(*parts)
    elif op == "pow":
        b = e.args[0]
        db = diff(b, i, memo)
        out = ZERO if (db.op == "const" and db.data == 0) else mul(const(e.data), power(b, e.data - 1), db)
    elif op == "prim":
        mu, z = e.args
        if depends_on_x(mu):
            raise ExprError("primitive parameter depends on x")
        dz = diff(z, i, memo)
        if dz.op == "const" and dz.data == 0:
            out = ZERO
        else:
            kind, r, order = e.data
            if kind == "exp":
                out = mul(e, dz)
            else:
                out = mul(Expr("prim", e.args, (kind, r, order + 1)), dz)
    else:
        raise ExprError(op)
    memo[k] = out
    return out


# ---------------------------------------------------------------------------
# evaluation

class Env:
    """Evaluation environment: point x, step c, symbol values, mode."""

    def __init__(self, x, c=0, syms=None, mode="exact", params=None):
        self.mode = mode
        self.params = params
        if mode == "exact":
            self.x = tuple(Fraction(v) for v in x)
            self.c = Fraction(c)
            self.syms = {k: Fraction(v) for k, v in (syms or {}).items()}
        else:
            if params is None:
                params = th.EllipticParams(1j, mode=("float" if mode == "float" else "mp"))
                self.params = params
            B = th.backend(params)
            self.x = tuple(B.num(v) for v in x)
            self.c = B.num(c)
            self.syms = {k: B.num(v) for k, v in (syms or {}).items()}
        self.memo = {}


def _num(v, env):
    if env.mode == "exact":
        if isinstance(v, complex):
            raise ExprError("complex constant in exact mode")
        return Fraction(v)
    return th.backend(env.params).num(v)


def evaluate(e, env):
    if env.mode == "mp":
        with mpmath.workprec(env.params.bits):
            return _ev(e, env)
    return _ev(e, env)


def _ev(e, env):
    k = id(e)
    memo = env.memo
    if k in memo:
        return memo[k][1]
    op = e.op
    if op == "const":
        val = _num(e.data, env)
    elif op == "lin":
        v, m = e.data
        if env.mode == "exact":
            val = sum((a * xx for a, xx in zip(v, env.x) if a), Fraction(0))
            if m:
                val = val + m * env.c
        else:
            val = _num(0, env)
            for a, xx in zip(v, env.x):
                if a:
                    val = val + _num(a, env) * xx
            if m:
                val = val + _num(m, env) * env.c
    elif op == "sym":
        if e.data not in env.syms:
            raise ExprError(f"unassigned symbol {e.data!r}")
        val = env.syms[e.data]
    elif op == "add":
        val = _ev(e.args[0], env)
        for a in e.args[1:]:
            val = val + _ev(a, env)
    elif op == "mul":
        val = _ev(e.args[0], env)
        for a in e.args[1:]:
            if val == 0:
                break
            val = val * _ev(a, env)
    elif op == "pow":
        b = _ev(e.args[0], env)
        if e.data < 0 and b == 0:
            raise ZeroDivisionError("division by zero in expression")
        val = b ** e.data
    elif op == "prim":
        kind, r, order = e.data
        if env.mode == "exact":
            raise ExprError("elliptic primitive in exact mode")
        z = _ev(e.args[1], env)
        if kind == "exp":
            val = th.backend(env.params).exp(z)
        elif kind == "theta":
            val = th.eval_theta(r, z, env.params, order)
        elif kind == "wp":
            val = th.eval_sigma("wp", 0, z, env.params, order)
        else:
            mu = _ev(e.args[0], env)
            val = th.eval_sigma("sigma_r", mu, z, env.params, order, r)
    else:
        raise ExprError(op)
    memo[k] = (e, val)
    return val


def expr_diff_eval(e, mode, point, c=0, syms=None, params=None):
    """Evaluate e at a point assignment in exact or float mode."""
    if mode == "exact" and has_elliptic(e):
        raise ExprError("exact mode requires an elliptic-free expression")
    return evaluate(e, Env(point, c, syms, mode, params))


# ---------------------------------------------------------------------------
# rendering

def _fmt_num(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return f"({v.real!r}{v.imag:+r}j)"
    return str(v)


def render(e):
    op = e.op
    if op == "const":
        return _fmt_num(e.data)
    if op == "sym":
        return e.data
    if op == "lin":
        v, m = e.data
        parts = []
        for i, a in enumerate(v):
            if a:
                coef = "" if a == 1 else ("-" if a == -1 else _fmt_num(a) + "*")
                parts.append(f"{coef}x{i + 1}")
        if m:
            parts.append(("" if m == 1 else ("-" if m == -1 else _fmt_num(m) + "*")) + "c")
        return "(" + " + ".join(parts).replace("+ -", "- ") + ")"
    if op == "add":
        return "(" + " + ".join(render(a) for a in e.args) + ")"
    if op == "mul":
        return "*".join(render(a) for a in e.args)
    if op == "pow":
        return f"{render(e.args[0])}^{e.data}"
    kind, r, order = e.data
    name = {"sigma": f"sigma{r if r else ''}", "wp": "wp", "theta": f"theta{r}",
            "exp": "exp"}[kind] + ("'" * order if order <= 3 else f"^({order})")
    if kind == "sigma":
        return f"{name}[{render(e.args[0])}]({render(e.args[1])})"
    return f"{name}({render(e.args[1])})"
