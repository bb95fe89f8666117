"""Finite and affine Weyl group combinatorics.

Finite elements are integer matrices (tuples of rows) acting on V.  An affine
element t(lam) w acts on points by x -> w x - c lam and on functions by
f -> f(g^{-1} x), so that (t(lam).f)(x) = f(x + c lam).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .roots import RootSystemError, dot, vadd, vsub, vscale, solve_exact


def identity(m):
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


def mat_mul(a, b):
    n = len(b)
    return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(n)) for j in range(len(b[0])))
                 for i in range(len(a)))


def mat_vec(a, v):
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in a)


def _normal(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


@lru_cache(maxsize=None)
def mat_inv(a):
    n = len(a)
    aug = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(_normal(x) for x in row[n:]) for row in aug)


@lru_cache(maxsize=None)
def cov(a):
    """Matrix of the contragredient action on covectors: (w^{-1})^T."""
    inv = mat_inv(a)
    n = len(a)
    return tuple(tuple(inv[j][i] for j in range(n)) for i in range(n))


@lru_cache(maxsize=None)
def mat_det(a):
    n = len(a)
    m = [[Fraction(x) for x in r] for r in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)


def reflection_matrix(rs, a):
    av = rs.coroot(a)
    m = rs.dim
    return tuple(tuple(_normal(int(i == j) - av[i] * a[j]) for j in range(m)) for i in range(m))


class WeylGroup:
    """The finite Weyl group of a root system, enumerated lazily."""

    def __init__(self, rs):
        self.rs = rs
        self.m = rs.dim
        self.e = identity(self.m)
        self.gens = tuple(reflection_matrix(rs, a) for a in rs.simple)
        self._elements = None
        self._refl = {}

    def reflection(self, a):
        a = tuple(a)
        if a not in self._refl:
            self._refl[a] = reflection_matrix(self.rs, a)
        return self._refl[a]

    def elements(self):
        if self._elements is None:
            seen = {self.e: ()}
            order = [self.e]
            frontier = [self.e]
            while frontier:
                nxt = []
                for w in frontier:
                    for i, s in enumerate(self.gens):
                        u = mat_mul(s, w)
                        if u not in seen:
                            seen[u] = (i,) + seen[w]
                            order.append(u)
                            nxt.append(u)
                frontier = nxt
            self._elements = order
            self._words = seen
        return self._elements

    def order(self):
        return len(self.elements())

    def act(self, w, x):
        return mat_vec(w, x)

    def act_cov(self, w, a):
        return tuple(_normal(v) for v in mat_vec(cov(w), a))

    def mul(self, a, b):
        return mat_mul(a, b)

    def inv(self, a):
        return mat_inv(a)

    def det(self, w):
        return mat_det(w)

    def length(self, w):
        return sum(1 for a in self.rs.positive if not self.rs.is_positive(self.act_cov(w, a)))

    def reduced_word(self, w):
        """Reduced word by left descents, smallest index first."""
        word = []
        while w != self.e:
            winv = mat_inv(w)
            for i, a in enumerate(self.rs.simple):
                if not self.rs.is_positive(self.act_cov(winv, a)):
                    word.append(i + 1)
                    w = mat_mul(self.gens[i], w)
                    break
        return word

    def from_word(self, word):
        w = self.e
        for i in word:
            w = mat_mul(w, self.gens[i - 1])
        return w

    def longest(self):
        return max(self.elements(), key=self.length)

    def stabilizer(self, x):
        return [w for w in self.elements() if mat_vec(w, x) == tuple(x)]

    def orbit_cov(self, mu):
        seen = {tuple(mu)}
        frontier = [tuple(mu)]
        while frontier:
            b = frontier.pop()
            for a in self.rs.simple:
                c = tuple(_normal(v) for v in self.rs.reflect_cov(a, b))
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        return sorted(seen)


_GROUPS = {}


def weyl_group(rs):
    key = (rs.family, rs.rank)
    if key not in _GROUPS:
        _GROUPS[key] = WeylGroup(rs)
    return _GROUPS[key]


# ---------------------------------------------------------------------------
# affine elements


@dataclass(frozen=True)
class AffineWeylElement:
    w: tuple
    lam: tuple

    def __mul__(self, other):
        return AffineWeylElement(mat_mul(self.w, other.w),
                                 tuple(_normal(x) for x in vadd(self.lam, mat_vec(self.w, other.lam))))

    def inverse(self):
        wi = mat_inv(self.w)
        return AffineWeylElement(wi, tuple(_normal(-x) for x in mat_vec(wi, self.lam)))

    def act_root(self, alpha, m):
        """Image of the affine root alpha + m delta."""
        beta = tuple(_normal(v) for v in mat_vec(cov(self.w), alpha))
        return beta, _normal(m + dot(beta, self.lam))

    def is_identity(self):
        return self.w == identity(len(self.w)) and not any(self.lam)

    def __repr__(self):
        return f"AffineWeylElement(w={self.w}, lam={tuple(str(x) for x in self.lam)})"


@dataclass(frozen=True)
class AffinePoint:
    """The point x + c * xc with c a formal unit."""
    x: tuple
    xc: tuple

    def at(self, c):
        return tuple(a + c * b for a, b in zip(self.x, self.xc))


def translation(lam, m=None):
    lam = tuple(_normal(x) for x in lam)
    return AffineWeylElement(identity(m or len(lam)), lam)


def finite(w):
    return AffineWeylElement(w, tuple(0 for _ in w))


class AffineWeyl:
    """Extended affine Weyl group W x| L for the stored lattice L."""

    def __init__(self, rs):
        self.rs = rs
        self.W = weyl_group(rs)
        self.m = rs.dim
        self.e = AffineWeylElement(self.W.e, tuple(0 for _ in range(self.m)))
        phi = rs.highest_root
        neg = tuple(-x for x in phi)
        # a_0 = delta - phi; s_0 = t(-phi^vee) s_phi
        self.a0 = (neg, 1)
        s0 = AffineWeylElement(self.W.reflection(phi),
                               tuple(_normal(-x) for x in rs.coroot(phi)))
        self.simple_affine = [self.a0] + [(tuple(a), 0) for a in rs.simple]
        self.gens = [s0] + [finite(s) for s in self.W.gens]

    # roots --------------------------------------------------------------
    def is_positive_affine(self, alpha, m):
        return m > 0 or (m == 0 and self.rs.is_positive(alpha))

    def reflection(self, alpha, m=0):
        """s_{alpha + m delta} = t(m alpha^vee) s_alpha."""
        av = self.rs.coroot(alpha)
        return AffineWeylElement(self.W.reflection(alpha), tuple(_normal(m * x) for x in av))

    def s(self, i):
        return self.gens[i]

    # length ---------------------------------------------------------------
    def length(self, g):
        total = 0
        cw = cov(g.w)
        for a in self.rs.positive:
            beta = tuple(mat_vec(cw, a))
            s = dot(beta, g.lam)
            if s.__class__ is Fraction and s.denominator != 1:
                raise RootSystemError("translation not in the coweight lattice")
            s = int(s)
            neg = not self.rs.is_positive(tuple(_normal(v) for v in beta))
            total += max(0, -s) + (1 if neg and s <= 0 else 0)
            total += max(0, s - 1) + (1 if (not neg) and s >= 1 else 0)
        return total

    def check_lattice(self, lam):
        if not self.rs.in_lattice(lam):
            raise RootSystemError(f"{lam} is not in the lattice")

    def reduced_word(self, g):
        """Greedy left-descent word: g = s_{i1} ... s_{il} omega."""
        self.check_lattice(g.lam)
        word = []
        while True:
            ginv = g.inverse()
            for i, (a, m) in enumerate(self.simple_affine):
                b, mm = ginv.act_root(a, m)
                if not self.is_positive_affine(b, mm):
                    word.append(i)
                    g = self.gens[i] * g
                    break
            else:
                return word, g

    def from_word(self, word, omega=None):
        g = self.e
        for i in word:
            g = g * self.gens[i]
        return g * omega if omega is not None else g

    def t(self, lam):
        return translation(lam)

    # Omega ---------------------------------------------------------------
    def omega_gln(self):
        n = self.m
        # omega = t(-e_1) sigma^{-1}, (omega.x) = (x_n + c, x_1, ..., x_{n-1})
        sig_inv = tuple(tuple(int(j == (i - 1) % n) for j in range(n)) for i in range(n))
        return AffineWeylElement(sig_inv, tuple(-int(i == 0) for i in range(n)))

    def omega(self):
        rs = self.rs
        if rs.family == "CCn":
            return [self.e]
        if rs.family == "GLn":
            om = self.omega_gln()
            out, g = [], self.e
            for _ in range(self.m):
                out.append(g)
                g = g * om
            return out
        cands = [tuple(0 for _ in range(self.m))]
        for b in rs.coweights:
            if dot(rs.highest_root, b) == 1:
                cands.append(tuple(-x for x in b))
        out = []
        for lam in cands:
            for w in self.W.elements():
                g = AffineWeylElement(w, tuple(_normal(x) for x in lam))
                if self.length(g) == 0 and g not in out:
                    out.append(g)
        return out

    def permutes_simple(self, g):
        img = [g.act_root(a, m) for a, m in self.simple_affine]
        return sorted(img) == sorted(self.simple_affine)


def act_affine(g, target, c=None):
    """Act by g on a point, an AffinePoint, or any object with act_affine."""
    if hasattr(target, "act_affine"):
        return target.act_affine(g)
    if isinstance(target, AffinePoint):
        if len(target.x) != len(g.w):
            raise ValueError("dimension mismatch")
        return AffinePoint(mat_vec(g.w, target.x),
                           vsub(mat_vec(g.w, target.xc), g.lam))
    x = tuple(target)
    if len(x) != len(g.w):
        raise ValueError("dimension mismatch")
    if c is None:
        return act_affine(g, AffinePoint(x, tuple(0 for _ in x)))
    return vsub(mat_vec(g.w, x), vscale(c, g.lam))


# ---------------------------------------------------------------------------
# orders


class Orders:
    def __init__(self, rs):
        self.rs = rs
        self.W = weyl_group(rs)
        self._bru = {}

    def _left_descent(self, w):
        winv = mat_inv(w)
        for i, a in enumerate(self.rs.simple):
            if not self.rs.is_positive(self.W.act_cov(winv, a)):
                return i
        return None

    def bruhat_leq(self, u, v):
        key = (u, v)
        if key in self._bru:
            return self._bru[key]
        lu, lv = self.W.length(u), self.W.length(v)
        if lu > lv:
            res = False
        elif lv == 0:
            res = u == v
        else:
            i = self._left_descent(v)
            s = self.W.gens[i]
            sv = mat_mul(s, v)
            su = mat_mul(s, u)
            if self.W.length(su) < lu:
                res = self.bruhat_leq(su, sv)
            else:
                res = self.bruhat_leq(u, sv)
        self._bru[key] = res
        return res

    def _coroot_pair(self, mu, i):
        return dot(mu, self.rs.coroot(self.rs.simple[i]))

    def dominant(self, mu):
        mu = tuple(mu)
        changed = True
        while changed:
            changed = False
            for i, a in enumerate(self.rs.simple):
                if self._coroot_pair(mu, i) < 0:
                    mu = tuple(_normal(v) for v in self.rs.reflect_cov(a, mu))
                    changed = True
        return mu

    def v_of(self, mu):
        """Shortest w with w.mu antidominant."""
        mu = tuple(mu)
        w = self.W.e
        changed = True
        while changed:
            changed = False
            for i, a in enumerate(self.rs.simple):
                if self._coroot_pair(mu, i) > 0:
                    mu = tuple(_normal(v) for v in self.rs.reflect_cov(a, mu))
                    w = mat_mul(self.W.gens[i], w)
                    changed = True
                    break
        return w

    def in_positive_cone(self, d):
        if not any(d):
            return False
        rows = [[s[i] for s in self.rs.simple] for i in range(self.rs.dim)]
        c = solve_exact(rows, d)
        return c is not None and all(x >= 0 and x.denominator == 1 for x in c)

    def check_weight(self, mu):
        if not self.rs.in_weight_lattice(mu):
            raise RootSystemError(f"{mu} is not in the weight lattice")

    def macdonald_leq(self, lam, mu):
        self.check_weight(lam)
        self.check_weight(mu)
        lp, mp = self.dominant(lam), self.dominant(mu)
        if lp == mp:
            return self.bruhat_leq(self.v_of(mu), self.v_of(lam))
        return self.in_positive_cone(vsub(mp, lp))


_ORDERS = {}


def order_leq(rs, mode, u, v):
    key = (rs.family, rs.rank)
    if key not in _ORDERS:
        _ORDERS[key] = Orders(rs)
    o = _ORDERS[key]
    if mode == "bruhat":
        return o.bruhat_leq(u, v)
    if mode == "macdonald":
        return o.macdonald_leq(tuple(u), tuple(v))
    raise ValueError(f"unknown order mode {mode!r}")


def subgroup_omega(rs):
    return AffineWeyl(rs).omega()


def reduced_word(rs, g):
    return AffineWeyl(rs).reduced_word(g)
