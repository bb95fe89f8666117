"""Root system data for the families A, B, C, D, G2, GLn and CCn.

Roots are stored as covectors with exact rational coordinates, points of V
as vectors in the same coordinates, and the pairing <alpha, x> is the plain
dot product.  The invariant form on covectors is given by a Gram matrix, so
that families realized in non-orthonormal coordinates (G2 uses simple-root
coordinates) still get the right Laplacian and root lengths.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import flint


class RootSystemError(ValueError):
    pass


SUPPORTED = {"A": 6, "B": 6, "C": 6, "D": 6, "G2": 2, "GLn": 6, "CCn": 6}
CC_PARAMS = ("tau0", "tau0v", "taun", "taunv", "tau")


def vec(xs):
    return tuple(Fraction(x) for x in xs)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(s, a):
    return tuple(s * x for x in a)


def mat_vec(m, v):
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in m)


def solve_exact(rows, rhs):
    """Solve rows * c = rhs exactly (least-norm not needed: system consistent)."""
    A = flint.fmpq_mat([[flint.fmpq(Fraction(x).numerator, Fraction(x).denominator)
                         for x in r] for r in rows])
    m, n = A.nrows(), A.ncols()
    # normal equations keep things square when rows > cols
    At = A.transpose()
    b = flint.fmpq_mat([[flint.fmpq(Fraction(x).numerator, Fraction(x).denominator)]
                        for x in rhs])
    sol = (At * A).solve(At * b)
    out = tuple(Fraction(int(sol[i, 0].p), int(sol[i, 0].q)) for i in range(n))
    check = [sum(Fraction(rows[i][j]) * out[j] for j in range(n)) for i in range(m)]
    if any(c != Fraction(r) for c, r in zip(check, rhs)):
        return None
    return out


def _unit(m, i, s=1):
    v = [0] * m
    v[i] = s
    return tuple(v)


def _raw_roots(family, n):
    """Return (dim, roots, simple, gram) for a family."""
    if family in ("A", "GLn"):
        m = n + 1 if family == "A" else n
        roots = []
        for i in range(m):
            for j in range(m):
                if i != j:
                    v = [0] * m
                    v[i], v[j] = 1, -1
                    roots.append(tuple(v))
        simple = [vsub(_unit(m, i), _unit(m, i + 1)) for i in range(m - 1)]
        return m, roots, simple, None
    if family in ("B", "C", "D", "CCn"):
        m = n
        roots = []
        for i, j in combinations(range(m), 2):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0] * m
                    v[i], v[j] = si, sj
                    roots.append(tuple(v))
        if family == "B":
            roots += [_unit(m, i, s) for i in range(m) for s in (1, -1)]
        elif family in ("C", "CCn"):
            roots += [_unit(m, i, 2 * s) for i in range(m) for s in (1, -1)]
        simple = [vsub(_unit(m, i), _unit(m, i + 1)) for i in range(m - 1)]
        if family == "B":
            simple.append(_unit(m, m - 1))
        elif family in ("C", "CCn"):
            simple.append(_unit(m, m - 1, 2))
        else:
            simple.append(vadd(_unit(m, m - 2), _unit(m, m - 1)))
        gram = None
        if family == "C":
            gram = [[Fraction(1, 2) if i == j else Fraction(0) for j in range(m)]
                    for i in range(m)]
        return m, roots, simple, gram
    if family == "G2":
        pos = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)]
        roots = pos + [(-a, -b) for a, b in pos]
        gram = [[Fraction(2, 3), Fraction(-1)], [Fraction(-1), Fraction(2)]]
        return 2, roots, [(1, 0), (0, 1)], gram
    raise RootSystemError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RootSystemData:
    family: str
    rank: int
    dim: int
    roots: tuple
    positive: tuple
    simple: tuple
    gram: tuple
    coroots: dict
    coweights: tuple
    weights: tuple
    lattice: tuple
    weight_lattice: tuple
    k: dict
    orbits: tuple
    highest_root: tuple
    highest_short_root: tuple
    params: dict = field(default_factory=dict)

    # pairing helpers -----------------------------------------------------
    def form(self, a, b):
        """Invariant form on covectors."""
        return sum(a[i] * self.gram[i][j] * b[j]
                   for i in range(self.dim) for j in range(self.dim)
                   if self.gram[i][j])

    def to_vector(self, a):
        """Image of a covector in V under the invariant form."""
        return tuple(sum(self.gram[i][j] * a[j] for j in range(self.dim))
                     for i in range(self.dim))

    def coroot(self, a):
        return self.coroots[tuple(a)]

    def is_positive(self, a):
        return tuple(a) in self._posset

    def height(self, a):
        return sum(self._simple_coords(a))

    def simple_coords(self, a):
        return self._simple_coords(a)

    def k_of(self, a):
        return self.k[tuple(a)]

    def long_roots(self):
        top = max(self.form(a, a) for a in self.roots)
        return [a for a in self.roots if self.form(a, a) == top]

    def reflect(self, a, x):
        """s_a acting on a vector x in V."""
        return vsub(tuple(x), vscale(dot(a, x), self.coroot(a)))

    def reflect_cov(self, a, b):
        """s_a acting on a covector b."""
        return vsub(tuple(b), vscale(dot(b, self.coroot(a)), tuple(a)))

    def in_lattice(self, lam, basis=None):
        basis = self.lattice if basis is None else basis
        cols = [[basis[j][i] for j in range(len(basis))] for i in range(self.dim)]
        c = solve_exact(cols, tuple(lam))
        return c is not None and all(x.denominator == 1 for x in c)

    def in_weight_lattice(self, mu):
        return self.in_lattice(mu, self.weight_lattice)

    @property
    def n_simple(self):
        return len(self.simple)

    @property
    def rho_vector(self):
        return vscale(Fraction(1, 2), _vsum([self.to_vector(a) for a in self.positive], self.dim))

    def rho_k(self, k=None):
        """rho_k = 1/2 sum_{alpha>0} k_alpha alpha, as a covector."""
        kk = self.k if k is None else k
        out = [Fraction(0)] * self.dim
        for a in self.positive:
            for i in range(self.dim):
                out[i] += Fraction(1, 2) * kk[a] * a[i]
        return tuple(out)

    def __post_init__(self):
        object.__setattr__(self, "_posset", frozenset(self.positive))
        rows = [[s[i] for s in self.simple] for i in range(self.dim)]
        cache = {}

        def coords(a):
            a = tuple(a)
            if a not in cache:
                c = solve_exact(rows, a)
                if c is None:
                    raise RootSystemError(f"{a} not in the root span")
                cache[a] = c
            return cache[a]
        object.__setattr__(self, "_simple_coords", coords)

    def __hash__(self):
        return hash((self.family, self.rank))

    def __eq__(self, other):
        return (isinstance(other, RootSystemData) and self.family == other.family
                and self.rank == other.rank and self.k == other.k)

    def __repr__(self):
        return f"RootSystemData({self.family}{self.rank})"


def _vsum(vs, m):
    out = [Fraction(0)] * m
    for v in vs:
        for i in range(m):
            out[i] += v[i]
    return tuple(out)


def _orbits(roots, coroots):
    left = set(roots)
    orbits = []
    while left:
        seed = min(left)
        orb = {seed}
        frontier = [seed]
        while frontier:
            b = frontier.pop()
            for a in roots:
                c = vsub(b, vscale(dot(b, coroots[a]), a))
                c = tuple(int(x) if Fraction(x).denominator == 1 else x for x in c)
                if c not in orb:
                    orb.add(c)
                    frontier.append(c)
        orbits.append(tuple(sorted(orb)))
        left -= orb
    return tuple(orbits)


def _assign_k(family, roots, orbits, form, multiplicities):
    """Resolve the user multiplicity spec to a root -> value map."""
    lengths = {o: form(o[0], o[0]) for o in orbits}
    top = max(lengths.values())
    if family == "CCn":
        params = dict(multiplicities) if isinstance(multiplicities, dict) else {}
        k = {}
        for a in roots:
            k[a] = params.get("tau", 1) if form(a, a) == 2 else params.get("taun", 1)
        return k
    m = multiplicities
    k = {}
    if m is None:
        m = 0
    if isinstance(m, dict) and all(isinstance(key, tuple) for key in m):
        full = {tuple(key): v for key, v in m.items()}
        for o in orbits:
            vals = {full.get(a, full.get(tuple(-x for x in a))) for a in o}
            if len(vals) != 1 or None in vals:
                raise RootSystemError("multiplicity map is not constant on W-orbits")
            val = vals.pop()
            for a in o:
                k[a] = val
        return k
    for i, o in enumerate(orbits):
        if isinstance(m, dict):
            if i in m:
                val = m[i]
            elif lengths[o] == top and "long" in m:
                val = m["long"]
            elif lengths[o] != top and "short" in m:
                val = m["short"]
            elif "k" in m:
                val = m["k"]
            else:
                raise RootSystemError(f"no multiplicity given for orbit {i}")
        elif isinstance(m, (list, tuple)):
            if len(m) != len(orbits):
                raise RootSystemError("one multiplicity per orbit expected")
            val = m[i]
        else:
            val = m
        if not isinstance(val, str):
            val = Fraction(val) if not isinstance(val, complex) else val
        for a in o:
            k[a] = val
    return k


def build_root_system(family, rank, multiplicities=None):
    """Assemble and validate root data.

    multiplicities may be a scalar, a list with one value per W-orbit, a dict
    with 'long'/'short' keys, or an explicit root -> value dict.  For CCn pass
    a dict with keys tau0, tau0v, taun, taunv, tau.
    """
    if family not in SUPPORTED:
        raise RootSystemError(f"unknown family {family!r}")
    if family == "G2":
        if rank != 2:
            raise RootSystemError("G2 has rank 2")
    elif not (1 <= rank <= SUPPORTED[family]):
        raise RootSystemError(f"rank {rank} outside supported table for {family}")
    if family in ("B", "C") and rank < 2:
        raise RootSystemError(f"{family}{rank} needs rank >= 2")
    if family == "D" and rank < 3:
        raise RootSystemError("D needs rank >= 3")
    if family == "GLn" and rank < 2:
        raise RootSystemError("GLn needs n >= 2")
    m, roots, simple, gram = _raw_roots(family, rank)
    if gram is None:
        gram = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    gram = tuple(tuple(Fraction(x) for x in r) for r in gram)

    def form(a, b):
        return sum(a[i] * gram[i][j] * b[j] for i in range(m) for j in range(m))

    def to_vector(a):
        return tuple(sum(gram[i][j] * a[j] for j in range(m)) for i in range(m))

    roots = [tuple(r) for r in roots]
    coroots = {a: vscale(Fraction(2) / form(a, a), to_vector(a)) for a in roots}
    rows = [[s[i] for s in simple] for i in range(m)]
    positive = []
    for a in roots:
        c = solve_exact(rows, a)
        if c is None:
            raise RootSystemError("root outside simple span")
        if all(x >= 0 for x in c):
            positive.append(a)
        elif not all(x <= 0 for x in c):
            raise RootSystemError("root with mixed-sign simple coordinates")
    positive.sort(key=lambda a: (sum(solve_exact(rows, a)), tuple(-x for x in a)))
    orbits = _orbits(roots, coroots)
    k = _assign_k(family, roots, orbits, form, multiplicities)
    params = {}
    if family == "CCn":
        given = dict(multiplicities) if isinstance(multiplicities, dict) else {}
        unknown = set(given) - set(CC_PARAMS)
        if unknown:
            raise RootSystemError(f"unknown CCn parameters {sorted(unknown)}")
        params = {p: Fraction(given.get(p, 1)) if not isinstance(given.get(p, 1), str)
                  else given[p] for p in CC_PARAMS}

    def height(a):
        return sum(solve_exact(rows, a))
    phi = max(positive, key=lambda a: (height(a), a))
    lengths = {form(a, a) for a in roots}
    short = min(lengths)
    psi = max((a for a in positive if form(a, a) == short), key=lambda a: (height(a), a))

    # coweights and weights
    n = len(simple)
    cor_simple = [coroots[s] for s in simple]
    if family == "GLn":
        coweights = tuple(vec([1] * (j + 1) + [0] * (m - j - 1)) for j in range(m))
        weights = tuple(vec(_unit(m, j)) for j in range(m))
        lattice = tuple(vec(_unit(m, j)) for j in range(m))
        wlattice = lattice
    else:
        # b_j in the coroot span, omega_j in the root span
        cart = [[dot(simple[i], cor_simple[j]) for j in range(n)] for i in range(n)]
        coweights = []
        for j in range(n):
            c = solve_exact(cart, [Fraction(int(i == j)) for i in range(n)])
            coweights.append(_vsum([vscale(c[l], cor_simple[l]) for l in range(n)], m))
        cartT = [[cart[j][i] for j in range(n)] for i in range(n)]
        weights = []
        for j in range(n):
            c = solve_exact(cartT, [Fraction(int(i == j)) for i in range(n)])
            weights.append(_vsum([vscale(c[l], vec(simple[l])) for l in range(n)], m))
        coweights, weights = tuple(coweights), tuple(weights)
        if family == "CCn":
            lattice = tuple(vec(_unit(m, j)) for j in range(m))
            wlattice = lattice
        else:
            lattice, wlattice = coweights, weights
    rs = RootSystemData(
        family=family, rank=rank, dim=m, roots=tuple(roots), positive=tuple(positive),
        simple=tuple(tuple(s) for s in simple), gram=gram, coroots=coroots,
        coweights=coweights, weights=weights, lattice=lattice,
        weight_lattice=wlattice, k=k, orbits=orbits, highest_root=phi,
        highest_short_root=psi, params=params)
    _validate(rs)
    return rs


def _validate(rs):
    rootset = set(rs.roots)
    for a in rs.roots:
        for b in rs.roots:
            c = rs.reflect_cov(a, b)
            c = tuple(int(x) if x.denominator == 1 else x for x in c)
            if c not in rootset:
                raise RootSystemError("root system not closed under reflections")
    if rs.family != "GLn":
        for i, a in enumerate(rs.simple):
            for j, b in enumerate(rs.coweights):
                if dot(a, b) != int(i == j):
                    raise RootSystemError("coweights not dual to simple roots")
    for o in rs.orbits:
        if len({rs.k[a] for a in o}) != 1:
            raise RootSystemError("multiplicity map is not constant on W-orbits")


def with_multiplicities(rs, multiplicities):
    return build_root_system(rs.family, rs.rank, multiplicities)


def dual_root_system(rs):
    """R^v realised on the same space: roots are the coroot covectors 2a/<a,a>.

    Its coweight lattice is the weight lattice P of rs (as vectors), so the
    affine Weyl group of the result is W x| P.
    """
    if rs.family in ("GLn", "CCn"):
        raise RootSystemError("dual system only for reduced families")
    m = rs.dim

    def cv(a):
        return tuple(_norm(x) for x in vscale(Fraction(2) / rs.form(a, a), a))

    roots = tuple(cv(a) for a in rs.roots)
    positive = tuple(cv(a) for a in rs.positive)
    simple = tuple(cv(a) for a in rs.simple)
    coroots = {cv(a): tuple(_norm(x) for x in rs.to_vector(a)) for a in rs.roots}
    coweights = tuple(tuple(_norm(x) for x in rs.to_vector(w)) for w in rs.weights)
    ginv = _gram_inverse(rs.gram)
    weights = tuple(tuple(_norm(sum(ginv[i][j] * b[j] for j in range(m))) for i in range(m))
                    for b in rs.coweights)
    k = {cv(a): v for a, v in rs.k.items()}
    orbits = tuple(tuple(cv(a) for a in o) for o in rs.orbits)
    rows = [[s[i] for s in simple] for i in range(m)]

    def height(a):
        return sum(solve_exact(rows, a))
    phi = max(positive, key=lambda a: (height(a), a))
    short = min(rs.form(a, a) for a in roots)
    psi = max((a for a in positive if rs.form(a, a) == short), key=lambda a: (height(a), a))
    return RootSystemData(
        family=rs.family + "v", rank=rs.rank, dim=m, roots=roots, positive=positive,
        simple=simple, gram=rs.gram, coroots=coroots, coweights=coweights, weights=weights,
        lattice=coweights, weight_lattice=weights, k=k, orbits=orbits, highest_root=phi,
        highest_short_root=psi, params={})


def _norm(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def _gram_inverse(g):
    c = [solve_exact([list(r) for r in g], [Fraction(int(i == j)) for i in range(len(g))])
         for j in range(len(g))]
    return [[c[j][i] for j in range(len(g))] for i in range(len(g))]
