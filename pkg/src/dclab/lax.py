"""Induced representation, coset restriction, Lax matrices and classical flows.

The induced module M = Ind C(V) has basis indexed by W; an element of the
crossed product acts on it by an operator-valued |W| x |W| matrix whose
(u, w) entry is the group-free part of u^{-1} a w.  Restricting to
M' = e'M for a subgroup W' gives an r x r matrix, r = |W| / |W'|.
"""

import random
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from . import expr as E
from . import theta as th
from .crossed import (CrossedOp, ExprDomain, compose, classical_limit, poisson_bracket,
                      max_residual, _partials_p, _partials_x)
from .elliptic import (ell_cherednik_Y, ell_res_Y, specialise,
                       sigma_lin, _num)
from .roots import dot, _gram_inverse
from .weyl import identity, mat_inv, _normal

Z = "z"


class LaxError(ValueError):
    pass


class FlowPole(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# group bookkeeping


def ordered_elements(W, subset=None):
    """Elements sorted by length, then by reduced word (lexicographic)."""
    els = W.elements() if subset is None else subset
    return sorted(els, key=lambda w: (W.length(w), W.reduced_word(w)))


def coset_representatives(W, sub):
    """Minimal-length representatives of the right cosets W'u."""
    seen = set()
    reps = []
    for u in ordered_elements(W):
        if u in seen:
            continue
        reps.append(u)
        for h in sub:
            seen.add(W.mul(h, u))
    if len(reps) * len(sub) != W.order():
        raise LaxError("subset is not a subgroup of W")
    return reps


def stabilizer_cov(W, b):
    b = tuple(_normal(x) for x in b)
    return [w for w in W.elements() if W.act_cov(w, b) == b]


def _group_free_part(op):
    e = identity(op.m)
    return op.like({k: v for k, v in op.terms.items() if k[1] == e})


def _gop(a, w):
    return CrossedOp.group(a.flavor, a.dom, a.m, w)


def op_equal(a, b, tol=1e-9, points=5, seed=0):
    """Exact comparison for exact domains, sampled residual for Expr coefficients."""
    if isinstance(a.dom, ExprDomain):
        return max_residual(a, b, points=points, seed=seed) <= tol
    return (a - b).is_zero()


# ---------------------------------------------------------------------------
# induced representation


def induced_rep(a, W, elements=None):
    """rho(a) as a |W| x |W| list of group-free operators.

    Entry (u, w) is the group-free part of u^{-1} a w: for a term
    g D v the (vw, w) entry receives ((vw)^{-1}.g)((vw)^{-1} D (vw)).
    """
    els = elements or ordered_elements(W)
    idx = {w: i for i, w in enumerate(els)}
    n = len(els)
    zero = CrossedOp.zero(a.flavor, a.dom, a.m)
    M = [[zero] * n for _ in range(n)]
    inv = {w: mat_inv(w) for w in els}
    for j, w in enumerate(els):
        aw = compose(a, _gop(a, w))
        by_group = {}
        for (mono, u), v in aw.terms.items():
            by_group.setdefault(u, {})[(mono, u)] = v
        for u, terms in by_group.items():
            part = compose(_gop(a, inv[u]), a.like(terms))
            M[idx[u]][j] = M[idx[u]][j] + part
    return M


def mat_product(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = None
            for t in range(k):
                if A[i][t].is_zero() or B[t][j].is_zero():
                    continue
                c = compose(A[i][t], B[t][j])
                s = c if s is None else s + c
            row.append(s if s is not None else A[0][0].like({}))
        out.append(row)
    return out


def multiplicativity_residual(a, b, W, tol=1e-9):
    """Checks rho(ab) = rho(a) rho(b); returns the list of mismatched entries."""
    lhs = induced_rep(compose(a, b), W)
    rhs = mat_product(induced_rep(a, W), induced_rep(b, W))
    bad = []
    for i, row in enumerate(lhs):
        for j, x in enumerate(row):
            if not op_equal(x, rhs[i][j], tol):
                bad.append((i, j))
    return bad


# ---------------------------------------------------------------------------
# restriction to M' = e'M


@dataclass
class LaxMatrix:
    entries: list
    reps: list
    subgroup: list
    group_order: int
    quantum: bool = True
    kind: str = "operator"
    z: str = Z
    meta: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.entries)

    def __post_init__(self):
        if self.size * len(self.subgroup) != self.group_order:
            raise LaxError("r |W'| != |W|")

    def entry(self, i, j):
        return self.entries[i][j]

    def power(self, k):
        P = self.entries
        for _ in range(k - 1):
            P = mat_product(P, self.entries)
        return P

    def trace_power(self, k):
        P = self.power(k)
        tot = P[0][0]
        for i in range(1, self.size):
            tot = tot + P[i][i]
        return tot

    def evaluate(self, x, p, z, params=None):
        """Numeric matrix of a classical Lax matrix at (x, p, z)."""
        if self.quantum:
            raise LaxError("numeric evaluation needs a classical Lax matrix")
        ev = PhaseEvaluator(self.entries[0][0], params)
        env = ev.env(x, z)
        return np.array([[ev.value(e, env, p) for e in row] for row in self.entries], dtype=complex)


def restrict_matrix(rho, els, sub, reps, W):
    """L_{u, u'} = sum_{h in W'} rho_{u, h u'} on the coset basis."""
    idx = {w: i for i, w in enumerate(els)}
    out = []
    for u in reps:
        row = []
        for u2 in reps:
            s = None
            for h in sub:
                x = rho[idx[u]][idx[W.mul(h, u2)]]
                s = x if s is None else s + x
            row.append(s)
        out.append(row)
    return out


def preserves_subspace(rho, els, sub, reps, W, tol=1e-9):
    """M' is preserved iff the restricted rows agree across each coset.

    Returns the first offending (h, u, u') or None.
    """
    idx = {w: i for i, w in enumerate(els)}
    gens = [h for h in sub if h != W.e]
    for h in gens[:max(1, len(gens))]:
        for u in reps:
            hu = W.mul(h, u)
            for u2 in reps:
                cols = [idx[W.mul(g, u2)] for g in sub]
                a = _sum([rho[idx[u]][c] for c in cols])
                b = _sum([rho[idx[hu]][c] for c in cols])
                if not op_equal(a, b, tol):
                    return (h, u, u2)
    return None


def _sum(xs):
    s = xs[0]
    for x in xs[1:]:
        s = s + x
    return s


def coset_restrict(a, W, sub, check=True, tol=1e-9, quantum=True, kind="operator"):
    """Action of a on e'M in the coset basis f = e' sum_u u f_u.

    check: verify that a preserves M' (implied by W'-invariance).
    """
    els = ordered_elements(W)
    sub = list(sub)
    reps = coset_representatives(W, sub)
    rho = induced_rep(a, W, els)
    if check and len(sub) > 1:
        bad = preserves_subspace(rho, els, sub, reps, W, tol)
        if bad is not None:
            raise LaxError(f"operator does not preserve e'M (witness h={bad[0]})")
    L = restrict_matrix(rho, els, sub, reps, W)
    return LaxMatrix(L, reps, sub, W.order(), quantum=quantum, kind=kind)


def invariance_residual(a, sub, points=5, seed=0):
    """max_h || h a h^{-1} - a || over the subgroup."""
    worst = 0.0
    for h in sub:
        g = _gop(a, h)
        gi = _gop(a, mat_inv(h))
        d = compose(compose(g, a), gi)
        if isinstance(a.dom, ExprDomain):
            worst = max(worst, max_residual(d, a, points=points, seed=seed))
        elif not (d - a).is_zero():
            return float("inf")
    return worst


# ---------------------------------------------------------------------------
# Lax matrices for the elliptic systems


def _z_expr():
    return E.sym(Z)


def lax_dunkl(ctx, b, classical=False):
    """y_xi(lam) with xi = b (as a vector), lam = z b; R'-terms are absent."""
    rs, m = ctx.rs, ctx.m
    b = tuple(_normal(x) for x in b)
    xi = rs.to_vector(b)
    fl = "classical-differential" if classical else "differential"
    dom = ctx.dom
    terms = dict(CrossedOp.derivative(fl, dom, m, xi,
                                      coef=None if classical else E.const(_num(ctx.hbar))).terms)
    zero = tuple(0 for _ in range(m))
    z = _z_expr()
    for a in rs.positive:
        s = dot(a, xi)
        kv = ctx.k_root[a]
        if s == 0 or kv == 0:
            continue
        mu = E.mul(E.const(dot(rs.coroot(a), b)), z)
        c = E.mul(E.const(-kv * s), sigma_lin(mu, a))
        key = (zero, ctx.W.reflection(a))
        terms[key] = terms[key] + c if key in terms else c
    return CrossedOp(fl, dom, m, terms)


def lax_matrix(kind, ctx, b, subgroup=None, check=True, tol=1e-9, z_check=0.2371):
    """Quantum and classical Lax matrices with spectral symbol z.

    kind 'elliptic-differential': rho(y)|M', y = y_b(z b).
    kind 'elliptic-difference': rho(Y^b)|M' with xi = -rho_k + z b.
    Returns (quantum LaxMatrix, classical LaxMatrix).
    """
    # a private context whose domain assigns a generic z for sampled checks
    ctx = ctx.with_spectral(ctx.spectral)
    ctx.dom.syms[Z] = z_check
    W = ctx.W
    b = tuple(_normal(x) for x in b)
    stab = stabilizer_cov(W, b) if kind == "elliptic-differential" else W.stabilizer(b)
    if subgroup is not None:
        if sorted(subgroup) != sorted(stab):
            raise LaxError("subgroup is not the stabiliser of b")
    sub = stab
    if kind == "elliptic-differential":
        yq = lax_dunkl(ctx, b)
        yc = lax_dunkl(ctx, b, classical=True)
        Lq = coset_restrict(yq, W, sub, check=check, tol=tol, kind=kind)
        Lc = coset_restrict(yc, W, sub, check=False, quantum=False, kind=kind)
        return Lq, Lc
    if kind == "elliptic-difference":
        base = specialise(ctx)
        z = _z_expr()
        Gi = _gram_inverse(ctx.rs.gram)
        bc = tuple(_normal(sum(Gi[i][j] * b[j] for j in range(ctx.m))) for i in range(ctx.m))
        xi = tuple(E.add(E.const(x), E.mul(E.const(bb), z)) if bb else E.const(x)
                   for x, bb in zip(base.spectral, bc))
        c2 = base.with_spectral(xi)
        Y = ell_cherednik_Y(c2, b)
        Lq = coset_restrict(Y, W, sub, check=check, tol=tol, kind=kind)
        ent = [[classical_limit(x) for x in row] for row in Lq.entries]
        Lc = LaxMatrix(ent, Lq.reps, sub, W.order(), quantum=False, kind=kind)
        return Lq, Lc
    raise LaxError(f"unknown Lax kind {kind!r}")


def classical_cm_hamiltonian(ctx):
    """<p, p> - sum_{a>0} k_a^2 <a, a> wp(<a, x>)."""
    m, G = ctx.m, ctx.rs.gram
    e = identity(m)
    zero = tuple(0 for _ in range(m))
    terms = {}
    for i in range(m):
        for j in range(m):
            if G[i][j]:
                mono = tuple((t == i) + (t == j) for t in range(m))
                v = E.const(G[i][j])
                terms[(mono, e)] = terms[(mono, e)] + v if (mono, e) in terms else v
    pot = [E.mul(E.const(-ctx.k_root[a] ** 2 * ctx.rs.form(a, a)), E.wp(E.lin(a)))
           for a in ctx.rs.positive if ctx.k_root[a]]
    if pot:
        terms[(zero, e)] = E.add(*pot)
    return CrossedOp("classical-differential", ctx.dom, m, terms)


def classical_difference_hamiltonian(ctx, b):
    """Classical limit of L_b = Res Y^b at xi = -rho_k."""
    return classical_limit(ell_res_Y(specialise(ctx), b))


# ---------------------------------------------------------------------------
# numeric evaluation on phase space


class PhaseEvaluator:
    """Evaluates group-free classical operators at (x, p, z)."""

    def __init__(self, op, params=None, mode=None):
        self.flavor = op.flavor
        self.beta = op.beta
        self.params = params or op.dom.params
        self.mode = mode or self.params.mode
        self.c = 0

    def env(self, x, z=None):
        syms = {} if z is None else {Z: z}
        return E.Env(x, 0, syms, self.mode, self.params)

    def value(self, op, env, p):
        tot = 0
        for (mono, w), coef in op.terms.items():
            c = E.evaluate(coef, env)
            if self.flavor == "classical-differential":
                mval = 1
                for pi, k in zip(p, mono):
                    if k:
                        mval = mval * pi ** k
            else:
                s = sum(k * pi for pi, k in zip(p, mono) if k)
                mval = mpmath.exp(self.beta * s) if self.mode == "mp" else np.exp(complex(self.beta * s))
            tot = tot + c * mval
        return complex(tot)


def spectral_invariants(L, max_power=3, points=30, seed=0, z_range=(0.15, 0.35), params=None):
    """h_k = tr L^k, k <= max_power, and the largest sampled |{h_a, h_b}|."""
    if L.quantum:
        raise LaxError("spectral invariants need a classical Lax matrix")
    hs = {k: L.trace_power(k) for k in range(1, max_power + 1)}
    rng = random.Random(seed)
    ev = PhaseEvaluator(L.entries[0][0], params)
    m = L.entries[0][0].m
    brackets = {}
    exact_zero = True
    for a in range(1, max_power + 1):
        for b in range(a + 1, max_power + 1):
            brackets[(a, b)] = poisson_bracket(hs[a], hs[b])
            exact_zero = exact_zero and brackets[(a, b)].is_zero()
    worst = 0.0
    done = 0
    tries = 0
    while done < points and brackets:
        tries += 1
        if tries > 20 * points:
            raise LaxError("all sampled points singular")
        x = [rng.uniform(-0.5, 0.5) for _ in range(m)]
        p = [rng.uniform(-1, 1) for _ in range(m)]
        z = rng.uniform(*z_range)
        try:
            env = ev.env(x, z)
            vals = {k: abs(ev.value(B, env, p)) for k, B in brackets.items()}
        except (ZeroDivisionError, th.EllipticError):
            continue
        done += 1
        worst = max([worst] + list(vals.values()))
    return {"h": hs, "brackets": brackets, "max_residual": worst, "exact_zero": exact_zero}


# ---------------------------------------------------------------------------
# classical flows


def _compile_gradient(H):
    return _partials_x(H), _partials_p(H)


def integrate_flow(H, L, x0, p0, z, T, dt, params=None):
    """RK4 for x' = dH/dp, p' = -dH/dx; eigenvalues of L(z) along the path.

    Eigenvalues are tracked by optimal assignment to the previous step, and
    drift is the largest deviation from the initial spectrum.  A pole on the
    path stops the run with status 'pole'.
    """
    if L.quantum:
        raise LaxError("flows need a classical Lax matrix")
    params = params or th.EllipticParams(H.dom.params.tau_ell, mode="float")
    ev = PhaseEvaluator(H, params)
    Hx, Hp = _compile_gradient(H)
    m = H.m

    def rhs(y):
        x, p = y[:m], y[m:]
        env = ev.env(list(x), z)
        dx = [ev.value(op, env, p) for op in Hp]
        dp = [-ev.value(op, env, p) for op in Hx]
        out = np.array(dx + dp, dtype=complex)
        if not np.all(np.isfinite(out)):
            raise FlowPole("non-finite vector field")
        return out

    def observe(y):
        x, p = y[:m], y[m:]
        env = ev.env(list(x), z)
        Lm = np.array([[ev.value(e, env, p) for e in row] for row in L.entries], dtype=complex)
        if not np.all(np.isfinite(Lm)):
            raise FlowPole("non-finite Lax matrix")
        return np.linalg.eigvals(Lm), ev.value(H, env, p)

    y = np.array(list(x0) + list(p0), dtype=complex)
    steps = int(round(T / dt))
    try:
        with np.errstate(over="raise", invalid="raise"):
            ev0, H0 = observe(y)
    except (FlowPole, ZeroDivisionError, FloatingPointError, th.EllipticError) as exc:
        return {"status": "pole", "pole": {"time": 0.0, "reason": str(exc)}, "times": np.array([]),
                "eigenvalues": np.zeros((0, L.size)), "drift": float("nan"),
                "energy_drift": float("nan"), "trajectory": np.zeros((0, 2 * m)), "energies": []}
    prev = ev0
    times, spectra, energies, traj = [0.0], [ev0], [H0], [y.copy()]
    status = "ok"
    pole_at = None
    for s in range(steps):
        try:
            with np.errstate(over="raise", invalid="raise"):
                k1, k2, k3, k4, y_new, cur, Hc = _rk4_step(rhs, observe, y, dt)
        except (FlowPole, ZeroDivisionError, FloatingPointError, th.EllipticError) as exc:
            status = "pole"
            pole_at = {"time": s * dt, "reason": str(exc)}
            break
        cost = np.abs(prev[:, None] - cur[None, :])
        _, col = linear_sum_assignment(cost)
        cur = cur[col]
        y = y_new
        prev = cur
        times.append((s + 1) * dt)
        spectra.append(cur)
        energies.append(Hc)
        traj.append(y.copy())
    spectra = np.array(spectra)
    drift = float(np.max(np.abs(spectra - spectra[0]))) if len(spectra) > 1 else 0.0
    energy = float(np.max(np.abs(np.array(energies) - energies[0])))
    return {"status": status, "pole": pole_at, "times": np.array(times), "eigenvalues": spectra,
            "drift": drift, "energy_drift": energy, "trajectory": np.array(traj), "energies": energies}


def _rk4_step(rhs, observe, y, dt):
    k1 = rhs(y)
    k2 = rhs(y + dt / 2 * k1)
    k3 = rhs(y + dt / 2 * k2)
    k4 = rhs(y + dt * k3)
    y_new = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    cur, Hc = observe(y_new)
    return k1, k2, k3, k4, y_new, cur, Hc


def drift_order(H, L, x0, p0, z, T, dt, params=None):
    """Drift at dt and dt/2 and the observed order log2(ratio)."""
    r1 = integrate_flow(H, L, x0, p0, z, T, dt, params)
    r2 = integrate_flow(H, L, x0, p0, z, T, dt / 2, params)
    d1, d2 = r1["drift"], r2["drift"]
    order = float(np.log2(d1 / d2)) if d1 > 0 and d2 > 0 else float("inf")
    return {"drift": d1, "drift_half": d2, "order": order}


def isospectral_rate(H, L, points=10, seed=0, z_range=(0.15, 0.35), params=None, box=0.5):
    """Largest relative |d/dt tr L^k| under the flow of H at random (x, p, z).

    d/dt tr L^k = k tr(L^{k-1} Ldot), Ldot = sum_i dL/dx_i xdot_i + dL/dp_i pdot_i;
    each value is divided by k |L|^{k-1} |Ldot|.
    """
    if L.quantum:
        raise LaxError("needs a classical Lax matrix")
    params = params or H.dom.params
    ev = PhaseEvaluator(H, params)
    Hx, Hp = _compile_gradient(H)
    r = L.size
    dLx = [[_partials_x(e) for e in row] for row in L.entries]
    dLp = [[_partials_p(e) for e in row] for row in L.entries]
    m = H.m
    rng = random.Random(seed)
    worst = 0.0
    done = tries = 0
    while done < points:
        tries += 1
        if tries > 20 * points:
            raise LaxError("all sampled points singular")
        x = [rng.uniform(-box, box) for _ in range(m)]
        p = [rng.uniform(-1, 1) for _ in range(m)]
        z = rng.uniform(*z_range)
        try:
            env = ev.env(x, z)
            xd = [ev.value(o, env, p) for o in Hp]
            pd = [-ev.value(o, env, p) for o in Hx]
            Lm = np.array([[ev.value(e, env, p) for e in row] for row in L.entries])
            Ld = np.array([[sum(ev.value(dLx[i][j][t], env, p) * xd[t] + ev.value(dLp[i][j][t], env, p) * pd[t]
                                for t in range(m)) for j in range(r)] for i in range(r)])
        except (ZeroDivisionError, th.EllipticError):
            continue
        done += 1
        nL, nD = np.linalg.norm(Lm), np.linalg.norm(Ld)
        P = np.eye(r, dtype=complex)
        for k in range(1, r + 1):
            val = k * np.trace(P @ Ld)
            scale = k * nL ** (k - 1) * nD
            if scale:
                worst = max(worst, abs(val) / scale)
            P = P @ Lm
    return worst


def ruijsenaars_momenta(ctx, x0, theta):
    """GL_n momenta p with e^{p_i} prod_j sigma_k(x_ij) = e^{theta_i} prod_j (sigma_k(x_ij) sigma_k(x_ji))^{1/2}.

    The shift p = theta + grad Phi(x) is canonical; for imaginary k and real
    theta, x the physical trajectory of -i H stays real and away from poles.
    """
    k = next(iter(ctx.k_root.values()))
    n = len(x0)
    params = ctx.params
    out = []
    with mpmath.workprec(params.bits):
        for i in range(n):
            s = 0
            for j in range(n):
                if j != i:
                    a = th.eval_sigma("sigma", k, x0[i] - x0[j], params)
                    b = th.eval_sigma("sigma", k, x0[j] - x0[i], params)
                    s += mpmath.log(b / a) / 2
            out.append(complex(theta[i] + s))
    return out
