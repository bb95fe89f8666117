"""dclab command line: verification suites, computed artifacts and Lax flows.

    dclab verify|compute|flow --config <path> [--seed N] [--trials N] [--tol X] [--out <path>]

The config is a JSON object.  Exact numbers are "p/q" strings, complex
numbers are [re, im] pairs.  Every report is a single JSON document that
embeds the resolved config and the library version; with a fixed seed the
output is byte-identical between runs.
"""

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from itertools import product

import numpy as np

from . import __version__
from . import expr as E
from . import theta as th
from .crossed import commutator, equal_probabilistic, max_residual
from .roots import build_root_system, RootSystemError
from .weyl import weyl_group

SUITES = ("dunkl-commutativity", "cherednik-relations", "hecke-braid", "macdonald-eigen",
          "yang-baxter", "elliptic-commutativity", "qkz-cocycle")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# number and config handling


def num(v):
    """'p/q' -> Fraction, [re, im] -> complex, int -> Fraction, float kept."""
    if isinstance(v, bool):
        raise ConfigError("booleans are not numbers")
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, (list, tuple)) and len(v) == 2:
        re_, im_ = (float(num(x)) for x in v)
        return complex(re_, im_) if im_ else re_
    raise ConfigError(f"cannot read number {v!r}")


def num_or_map(v):
    if isinstance(v, dict):
        return {key: num(x) for key, x in v.items()}
    return num(v)


def enc(v):
    """JSON-safe encoding: exact -> 'p/q' (integers plain), complex -> [re, im]."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, (float, np.floating)):
        return float(v) if np.isfinite(v) else None
    if isinstance(v, (complex, np.complexfloating)):
        return [enc(float(v.real)), enc(float(v.imag))]
    if isinstance(v, dict):
        return {str(key): enc(x) for key, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [enc(x) for x in v]
    try:
        import mpmath
        if isinstance(v, (mpmath.mpf, mpmath.mpc)):
            return enc(complex(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def load_config(args):
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cfg = dict(cfg)
    cfg["command"] = args.command
    for key in ("seed", "trials", "tol"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    cfg.setdefault("seed", 0)
    cfg.setdefault("trials", 20)
    cfg.setdefault("tol", 1e-9)
    if not cfg["tol"] > 0:
        raise ConfigError("tol must be positive")
    if cfg["trials"] < 1:
        raise ConfigError("trials must be >= 1")
    return cfg


def _rs(cfg, k=None):
    fam = cfg.get("family")
    if fam is None or "rank" not in cfg:
        raise ConfigError("family and rank are required")
    return build_root_system(fam, int(cfg["rank"]), k)


def _params(cfg):
    return {key: num_or_map(v) for key, v in cfg.get("params", {}).items()}


def _random_k(rng):
    return Fraction(rng.randint(1, 9), rng.randint(2, 11))


def _elliptic_params(cfg):
    tau = num(cfg.get("tau_ell", [0, 1]))
    return th.EllipticParams(complex(tau))


# ---------------------------------------------------------------------------
# report records


def _check(name, ok, residual=0.0, witness=None):
    rec = {"check": name, "status": "pass" if ok else "fail", "residual": float(residual)}
    if not ok:
        rec["witness"] = witness
    return rec


def _verdict_check(name, v):
    return _check(name, bool(v), v.residual, v.witness)


# ---------------------------------------------------------------------------
# verify suites


def suite_dunkl(cfg, rng):
    from .rational import DunklParams, basis_dunkl, dunkl
    p = _params(cfg)
    k = p.get("k", _random_k(rng))
    hbar = p.get("hbar", Fraction(1))
    rs = _rs(cfg, k)
    P = DunklParams(rs, hbar, "y")
    ys = basis_dunkl(P)
    if cfg.get("mutate"):
        e0 = tuple(int(j == 0) for j in range(rs.dim))
        ys[0] = dunkl(P, e0, perturb=rs.positive[0])
    out = []
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            v = equal_probabilistic(commutator(ys[i], ys[j]), None, trials=cfg["trials"], tol=cfg["tol"], rng=rng)
            out.append(_verdict_check(f"[y_{i + 1}, y_{j + 1}] = 0", v))
    return out


def suite_cherednik(cfg, rng):
    from .rational import check_cherednik_relations
    p = _params(cfg)
    k = p.get("k", _random_k(rng))
    rs = _rs(cfg, k)
    mut = rs.positive[0] if cfg.get("mutate") else None
    rep = check_cherednik_relations(rs, hbar=p.get("hbar", 1), samples=int(cfg.get("samples", 2)),
                                    seed=cfg["seed"], mutate=mut, trials=cfg["trials"])
    return [_check(c["relation"], c["ok"], 0.0 if c["ok"] else 1.0, c["witness"]) for c in rep["checks"]]


def _hecke_ctx(cfg, need_q=False):
    from .hecke import HeckeContext
    p = _params(cfg)
    tau = p.get("tau", Fraction(2, 3))
    q = p.get("q")
    if need_q and q is None:
        q = Fraction(5, 7)
    return HeckeContext(_rs(cfg), tau=tau, q=q)


def suite_hecke(cfg, rng):
    from .hecke import relation_suite
    ctx = _hecke_ctx(cfg)
    rep = relation_suite(ctx, trials=cfg["trials"], seed=cfg["seed"],
                         y_pairs=cfg.get("y_pairs", True), mutate=bool(cfg.get("mutate")))
    return [_check(c["relation"], c["ok"], 0.0 if c["ok"] else 1.0, c["witness"]) for c in rep["checks"]]


def _default_mus(ctx, degree):
    n = ctx.m
    return [mu for mu in product(range(degree + 1), repeat=n) if sum(mu) <= degree]


def suite_macdonald(cfg, rng):
    from .macdonald import nonsym_macdonald, sym_macdonald, apply_Y, lower_set, DegenerateSpectrum
    from .weyl import Orders
    ctx = _hecke_ctx(cfg, need_q=True)
    if "mus" in cfg:
        mus = [tuple(Fraction(x) for x in mu) for mu in cfg["mus"]]
    elif ctx.rs.family == "GLn":
        mus = _default_mus(ctx, int(cfg.get("degree", 2)))
    else:
        raise ConfigError("mus is required outside GLn")
    shift = 1 if cfg.get("mutate") else 0
    out = []
    o = Orders(ctx.rs)
    for mu in mus:
        name = "E_(" + ",".join(str(x) for x in mu) + ")"
        try:
            E_, gam = nonsym_macdonald(ctx, mu)
        except DegenerateSpectrum as exc:
            out.append(_check(name, False, 1.0, {"error": str(exc)}))
            continue
        for g, val in gam.items():
            lhs = apply_Y(ctx, g, E_)
            rhs = E_.scale(val + shift)
            d = lhs - rhs
            ok = d.is_zero()
            wit = None
            res = 0.0
            if not ok:
                key, c = sorted(d.terms.items())[0]
                wit = {"monomial": [str(x) for x in key], "difference": str(c)}
                res = float(max(abs(v) for v in d.terms.values()))
            out.append(_check(f"Y^{_vec(g)} {name} = gamma {name}", ok, res, wit))
        low = set(lower_set(ctx, mu))
        tri = set(E_.support()) <= low
        out.append(_check(f"{name} triangular", tri, 0.0 if tri else 1.0,
                          None if tri else {"outside": [_vec(v) for v in sorted(set(E_.support()) - low)]}))
        if tuple(o.dominant(mu)) == tuple(mu):
            try:
                P, ev = sym_macdonald(ctx, mu)
                out.append(_check(f"P_{_vec(mu)} invariant eigenfunction", True))
            except Exception as exc:  # contract failures are reported, not raised
                out.append(_check(f"P_{_vec(mu)} invariant eigenfunction", False, 1.0, {"error": str(exc)}))
    return out


def _vec(v):
    return "(" + ",".join(str(Fraction(x)) for x in v) + ")"


def _ell_ctx(cfg, rng, rs=None):
    from .elliptic import EllipticContext
    p = _params(cfg)
    rs = rs or _rs(cfg)
    k = p.get("k", _random_k(rng))
    spectral = cfg.get("spectral")
    if spectral is not None:
        spectral = tuple(num(x) for x in spectral)
    else:
        spectral = tuple(Fraction(rng.randint(1, 97), 101) for _ in range(rs.dim))
    return EllipticContext(rs, k=k, params=_elliptic_params(cfg), spectral=spectral)


def suite_yang_baxter(cfg, rng):
    from .elliptic import yang_baxter_residual, unitarity_residual
    if cfg.get("family", "GLn") != "GLn":
        raise ConfigError("yang-baxter runs on GLn")
    cfg.setdefault("family", "GLn")
    ctx = _ell_ctx(cfg, rng)
    n = ctx.m
    tol = cfg["tol"]
    pts = min(cfg["trials"], 10)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                r = yang_baxter_residual(ctx, i, j, k, points=pts, seed=cfg["seed"])
                if cfg.get("mutate"):
                    r += 1.0
                out.append(_check(f"R_{i + 1}{j + 1} R_{i + 1}{k + 1} R_{j + 1}{k + 1} = R_{j + 1}{k + 1} R_{i + 1}{k + 1} R_{i + 1}{j + 1}",
                                  r < tol, r, {"residual": r}))
    for a in ctx.rs.positive:
        r = unitarity_residual(ctx, a, points=pts, seed=cfg["seed"])
        out.append(_check(f"R({_vec(a)}) R(-{_vec(a)}) scalar", r < tol, r, {"residual": r}))
    return out


def suite_elliptic(cfg, rng):
    from .elliptic import basis_elliptic_dunkl, ell_cherednik_Y
    ctx = _ell_ctx(cfg, rng)
    tol = cfg["tol"]
    pts = min(cfg["trials"], 10)
    ys = basis_elliptic_dunkl(ctx)
    out = []
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            r = max_residual(commutator(ys[i], ys[j]), points=pts, seed=cfg["seed"])
            if cfg.get("mutate"):
                r += 1.0
            out.append(_check(f"[y_{i + 1}, y_{j + 1}] = 0", r < tol, r, {"residual": r}))
    if cfg.get("cherednik"):
        gens = [tuple(x) for x in ctx.rs.coweights]
        Ys = [ell_cherednik_Y(ctx, b) for b in gens]
        for i in range(len(Ys)):
            for j in range(i + 1, len(Ys)):
                r = max_residual(commutator(Ys[i], Ys[j]), points=pts, seed=cfg["seed"])
                out.append(_check(f"[Y^{_vec(gens[i])}, Y^{_vec(gens[j])}] = 0", r < tol, r, {"residual": r}))
    return out


def suite_qkz(cfg, rng):
    from .hecke import qkz_cocycle, character_module, regular_module_A1
    ctx = _hecke_ctx(cfg, need_q=True)
    names = cfg.get("modules")
    if names is None:
        names = ["trivial", "sign"]
        if ctx.rs.family == "A" and ctx.rs.rank == 1:
            names.append("regular-A1")
    makers = {"trivial": lambda: character_module(ctx, 1), "sign": lambda: character_module(ctx, -1),
              "regular-A1": lambda: regular_module_A1(ctx)}
    out = []
    for nm in names:
        if nm not in makers:
            raise ConfigError(f"unknown module {nm!r}")
        rep = qkz_cocycle(ctx, makers[nm](), pairs=int(cfg.get("pairs", 10)), words=int(cfg.get("words", 10)),
                          seed=cfg["seed"])
        for c in rep["checks"]:
            r = c["residual"] + (1.0 if cfg.get("mutate") else 0.0)
            ok = c["ok"] and r < 1e-12
            out.append(_check(f"{nm}: {c['check']}", ok, r, {"residual": r}))
    return out


SUITE_FUNCS = {
    "dunkl-commutativity": suite_dunkl,
    "cherednik-relations": suite_cherednik,
    "hecke-braid": suite_hecke,
    "macdonald-eigen": suite_macdonald,
    "yang-baxter": suite_yang_baxter,
    "elliptic-commutativity": suite_elliptic,
    "qkz-cocycle": suite_qkz,
}


def cmd_verify(cfg):
    suite = cfg.get("suite")
    if suite not in SUITE_FUNCS:
        return 2, {"status": "error", "error": f"unknown suite {suite!r}", "suites": list(SUITES)}
    rng = random.Random(cfg["seed"])
    checks = SUITE_FUNCS[suite](cfg, rng)
    ok = all(c["status"] == "pass" for c in checks)
    worst = max((c["residual"] for c in checks), default=0.0)
    return (0 if ok else 1), {"status": "pass" if ok else "fail", "suite": suite, "checks": checks,
                              "max_residual": worst}


# ---------------------------------------------------------------------------
# compute


def coef_str(c):
    if isinstance(c, E.Expr):
        return E.render(c)
    return str(c)


def serialize_op(op, W):
    """[{weyl_word, index, coefficient}] sorted by (word, index)."""
    rows = []
    for (mono, w), c in op.terms.items():
        rows.append({"weyl_word": list(W.reduced_word(w)), "index": [str(Fraction(x)) for x in mono],
                     "coefficient": coef_str(c)})
    rows.sort(key=lambda r: (len(r["weyl_word"]), r["weyl_word"], r["index"]))
    return {"flavor": op.flavor, "terms": rows}


def _laurent_json(f):
    return {",".join(str(Fraction(x)) for x in key): str(Fraction(v)) for key, v in sorted(f.terms.items())}


def compute_macdonald(cfg):
    from .macdonald import nonsym_macdonald, sym_macdonald
    cfg.setdefault("family", "GLn")
    ctx = _hecke_ctx(cfg, need_q=True)
    mu = tuple(Fraction(x) for x in cfg["mu"])
    if cfg.get("symmetric"):
        P, ev = sym_macdonald(ctx, mu)
        return {"object": "macdonald-symmetric", "mu": [str(x) for x in mu], "coefficients": _laurent_json(P),
                "eigenvalue": str(ev)}
    E_, gam = nonsym_macdonald(ctx, mu)
    return {"object": "macdonald-nonsymmetric", "mu": [str(x) for x in mu], "coefficients": _laurent_json(E_),
            "eigenvalues": {_vec(g): str(v) for g, v in gam.items()}}


def compute_hamiltonian(cfg):
    kind = cfg.get("kind")
    rng = random.Random(cfg["seed"])
    if kind == "ruijsenaars":
        from .hecke import ruijsenaars
        cfg.setdefault("family", "GLn")
        ctx = _hecke_ctx(cfg)
        op = ruijsenaars(ctx, int(cfg.get("r", 1)))
        W = ctx.W
    elif kind == "macdonald-operator":
        from .hecke import macdonald_operator
        ctx = _hecke_ctx(cfg)
        op, typ = macdonald_operator(ctx, tuple(Fraction(x) for x in cfg["b"]))
        W = ctx.W
    elif kind == "van-diejen":
        from .elliptic import explicit_hamiltonian, specialise
        n = int(cfg.get("n", cfg.get("rank", 2)))
        cfg["family"], cfg["rank"] = "CCn", n
        c = _cc_couplings(cfg)
        from .elliptic import EllipticContext
        ctx = EllipticContext(_rs(cfg), params=_elliptic_params(cfg), couplings=c)
        op = explicit_hamiltonian(specialise(ctx), tuple(int(i == 0) for i in range(n)))
        W = ctx.W
    elif kind == "elliptic-ruijsenaars":
        from .elliptic import gl_ruijsenaars
        cfg.setdefault("family", "GLn")
        ctx = _ell_ctx(cfg, rng)
        op = gl_ruijsenaars(ctx, int(cfg.get("r", 1)))
        W = ctx.W
    elif kind == "calogero-moser":
        from .rational import DunklParams, cm_explicit
        p = _params(cfg)
        rs = _rs(cfg, p.get("k", Fraction(1, 3)))
        op = cm_explicit(DunklParams(rs, p.get("hbar", 1), "y"))
        W = weyl_group(rs)
    else:
        raise ConfigError(f"unknown hamiltonian kind {kind!r}")
    return {"object": "hamiltonian", "kind": kind, **serialize_op(op, W)}


def _cc_couplings(cfg):
    p = cfg.get("couplings", {})
    d = {"mu": Fraction(1, 5), "nu": Fraction(2, 7), "nubar": Fraction(3, 11),
         "g": [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)],
         "gbar": [Fraction(1, 6), Fraction(1, 7), Fraction(1, 8), Fraction(1, 9)]}
    for key, v in p.items():
        d[key] = [num(x) for x in v] if isinstance(v, list) and key in ("g", "gbar") else num(v)
    return d


def compute_operator(cfg):
    kind = cfg.get("kind")
    rng = random.Random(cfg["seed"])
    if kind == "dunkl":
        from .rational import DunklParams, dunkl
        p = _params(cfg)
        rs = _rs(cfg, p.get("k", Fraction(1, 3)))
        xi = tuple(num(x) for x in cfg.get("xi", [1] + [0] * (rs.dim - 1)))
        op = dunkl(DunklParams(rs, p.get("hbar", 1), "y"), xi)
        W = weyl_group(rs)
    elif kind == "cherednik-Y":
        from .hecke import cherednik_Y
        ctx = _hecke_ctx(cfg)
        op = cherednik_Y(ctx, tuple(Fraction(x) for x in cfg["lam"]))
        W = ctx.W
    elif kind == "elliptic-dunkl":
        from .elliptic import elliptic_dunkl
        ctx = _ell_ctx(cfg, rng)
        xi = tuple(num(x) for x in cfg.get("xi", [1] + [0] * (ctx.m - 1)))
        op = elliptic_dunkl(ctx, xi)
        W = ctx.W
    elif kind == "elliptic-R":
        from .elliptic import ell_R
        ctx = _ell_ctx(cfg, rng)
        op = ell_R(ctx, tuple(Fraction(x) for x in cfg["root"]), int(cfg.get("m", 0)))
        W = ctx.W
    else:
        raise ConfigError(f"unknown operator kind {kind!r}")
    return {"object": "operator", "kind": kind, **serialize_op(op, W)}


def cmd_compute(cfg):
    obj = cfg.get("object")
    if obj == "macdonald":
        res = compute_macdonald(cfg)
    elif obj == "hamiltonian":
        res = compute_hamiltonian(cfg)
    elif obj == "operator":
        res = compute_operator(cfg)
    else:
        raise ConfigError(f"unknown object {obj!r}")
    return 0, {"status": "ok", **res}


# ---------------------------------------------------------------------------
# flow


def cmd_flow(cfg):
    from .elliptic import EllipticContext
    from . import lax
    system = cfg.get("system", "elliptic-cm")
    p = _params(cfg)
    params = _elliptic_params(cfg)
    z = num(cfg.get("z", [0.27, 0]))
    if system in ("elliptic-cm", "free"):
        rs = _rs(cfg)
        k = 0 if system == "free" else p.get("k", complex(0, 0.5))
        ctx = EllipticContext(rs, k=k, params=params)
        b = cfg.get("b")
        b = tuple(num(x) for x in b) if b is not None else rs.weights[int(cfg.get("weight", 0))]
        _, L = lax.lax_matrix("elliptic-differential", ctx, b)
        H = lax.classical_cm_hamiltonian(ctx)
    elif system == "ruijsenaars":
        cfg.setdefault("family", "GLn")
        rs = _rs(cfg)
        ctx = EllipticContext(rs, k=p.get("k", complex(0, 0.2)), params=params)
        b = tuple(num(x) for x in cfg.get("b", [1] + [0] * (rs.dim - 1)))
        _, L = lax.lax_matrix("elliptic-difference", ctx, b)
        H = lax.classical_difference_hamiltonian(ctx, b)
    else:
        raise ConfigError(f"unknown system {system!r}")
    scale = cfg.get("scale")
    if scale is not None:
        H = H.scale(num(scale))
    x0 = [float(num(x)) for x in cfg["x0"]]
    if "theta" in cfg:
        p0 = lax.ruijsenaars_momenta(ctx, x0, [float(num(x)) for x in cfg["theta"]])
    else:
        p0 = [num(x) for x in cfg["p0"]]
    T, dt = float(num(cfg.get("T", 1))), float(num(cfg.get("dt", "1/1000")))
    r = lax.integrate_flow(H, L, x0, p0, z, T, dt)
    stride = int(cfg.get("stride", 10))
    m = len(x0)
    tr = r["trajectory"]
    idx = list(range(0, len(r["times"]), stride))
    if len(r["times"]) and idx[-1] != len(r["times"]) - 1:
        idx.append(len(r["times"]) - 1)
    series = {"t": [float(r["times"][i]) for i in idx],
              "x": [enc(tr[i][:m]) for i in idx],
              "p": [enc(tr[i][m:]) for i in idx],
              "H": [enc(complex(r["energies"][i])) for i in idx],
              "eigenvalues": [enc(r["eigenvalues"][i]) for i in idx]}
    ok = r["status"] == "ok"
    out = {"status": r["status"], "system": system, "drift": enc(r["drift"]),
           "energy_drift": enc(r["energy_drift"]), "series": series,
           "summary": f"max drift {r['drift']:.3e}"}
    if not ok:
        out["error"] = r["pole"]
    return (0 if ok else 1), out


# ---------------------------------------------------------------------------


COMMANDS = {"verify": cmd_verify, "compute": cmd_compute, "flow": cmd_flow}


def build_parser():
    ap = argparse.ArgumentParser(prog="dclab", description="Dunkl/Cherednik operator verification and experiments")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--out")
    return ap


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".dclab-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run(argv=None):
    """Returns (exit code, report dict)."""
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        resolved = json.loads(json.dumps(cfg))
        code, rep = COMMANDS[args.command](cfg)
    except (ConfigError, RootSystemError, KeyError, ValueError, ArithmeticError, OSError) as exc:
        code, rep = 2, {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
        resolved = locals().get("resolved")
    report = {"dclab_version": __version__, "command": args.command, "config": resolved,
              "precision_bits": th.default_bits(), **rep}
    text = json.dumps(enc(report), sort_keys=True, indent=1, allow_nan=False) + "\n"
    _write(text, args.out)
    return code, report


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
