"""Jacobi theta functions and the elliptic kernels built from them.

Convention: theta_r(z | tau) with nome q = exp(i pi tau), periods 1 and tau,
e.g. theta_1(z) = 2 sum_k (-1)^k q^{(k+1/2)^2} sin((2k+1) pi z).  All kernels
are evaluated from truncated Taylor jets so that z-derivatives come for free.
"""

import cmath
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import mpmath

MAX_TERMS = 4000
MAX_DERIV = 6


class EllipticError(ValueError):
    pass


def default_bits():
    return int(os.environ.get("DCLAB_PRECISION_BITS", "128"))


@dataclass(frozen=True)
class EllipticParams:
    tau_ell: complex = 1j
    tol: float = None
    bits: int = None
    mode: str = "mp"

    def __post_init__(self):
        tau = complex(self.tau_ell)
        object.__setattr__(self, "tau_ell", tau)
        if tau.imag <= 0:
            raise EllipticError("tau_ell must have positive imaginary part")
        if self.bits is None:
            object.__setattr__(self, "bits", default_bits() if self.mode == "mp" else 53)
        if self.tol is None:
            # truncation tied to the working precision
            object.__setattr__(self, "tol", 2.0 ** (-self.bits - 8))
        if not self.tol > 0:
            raise EllipticError("truncation tolerance must be positive")

    def with_bits(self, bits):
        return EllipticParams(self.tau_ell, None, bits, self.mode)

    def floating(self):
        return EllipticParams(self.tau_ell, None, 53, "float")


class _Float:
    exp = staticmethod(cmath.exp)
    pi = math.pi

    @staticmethod
    def num(x):
        return complex(x)

    @staticmethod
    def fac(n):
        return math.factorial(n)

    @staticmethod
    def mag(x):
        return abs(x)


class _Mp:
    exp = staticmethod(mpmath.exp)

    @property
    def pi(self):
        return +mpmath.pi

    @staticmethod
    def num(x):
        if isinstance(x, (mpmath.mpc, mpmath.mpf)):
            return x
        if hasattr(x, "numerator") and hasattr(x, "denominator"):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpc(x)

    @staticmethod
    def fac(n):
        return mpmath.factorial(n)

    @staticmethod
    def mag(x):
        return abs(x)


FLOAT = _Float()
MP = _Mp()


def backend(p):
    return FLOAT if p.mode == "float" else MP


@lru_cache(maxsize=64)
def _nome_powers(tau, bits, mode, r, tol):
    """Coefficients c_k and frequencies a_k of theta_r = sum c_k e^{i pi a_k z}."""
    B = FLOAT if mode == "float" else MP
    with mpmath.workprec(bits):
        q = B.exp(1j * B.pi * B.num(tau))
        # bound for |Im z| <= Im tau + 1
        growth = math.exp(math.pi * (tau.imag + 1))
        terms = []
        if r in (1, 2):
            k = 0
            while True:
                e = (k + 0.5) ** 2 if mode == "float" else (mpmath.mpf(k) + mpmath.mpf(1) / 2) ** 2
                c = B.exp(1j * B.pi * B.num(tau) * e)
                if r == 1:
                    # 2 (-1)^k q^{..} sin(a pi z) = (-1)^k q^{..} (-i)(e^{ia} - e^{-ia})
                    s = (-1) ** k
                    terms.append((-1j * s * c, 2 * k + 1))
                    terms.append((1j * s * c, -(2 * k + 1)))
                else:
                    terms.append((c, 2 * k + 1))
                    terms.append((c, -(2 * k + 1)))
                if B.mag(c) * growth ** (2 * k + 1) < tol and k > 2:
                    break
                k += 1
                if k > MAX_TERMS:
                    raise EllipticError("theta series exceeds the term cap")
        else:
            terms.append((B.num(1), 0))
            k = 1
            while True:
                c = B.exp(1j * B.pi * B.num(tau) * k * k)
                if r == 4 and k % 2:
                    c = -c
                terms.append((c, 2 * k))
                terms.append((c, -2 * k))
                if B.mag(c) * growth ** (2 * k) < tol and k > 2:
                    break
                k += 1
                if k > MAX_TERMS:
                    raise EllipticError("theta series exceeds the term cap")
        del q
        return tuple(terms)


def theta_jet(r, z, p, order):
    """Taylor coefficients theta_r^{(j)}(z)/j!, j = 0..order."""
    if r not in (1, 2, 3, 4):
        raise EllipticError("theta index must be 1..4")
    B = backend(p)
    terms = _nome_powers(p.tau_ell, p.bits, p.mode, r, p.tol)
    z = B.num(z)
    ipz = 1j * B.pi * z
    out = [0] * (order + 1)
    ipi = 1j * B.pi
    for c, a in terms:
        base = c * B.exp(a * ipz)
        f = ipi * a
        t = base
        for j in range(order + 1):
            out[j] += t
            t = t * f / (j + 1)
    return out


def eval_theta(r, z, p, deriv_order=0):
    with mpmath.workprec(p.bits):
        jet = theta_jet(r, z, p, deriv_order)
        return jet[deriv_order] * backend(p).fac(deriv_order)


# ---------------------------------------------------------------------------
# jets

def jet_mul(a, b):
    n = len(a)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def jet_div(a, b):
    n = len(a)
    out = []
    for k in range(n):
        s = a[k] - sum(out[i] * b[k - i] for i in range(k))
        out.append(s / b[0])
    return out


def _check_pole(val, what):
    if abs(val) < 1e-8:
        raise EllipticError(f"{what} too close to a lattice pole")


@lru_cache(maxsize=256)
def _theta1_prime0(tau, bits, mode, tol):
    p = EllipticParams(tau, tol, bits, mode)
    return theta_jet(1, 0, p, 1)[1]


@lru_cache(maxsize=256)
def _theta1_third0(tau, bits, mode, tol):
    p = EllipticParams(tau, tol, bits, mode)
    j = theta_jet(1, 0, p, 3)
    return j[1], 6 * j[3]


def sigma_jet(mu, z, p, order, r=0):
    """Jet of sigma^r_mu(z) = theta_{r+1}(z-mu) theta_1'(0)/(theta_{r+1}(z) theta_1(-mu))."""
    B = backend(p)
    mu, z = B.num(mu), B.num(z)
    t1p = _theta1_prime0(p.tau_ell, p.bits, p.mode, p.tol)
    tm = theta_jet(1, -mu, p, 0)[0]
    _check_pole(tm, "mu")
    num = theta_jet(r + 1, z - mu, p, order)
    den = theta_jet(r + 1, z, p, order)
    _check_pole(den[0], "z")
    f = t1p / tm
    return [f * x for x in jet_div(num, den)]


def wp_jet(z, p, order):
    """Jet of the Weierstrass function with periods 1, tau."""
    B = backend(p)
    z = B.num(z)
    t1p, t3 = _theta1_third0(p.tau_ell, p.bits, p.mode, p.tol)
    th = theta_jet(1, z, p, order + 2)
    _check_pole(th[0], "z")
    d = [(j + 1) * th[j + 1] for j in range(order + 2)]
    ld = jet_div(d, th[:order + 2])
    out = [-(j + 1) * ld[j + 1] for j in range(order + 1)]
    out[0] += t3 / (3 * t1p)
    return out


def zeta_half(p):
    """Weierstrass zeta(1/2) = eta_1 = -theta_1'''(0)/(6 theta_1'(0))."""
    with mpmath.workprec(p.bits):
        t1p, t3 = _theta1_third0(p.tau_ell, p.bits, p.mode, p.tol)
        return -t3 / (6 * t1p)


def eval_sigma(kind, mu, z, p, deriv_order=0, r=0):
    """sigma_mu^{(n)}(z), sigma^r_mu, wp^{(n)}(z) or zeta(1/2)."""
    if deriv_order > MAX_DERIV or deriv_order < 0:
        raise EllipticError("unsupported derivative order")
    with mpmath.workprec(p.bits):
        B = backend(p)
        if kind == "zeta_half":
            return zeta_half(p)
        if kind == "wp":
            return wp_jet(z, p, deriv_order)[deriv_order] * B.fac(deriv_order)
        if kind == "sigma":
            r = 0
        elif kind != "sigma_r":
            raise EllipticError(f"unknown kind {kind!r}")
        if r not in (0, 1, 2, 3):
            raise EllipticError("sigma_r needs r in 0..3")
        return sigma_jet(mu, z, p, deriv_order, r)[deriv_order] * B.fac(deriv_order)


def v_mu(mu, z, g, p, deriv_order=0):
    """v_mu(z) = sum_r g_r sigma^r_{2 mu}(z)."""
    return sum(g[r] * eval_sigma("sigma_r", 2 * mu, z, p, deriv_order, r) for r in range(4))


def half_periods(p):
    return (0, 0.5, 0.5 + p.tau_ell / 2, p.tau_ell / 2)
