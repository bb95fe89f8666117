"""
Non-symmetric Macdonald polynomials for GL3
===========================================

Eigenfunctions of the Cherednik operators Y at tau = 2/3, q = 5/7.
"""
from fractions import Fraction as F

from dclab import hecke as hk
from dclab import macdonald as mac
from dclab.crossed import apply_laurent
from dclab.roots import build_root_system

ctx = hk.HeckeContext(build_root_system("GLn", 3, 1), tau=F(2, 3), q=F(5, 7))

for mu in [(1, 0, 0), (0, 1, 0), (1, 0, 2)]:
    E, gamma = mac.nonsym_macdonald(ctx, mu)
    print(mu, "support size", len(E.support()), "eigenvalues", {g: str(v) for g, v in gamma.items()})

# symmetric polynomial and the first Macdonald-Ruijsenaars operator
P, ev = mac.sym_macdonald(ctx, (1, 0, 0))
L1 = hk.mr_hamiltonian(ctx, {"e": 1})
print("L1 P = ev P:", apply_laurent(L1, P) == P.scale(ev), "ev =", ev)
