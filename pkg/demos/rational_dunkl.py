"""
Rational Dunkl operators
========================

Build the Dunkl operators of B2 with unequal multiplicities, check that
they commute exactly, and compare the Calogero-Moser operator with its
explicit potential form.
"""
from fractions import Fraction as F

from dclab import rational as ra
from dclab.crossed import commutator, equal_probabilistic
from dclab.roots import build_root_system

rs = build_root_system("B", 2, {"long": F(1, 3), "short": F(5, 7)})
P = ra.DunklParams(rs, F(3, 4))
y1, y2 = ra.basis_dunkl(P)

# exact rational arithmetic, so the commutator is literally zero
print("[y1, y2] == 0:", commutator(y1, y2).is_zero())

# sum of squares restricted to invariants vs the explicit potential
a2 = build_root_system("A", 2, F(2, 3))
P2 = ra.DunklParams(a2, F(3, 4))
print("CM matches explicit form:", bool(equal_probabilistic(ra.cm_hamiltonian(P2), ra.cm_explicit(P2))))

S, report = ra.shift_operator(build_root_system("A", 1, F(2, 7)))
print("A1 shift operator checks:", report["ok"])
