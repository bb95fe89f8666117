"""
Elliptic Calogero-Moser flow and its Lax matrix
===============================================

The classical A2 system with imaginary coupling is integrated with RK4;
the spectrum of the Lax matrix L(z) should stay put along the path.
"""
from dclab import elliptic as el
from dclab import lax
from dclab.roots import build_root_system

ctx = el.EllipticContext(build_root_system("A", 2), k=0.3j)
_, L = lax.lax_matrix("elliptic-differential", ctx, ctx.rs.weights[0])
H = lax.classical_cm_hamiltonian(ctx)
print("Lax size:", L.size)

x0, p0, z = [0.3, 0.0, -0.35], [0.3, -0.5, 0.2], 0.27
run = lax.integrate_flow(H, L, x0, p0, z, T=1.0, dt=1e-3)
print("status", run["status"])
print("spectral drift %.2e  energy drift %.2e" % (run["drift"], run["energy_drift"]))

# halving dt should cut the drift by about 2^4
print("observed order %.2f" % lax.drift_order(H, L, x0, p0, z, 1.0, 0.01)["order"])
