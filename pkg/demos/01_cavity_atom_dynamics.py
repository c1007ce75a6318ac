"""
Cavity and atom dynamics
========================

A driven, lossy cavity mode coupled to a two-level atom.  This script
builds the operators, watches the atom oscillate or freeze depending on how
hard it is driven, and shows how the cavity drive populates Fock states.
"""
import numpy as np

from qrc import quantum as q

space = q.FockQubitSpace(n_fock=10)
ops = q.build_operators(space, kappa=18.0)
print(f"joint space: {space.n_fock} Fock levels x 2 atomic levels = {space.dim} states")

# |n, sigma> sits at index 2n + sigma; sigma = 0 is the atomic ground state
print("index of |3, excited>:", space.index(3, q.EXCITED))

# --- Rabi oscillation -------------------------------------------------------
# Without coupling or loss the atom flops as sin^2(g_z t).
closed = q.build_operators(q.FockQubitSpace(2), kappa=0.0)
params = q.HamiltonianParams(g=0.0, g_z=2.0, beta=0.0, kappa=0.0)
rho = q.vacuum_ground(closed.space)
print("\n t     <excitation>   sin^2(g_z t)")
for k in range(1, 6):
    rho = q.evolve(rho, params, closed, dt=1e-3, n_steps=200)
    t = 0.2 * k
    print(f"{t:4.1f}   {q.expectation(rho, closed.atom_excitation).real:.9f}    "
          f"{np.sin(2.0 * t) ** 2:.9f}")

# --- two regimes ------------------------------------------------------------
# With the cavity driven, photons shift the atomic ground level (g n) and the
# cavity leaks at rate kappa.  A weak atomic drive then barely moves the atom,
# a strong one still makes it swing.
for g_z in (0.5, 5.0):
    params = q.HamiltonianParams(g=5.0, g_z=g_z, beta=15.0, kappa=18.0)
    rho = q.vacuum_ground(space)
    trace = []
    for _ in range(200):
        rho = q.evolve(rho, params, ops, dt=1e-3, n_steps=10)
        trace.append(q.expectation(rho, ops.atom_excitation).real)
    print(f"g_z = {g_z:3.1f}: excitation swings between {min(trace):.3f} and {max(trace):.3f}")

# --- cavity drive and occupations ---------------------------------------------
# The steady cavity field is coherent with |alpha| = 2 beta / kappa.
print("\nbeta   P(0,g)  P(0,e)  P(1,g)  P(1,e)  P(2,g)  P(2,e)")
for beta in (0.0, 5.0, 10.0, 15.0):
    params = q.HamiltonianParams(g=5.0, g_z=5.0, beta=beta, kappa=18.0)
    rho = q.evolve(q.vacuum_ground(space), params, ops, dt=1e-3, n_steps=300)
    P = q.occupations(rho, space)
    print(f"{beta:4.1f}  " + "  ".join(f"{p:.4f}" for p in P[:6]))

d = q.density_defects(rho)
print(f"\nfinal state: trace error {d['trace_error']:.1e}, "
      f"Hermiticity defect {d['hermiticity']:.1e}, smallest eigenvalue {d['min_eigenvalue']:.1e}")
