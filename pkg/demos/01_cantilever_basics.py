"""A first model: one beam clamped at the base, loaded at the tip.

Builds the smallest useful stiffness model, extracts the 6x6 end-point
stiffness, and checks the classical cantilever formulas.
"""
import numpy as np

import msakit

E, G = 210e9, 80.77e9          # steel
A, Iy, Iz, J = 1e-3, 2e-6, 1e-6, 3e-6
L, F = 1.0, 100.0

model = msakit.Model()
model.add_node("base", [0.0, 0.0, 0.0])
model.add_node("tip", [L, 0.0, 0.0])
model.add_beam("base", "tip", E=E, G=G, A=A, Iy=Iy, Iz=Iz, J=J)
model.add_support("base", "rigid")
model.set_end_effector("tip")

print(model.check().summary())

result = model.cartesian_stiffness()
print("\nend-point stiffness (N/m, N, N*m blocks):")
print(np.array2string(result.kc, precision=3))
print("axial entry:", result.kc[0, 0], "vs EA/L =", E * A / L)

state = model.solve([0.0, F, 0.0, 0.0, 0.0, 0.0])
print("\ntip deflection under a transverse force of", F, "N:")
print("  y:", state.end_deflection[1], "vs F*L^3/(3*E*Iz) =", F * L**3 / (3 * E * Iz))
print("  rotation about z:", state.end_deflection[5],
      "vs F*L^2/(2*E*Iz) =", F * L**2 / (2 * E * Iz))

reaction = msakit.support_reaction(state, "base")
print("\nbase reaction wrench:", reaction.array)
print("global equilibrium residual:", msakit.equilibrium_residual(state))
