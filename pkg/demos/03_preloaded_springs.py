"""Preloaded elastic connections.

A spring preloaded at assembly carries its preload as an internal wrench.
When the surrounding structure blocks the spring's direction, nothing
moves and the preload circulates internally; when it does not, the
structure settles into a new equilibrium.
"""
import numpy as np

import msakit

rz = msakit.joint_basis_preset("revolute_z")
preload = np.array([0, 0, 0, 0, 0, 7.5])   # 7.5 N*m about z

# Case 1: the spring bridges two grounded rigid arms. Its direction is
# blocked, so deflections stay zero and the spring keeps its preload.
m = msakit.Model()
m.add_node("A", [0, 0, 0])
m.add_node("B", [1, 0, 0])
m.add_node("C", [1, 0, 0])
m.add_node("D", [2, 0, 0])
m.add_rigid_link("A", "B")
m.add_rigid_link("C", "D")
m.add_joint("elastic", ("B", "C"), basis=rz, stiffness=[[300.0]], preload=preload)
m.add_support("A", "rigid")
m.add_support("D", "rigid")

state = m.solve()
print("blocked spring, zero external load:")
print("  max deflection anywhere:", max(np.abs(state.deflection_at(n)).max()
                                        for n in state.system.nodes))
print("  spring wrench on arm 1:", state.wrench_at("B")[5], "N*m (the preload)")
print("  spring wrench on arm 2:", state.wrench_at("C")[5], "N*m (its reaction)")
print("  ground reactions:", msakit.support_reaction(state, "A").array[5],
      "and", msakit.support_reaction(state, "D").array[5])

# Case 2: the same spring driving a free arm unwinds by preload/stiffness.
m2 = msakit.Model()
m2.add_node("A", [0, 0, 0])
m2.add_node("B", [1, 0, 0])
m2.add_node("C", [1, 0, 0])
m2.add_node("D", [2, 0, 0])
m2.add_rigid_link("A", "B")
m2.add_rigid_link("C", "D")
m2.add_joint("elastic", ("B", "C"), basis=rz, stiffness=[[300.0]], preload=preload)
m2.add_support("A", "rigid")
m2.set_end_effector("D")

state2 = m2.solve()
print("\nfree arm, zero external load:")
print("  arm rotation:", state2.deflection_at("C")[5], "rad",
      "(preload / stiffness =", 7.5 / 300.0, ")")
print("  tip swing in y:", state2.end_deflection[1], "m")
