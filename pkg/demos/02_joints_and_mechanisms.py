"""Joints and what they do to the end-point stiffness.

Two beams joined rigidly, through a revolute pin, and through a torsion
spring. The pin leaves a zero-stiffness direction that the diagnostics
flag; the spring interpolates between the pin and the weld.
"""
import numpy as np

import msakit

SECTION = dict(E=210e9, G=80.77e9, A=1e-3, Iy=2e-6, Iz=1e-6, J=3e-6)


def two_beam_chain(joint_kind, **joint_args):
    m = msakit.Model()
    m.add_node("a", [0.0, 0.0, 0.0])
    m.add_node("b", [0.4, 0.0, 0.0])
    m.add_node("c", [0.4, 0.0, 0.0])     # same point: the joint lives here
    m.add_node("d", [1.2, 0.0, 0.0])
    m.add_beam("a", "b", **SECTION)
    m.add_beam("c", "d", **SECTION)
    m.add_joint(joint_kind, ("b", "c"), **joint_args)
    m.add_support("a", "rigid")
    m.set_end_effector("d")
    return m


rz = msakit.joint_basis_preset("revolute_z")

welded = two_beam_chain("rigid").cartesian_stiffness()
pinned = two_beam_chain("passive", basis=rz).cartesian_stiffness()
print("welded joint: rank", welded.diagnostics.kc_rank,
      "| transverse stiffness", welded.kc[1, 1])
print("revolute pin: rank", pinned.diagnostics.kc_rank,
      "| mechanisms:", pinned.diagnostics.mechanisms)
print("  free tip direction (translation; rotation):",
      np.round(pinned.diagnostics.mechanism_directions[0], 3))

print("\ntorsion spring bridging the pin:")
for k in (1e2, 1e4, 1e6, 1e12):
    sprung = two_beam_chain("elastic", basis=rz, stiffness=[[k]]).cartesian_stiffness()
    print(f"  k = {k:8.0e} N*m/rad -> transverse stiffness {sprung.kc[1, 1]:12.1f}")
print("  weld for comparison      ->", f"{welded.kc[1, 1]:12.1f}".strip())

# An actuated joint is just one of the above, per its idealization.
locked = two_beam_chain("actuated", idealization="as-rigid").cartesian_stiffness()
print("\nactuated joint idealized as rigid matches the weld:",
      np.allclose(locked.kc, welded.kc))
