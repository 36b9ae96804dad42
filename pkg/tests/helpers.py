"""Shared builders and block-evaluation utilities for the test suite."""
from __future__ import annotations

import numpy as np

import msakit

STEEL = {"E": 210e9, "G": 80.77e9}


def section_kwargs(**overrides) -> dict:
    base = {"E": 210e9, "G": 80.77e9, "A": 1e-3, "Iy": 2e-6, "Iz": 1e-6, "J": 3e-6}
    base.update(overrides)
    return base


def cantilever(L: float = 1.0, **overrides):
    """Single beam clamped at 'a', loaded end 'b'; returns (model, link)."""
    m = msakit.Model()
    m.add_node("a", [0.0, 0.0, 0.0])
    m.add_node("b", [L, 0.0, 0.0])
    link = m.add_beam("a", "b", **section_kwargs(**overrides))
    m.add_support("a", "rigid")
    m.set_end_effector("b")
    return m, link


def random_section(rng) -> dict:
    E = rng.uniform(70e9, 210e9)
    return {
        "E": E,
        "G": E / 2.6,
        "A": rng.uniform(1e-4, 5e-3),
        "Iy": rng.uniform(1e-8, 1e-5),
        "Iz": rng.uniform(1e-8, 1e-5),
        "J": rng.uniform(1e-8, 1e-5),
    }


def random_chain(rng, n_links: int) -> msakit.Model:
    """Serial chain of beams with rigid inter-link joints and a clamped base."""
    m = msakit.Model()
    p = np.zeros(3)
    prev_far = None
    for k in range(n_links):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        q = p + rng.uniform(0.3, 1.2) * direction
        m.add_node(f"a{k}", p)
        m.add_node(f"b{k}", q)
        m.add_beam(f"a{k}", f"b{k}", **random_section(rng))
        if prev_far is not None:
            m.add_joint("rigid", (prev_far, f"a{k}"))
        prev_far = f"b{k}"
        p = q
    m.add_support("a0", "rigid")
    m.set_end_effector(f"b{n_links - 1}")
    return m


def block_residual(block, values: dict) -> np.ndarray:
    """Evaluate a block's rows at {("W"|"t", node): 6-vector}; zero means satisfied."""
    r = -block.rhs.copy()
    for row, var, sub in block.entries:
        v = np.asarray(values.get(var, np.zeros(6)), dtype=float)
        r[row:row + sub.shape[0]] += sub @ v
    return r


def rel_fro(a, b) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
