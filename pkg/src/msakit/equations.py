"""Equation blocks: the uniform currency produced by all emitters.

A block is a group of scalar equations over per-node wrench and deflection
unknowns. Coefficients are stored as (row offset, variable, sub-block)
entries so the assembler can scatter them into the global sparse matrix
while keeping provenance per row.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

# Variable reference: ("W", node) for a wrench, ("t", node) for a deflection.
Var = tuple


def wrench_var(node: Hashable) -> Var:
    return ("W", node)


def deflection_var(node: Hashable) -> Var:
    return ("t", node)


@dataclass(eq=False)
class EquationBlock:
    """Rows of the global model contributed by one element, joint or boundary.

    category is "link" for stiffness relations (the [-I | K] rows), "load"
    for external-wrench equilibrium rows, and "constraint" otherwise.
    Load blocks carry `load_node`, the key under which the applied wrench is
    bound to the right-hand side at solve time.
    """

    source: str
    rows: int
    entries: list = field(default_factory=list)
    rhs: np.ndarray | None = None
    category: str = "constraint"
    load_node: Hashable | None = None

    def __post_init__(self):
        if self.rows <= 0:
            raise ValueError("equation block must have at least one row")
        if self.category not in ("link", "constraint", "load"):
            raise ValueError(f"unknown block category {self.category!r}")
        if (self.category == "load") != (self.load_node is not None):
            raise ValueError("load blocks (and only load blocks) carry a load node")
        norm = []
        for row, var, block in self.entries:
            block = np.asarray(block, dtype=float)
            if block.ndim == 1:
                block = block.reshape(1, -1)
            if block.shape[1] != 6:
                raise ValueError(f"{self.source}: coefficient blocks must be 6 columns wide")
            if not (0 <= row and row + block.shape[0] <= self.rows):
                raise ValueError(f"{self.source}: entry rows [{row}, {row + block.shape[0]}) "
                                 f"outside block of {self.rows} rows")
            kind, _ = var
            if kind not in ("W", "t"):
                raise ValueError(f"{self.source}: unknown variable kind {kind!r}")
            if not np.all(np.isfinite(block)):
                raise ValueError(f"{self.source}: non-finite coefficients")
            norm.append((int(row), var, block))
        self.entries = norm
        if self.rhs is None:
            self.rhs = np.zeros(self.rows)
        else:
            self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
            if self.rhs.shape != (self.rows,):
                raise ValueError(f"{self.source}: rhs length {self.rhs.shape[0]} != rows {self.rows}")
        covered = np.zeros(self.rows, dtype=bool)
        for row, _, block in self.entries:
            covered[row:row + block.shape[0]] = True
        if not covered.all():
            raise ValueError(f"{self.source}: rows without any coefficient entry")

    def nodes(self) -> set:
        return {var[1] for _, var, _ in self.entries}

    def row_kinds(self) -> list:
        """Per-row classification: link, load, compat, wrench or mixed."""
        if self.category == "link":
            return ["link"] * self.rows
        if self.category == "load":
            return ["load"] * self.rows
        touched = [set() for _ in range(self.rows)]
        for row, (kind, _), block in self.entries:
            for i in range(row, row + block.shape[0]):
                touched[i].add(kind)
        out = []
        for kinds in touched:
            if kinds == {"t"}:
                out.append("compat")
            elif kinds == {"W"}:
                out.append("wrench")
            else:
                out.append("mixed")
        return out

    def dense(self, variables: Sequence[Var] | None = None) -> tuple:
        """Dense coefficient matrix over `variables` (default: this block's own).

        Returns (matrix, ordered variables); handy for rank audits.
        """
        if variables is None:
            seen = []
            for _, var, _ in self.entries:
                if var not in seen:
                    seen.append(var)
            variables = seen
        index = {var: 6 * i for i, var in enumerate(variables)}
        M = np.zeros((self.rows, 6 * len(variables)))
        for row, var, block in self.entries:
            if var not in index:
                raise ValueError(f"variable {var} not in the requested ordering")
            c = index[var]
            M[row:row + block.shape[0], c:c + 6] += block
        return M, list(variables)


def stack_dense(blocks: Sequence[EquationBlock], variables: Sequence[Var]) -> np.ndarray:
    """Vertically stack several blocks over a shared variable ordering."""
    parts = [b.dense(variables)[0] for b in blocks]
    return np.vstack(parts) if parts else np.zeros((0, 6 * len(variables)))
