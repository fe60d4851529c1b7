"""Diagonal cut / cost tables and the transverse-field mixer description.

Basis index ``b`` encodes qubit ``i`` in bit ``i`` (qubit 0 is the least
significant bit), matching the vertex order of :mod:`falqon_transfer.graph`.

The dynamics minimise the *cost* table, which is the negated cut table, so
the lowest-energy basis states are exactly the maximum cuts.  The identity
offset of the Ising form only contributes a global phase and is not part of
either table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph import MAX_BRUTE_FORCE_N, Graph, GraphError, cut_counts

MIXERS = ("x",)


@dataclass(frozen=True, eq=False)
class CutDiagonal:
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"table length {self.values.shape} does not match n={self.n}")
        self.values.flags.writeable = False

    @property
    def optimum(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True, eq=False)
class CostDiagonal:
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"table length {self.values.shape} does not match n={self.n}")
        self.values.flags.writeable = False


class PauliTerm(NamedTuple):
    op: str
    qubit: int
    coeff: float = 1.0

    def __str__(self):
        return f"{self.op}_{self.qubit}"


def build_cut_diagonal(g: Graph) -> CutDiagonal:
    if g.n > MAX_BRUTE_FORCE_N:
        raise GraphError(f"diagonal tables limited to n <= {MAX_BRUTE_FORCE_N}, got {g.n}")
    idx = np.arange(1 << g.n, dtype=np.int64)
    return CutDiagonal(g.n, cut_counts(g, idx).astype(np.float64))


def build_cost_diagonal(g: Graph, cut: CutDiagonal | None = None) -> CostDiagonal:
    if cut is None:
        cut = build_cut_diagonal(g)
    # 0.0 - x keeps -0.0 out of the table
    return CostDiagonal(cut.n, 0.0 - cut.values)


def mixer_pauli_terms(n: int) -> list[PauliTerm]:
    """Terms of the transverse-field driver, one unit-weight X per qubit."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    return [PauliTerm("X", i) for i in range(n)]
