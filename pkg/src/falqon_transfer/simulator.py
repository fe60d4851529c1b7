"""Exact state-vector layers for the cost phase and the transverse-field mixer.

A state is a flat ``complex128`` numpy array of length ``2**n``.  The public
functions here never modify their input; :mod:`falqon_transfer.falqon` uses
the in-place kernels directly inside its layer loop.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .hamiltonian import CostDiagonal, CutDiagonal

MAX_QUBITS = 30


class DimensionError(ValueError):
    pass


def num_qubits(state: np.ndarray) -> int:
    size = state.shape[0]
    n = size.bit_length() - 1
    if state.ndim != 1 or size != 1 << n or n < 1:
        raise DimensionError(f"state length {state.shape} is not 2**n with n >= 1")
    return n


def _check(state: np.ndarray, table) -> int:
    n = num_qubits(state)
    if table.n != n:
        raise DimensionError(f"state has {n} qubits, table has {table.n}")
    return n


def as_state(amplitudes) -> np.ndarray:
    state = np.array(amplitudes, dtype=np.complex128)
    num_qubits(state)
    return state


def init_plus_state(n: int) -> np.ndarray:
    """Uniform superposition over all ``2**n`` basis states."""
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"qubit count must lie in [1, {MAX_QUBITS}], got {n}")
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def basis_state(n: int, index: int) -> np.ndarray:
    state = np.zeros(1 << n, dtype=np.complex128)
    state[index] = 1.0
    return state


def cost_phase_factors(cost: CostDiagonal, dt: float) -> np.ndarray:
    return np.exp(-1j * dt * cost.values)


def apply_cost_phase(state: np.ndarray, cost: CostDiagonal, dt: float) -> np.ndarray:
    _check(state, cost)
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    return state * cost_phase_factors(cost, dt)


def apply_x_rotation(state: np.ndarray, qubit: int, theta: float) -> np.ndarray:
    """``exp(-i theta X_qubit)`` applied to a copy of ``state``."""
    n = num_qubits(state)
    if not 0 <= qubit < n:
        raise DimensionError(f"qubit {qubit} out of range for n={n}")
    out = np.array(state, dtype=np.complex128)
    _kernels.rotate_qubit(out, qubit, math.cos(theta), math.sin(theta))
    return out


def apply_mixer(state: np.ndarray, beta: float, dt: float) -> np.ndarray:
    """``exp(-i beta dt sum_i X_i)``; the single-qubit factors commute."""
    n = num_qubits(state)
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    theta = beta * dt
    out = np.array(state, dtype=np.complex128)
    _kernels.rotate_all(out, n, math.cos(theta), math.sin(theta))
    return out


def expected_cut(state: np.ndarray, cut: CutDiagonal) -> float:
    _check(state, cut)
    return float(_kernels.expectation(np.ascontiguousarray(state), cut.values))


def expected_cost(state: np.ndarray, cost: CostDiagonal) -> float:
    _check(state, cost)
    return float(_kernels.expectation(np.ascontiguousarray(state), cost.values))


def measure_commutator(state: np.ndarray, cost: CostDiagonal) -> float:
    """Expectation of ``i[H_M, H_C]`` with ``H_M = sum_i X_i`` and ``H_C`` the cost table.

    Evaluated as ``-2 Im <psi| H_M H_C |psi>`` using one bit-flip sweep per
    qubit, O(n 2**n) with no matrices formed.
    """
    n = _check(state, cost)
    return float(_kernels.commutator(np.ascontiguousarray(state), cost.values, n))


def norm(state: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(state, state).real))
