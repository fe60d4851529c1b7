"""In-place numba kernels over a flat complex128 amplitude array."""

import numba
import numpy as np


@numba.njit(cache=True)
def rotate_qubit(psi, q, c, s):
    # exp(-i theta X_q) with c = cos(theta), s = sin(theta)
    m = 1 << q
    for base in range(0, psi.shape[0], 2 * m):
        for j in range(base, base + m):
            a = psi[j]
            b = psi[j + m]
            psi[j] = complex(c * a.real + s * b.imag, c * a.imag - s * b.real)
            psi[j + m] = complex(c * b.real + s * a.imag, c * b.imag - s * a.real)


@numba.njit(cache=True)
def rotate_all(psi, n, c, s):
    for q in range(n):
        rotate_qubit(psi, q, c, s)


@numba.njit(cache=True)
def phase(psi, factors):
    for j in range(psi.shape[0]):
        psi[j] *= factors[j]


@numba.njit(cache=True)
def commutator(psi, diag, n):
    # -2 Im <psi| sum_q X_q D |psi>, grouped over the pairs (b, b ^ 2^q)
    acc = 0.0
    for q in range(n):
        m = 1 << q
        for base in range(0, psi.shape[0], 2 * m):
            for j in range(base, base + m):
                a = psi[j]
                b = psi[j + m]
                acc += (diag[j + m] - diag[j]) * (a.real * b.imag - a.imag * b.real)
    return -2.0 * acc


@numba.njit(cache=True)
def expectation(psi, diag):
    acc = 0.0
    for j in range(psi.shape[0]):
        v = psi[j]
        acc += diag[j] * (v.real * v.real + v.imag * v.imag)
    return acc


def warmup():
    psi = np.full(2, np.sqrt(0.5), dtype=np.complex128)
    d = np.zeros(2)
    rotate_all(psi, 1, 1.0, 0.0)
    phase(psi, np.ones(2, dtype=np.complex128))
    commutator(psi, d, 1)
    expectation(psi, d)
