from functools import reduce

import numpy as np
import pytest

from falqon_transfer.graph import Graph, gen_erdos_renyi, gen_three_regular

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def embed(op, qubit, n):
    """Dense operator acting as ``op`` on ``qubit`` (qubit 0 = least significant bit)."""
    # np.kron puts its first factor on the most significant bit
    factors = [op if q == qubit else I2 for q in reversed(range(n))]
    return reduce(np.kron, factors)


def dense_mixer(n):
    return sum(embed(X, q, n) for q in range(n))


def dense_cut(g: Graph):
    """Ising form 1/2 sum (1 - Z_i Z_j) built from Kronecker products."""
    dim = 1 << g.n
    h = np.zeros((dim, dim), dtype=complex)
    for i, j in g.edges:
        h += 0.5 * (np.eye(dim) - embed(Z, i, g.n) @ embed(Z, j, g.n))
    return h


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_graph(rng, n=None):
    if n is None:
        n = int(rng.choice([4, 6, 8]))
    if rng.random() < 0.5 and n % 2 == 0 and n >= 4:
        return gen_three_regular(n, int(rng.integers(2**32)))
    return gen_erdos_renyi(n, float(rng.uniform(0.2, 0.9)), int(rng.integers(2**32)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def dense_falqon(g: Graph, dt, layers, schedule=None):
    """Reference FALQON from dense matrices and scipy's matrix exponential."""
    from scipy.linalg import expm

    hm = dense_mixer(g.n)
    hc = -dense_cut(g)
    cut_op = dense_cut(g)
    comm = 1j * (hm @ hc - hc @ hm)
    uc = expm(-1j * dt * hc)
    psi = np.full(1 << g.n, 2.0 ** (-g.n / 2), dtype=complex)
    beta, rows = 0.0, []
    for k in range(layers):
        if schedule is not None:
            beta = schedule[k]
        psi = expm(-1j * beta * dt * hm) @ (uc @ psi)
        a = np.vdot(psi, comm @ psi).real
        rows.append((beta, a, np.vdot(psi, hc @ psi).real, np.vdot(psi, cut_op @ psi).real))
        beta = -a
    return np.array(rows)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
