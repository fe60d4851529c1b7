import numpy as np
import pytest

from falqon_transfer.graph import Graph, complete_graph, cut_value, index_to_bitstring, max_cut_brute_force, gen_erdos_renyi
from falqon_transfer.hamiltonian import build_cost_diagonal, build_cut_diagonal, mixer_pauli_terms

from conftest import dense_cut, random_graph

EDGE = Graph(2, ((0, 1),))


def test_single_edge_tables():
    np.testing.assert_array_equal(build_cut_diagonal(EDGE).values, [0, 1, 1, 0])
    np.testing.assert_array_equal(build_cost_diagonal(EDGE).values, [0, -1, -1, 0])


def test_triangle():
    np.testing.assert_array_equal(build_cut_diagonal(complete_graph(3)).values, [0, 2, 2, 2, 2, 2, 2, 0])


def test_k4_cost_minimum():
    assert build_cost_diagonal(complete_graph(4)).values.min() == -4


def test_er10_argmax_matches_brute_force():
    g = gen_erdos_renyi(10, 0.4, 5)
    cut = build_cut_diagonal(g)
    sol = max_cut_brute_force(g)
    assert cut.values[int(np.argmax(cut.values))] == sol.optimum
    assert cut.optimum == sol.optimum


def test_cost_minimum_is_minus_optimum(rng):
    for _ in range(50):
        g = random_graph(rng, int(rng.choice([4, 6, 8, 10])))
        assert build_cost_diagonal(g).values.min() == -max_cut_brute_force(g).optimum


def test_diagonal_matches_cut_value(rng):
    for _ in range(100):
        g = random_graph(rng)
        b = int(rng.integers(1 << g.n))
        assert build_cut_diagonal(g).values[b] == cut_value(g, index_to_bitstring(b, g.n))


def test_table_invariants(rng):
    for _ in range(20):
        g = random_graph(rng)
        cut = build_cut_diagonal(g).values
        cost = build_cost_diagonal(g).values
        full = (1 << g.n) - 1
        assert cut[0] == 0 and cut[full] == 0
        np.testing.assert_array_equal(cut, cut[full - np.arange(full + 1)])
        assert cut.min() >= 0 and cut.max() <= g.m
        np.testing.assert_array_equal(cost, -cut)
        assert set(np.flatnonzero(cost == cost.min())) == set(np.flatnonzero(cut == cut.max()))


def test_matches_ising_form(rng):
    for _ in range(5):
        g = random_graph(rng, 6)
        h = dense_cut(g)
        assert np.allclose(h, np.diag(np.diag(h)))
        np.testing.assert_allclose(np.diag(h).real, build_cut_diagonal(g).values, atol=1e-12)


def test_tables_read_only():
    cut = build_cut_diagonal(EDGE)
    with pytest.raises(ValueError):
        cut.values[0] = 5


@pytest.mark.parametrize("n,expected", [(1, ["X_0"]), (3, ["X_0", "X_1", "X_2"])])
def test_mixer_terms(n, expected):
    terms = mixer_pauli_terms(n)
    assert [str(t) for t in terms] == expected
    assert all(t.coeff == 1.0 for t in terms)


def test_mixer_terms_14():
    assert len(mixer_pauli_terms(14)) == 14


def test_mixer_terms_need_a_qubit():
    with pytest.raises(ValueError):
        mixer_pauli_terms(0)
