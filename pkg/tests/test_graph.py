import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from falqon_transfer.graph import (
    Family,
    Graph,
    GraphError,
    complete_graph,
    cut_value,
    cycle_graph,
    format_edgelist,
    gen_erdos_renyi,
    gen_three_regular,
    max_cut_brute_force,
    parse_edgelist,
    petersen_graph,
    read_graph,
    write_graph,
)


def exhaustive_max_cut(g):
    # independent oracle: every assignment, no symmetry reduction
    return max(cut_value(g, bits) for bits in itertools.product((0, 1), repeat=g.n))


class TestThreeRegular:
    def test_n4_is_k4(self):
        for seed in range(5):
            g = gen_three_regular(4, seed)
            assert g.edges == complete_graph(4).edges

    def test_deterministic(self):
        assert gen_three_regular(8, 1) == gen_three_regular(8, 1)

    def test_seeds_differ(self):
        assert len({gen_three_regular(12, s).edges for s in range(20)}) > 1

    def test_degree_three_over_many_samples(self):
        for seed in range(1000):
            g = gen_three_regular(10, seed)
            assert np.all(g.degrees() == 3)
            assert g.m == 15
            assert g.family is Family.THREE_REGULAR and g.seed == seed

    @pytest.mark.parametrize("n", [3, 2, 7, 0])
    def test_invalid_n(self, n):
        with pytest.raises(GraphError):
            gen_three_regular(n, 0)

    def test_roughly_uniform_on_n6(self):
        # two isomorphism classes on 6 vertices: K_{3,3} (10 labellings)
        # and the prism (60 labellings); uniform sampling gives 1/7 bipartite
        bip = 0
        trials = 3000
        for s in range(trials):
            g = gen_three_regular(6, s)
            bip += max_cut_brute_force(g).optimum == 9
        frac = bip / trials
        se = np.sqrt((1 / 7) * (6 / 7) / trials)
        assert abs(frac - 1 / 7) < 4 * se


class TestErdosRenyi:
    def test_p_one_is_complete(self):
        g = gen_erdos_renyi(14, 1.0, 3)
        assert g.m == 91

    def test_deterministic(self):
        assert gen_erdos_renyi(8, 0.5, 11) == gen_erdos_renyi(8, 0.5, 11)

    def test_mean_edge_count(self):
        counts = np.array([gen_erdos_renyi(14, 0.3, s).m for s in range(2000)])
        se = np.sqrt(91 * 0.3 * 0.7 / 2000)
        assert abs(counts.mean() - 27.3) < 3 * se

    @pytest.mark.parametrize("p", [0.0, -0.1, 1.01])
    def test_invalid_p(self, p):
        with pytest.raises(GraphError):
            gen_erdos_renyi(8, p, 0)

    def test_never_empty(self):
        # at p=0.02 an empty draw on 4 vertices is the common case
        for s in range(200):
            assert gen_erdos_renyi(4, 0.02, s).m >= 1


class TestCutValue:
    def test_triangle(self):
        assert cut_value(complete_graph(3), "001") == 2

    def test_all_zero(self):
        assert cut_value(petersen_graph(), "0" * 10) == 0

    def test_c4_alternating(self):
        assert cut_value(cycle_graph(4), "0101") == 4

    def test_sequence_input(self):
        assert cut_value(cycle_graph(4), [0, 1, 0, 1]) == 4

    def test_length_mismatch(self):
        with pytest.raises(GraphError):
            cut_value(cycle_graph(4), "010")

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 2**12 - 1))
    def test_complement_symmetry(self, seed, mask):
        g = gen_erdos_renyi(12, 0.4, seed)
        bits = [(mask >> i) & 1 for i in range(12)]
        assert cut_value(g, bits) == cut_value(g, [1 - b for b in bits])


class TestBruteForce:
    def test_k4(self):
        assert max_cut_brute_force(complete_graph(4)).optimum == 4

    def test_k14(self):
        assert max_cut_brute_force(complete_graph(14)).optimum == 49

    def test_petersen_against_exhaustive_scan(self):
        g = petersen_graph()
        sol = max_cut_brute_force(g)
        assert sol.optimum == exhaustive_max_cut(g) == 12
        assert cut_value(g, sol.witness) == sol.optimum

    def test_single_edge_witness(self):
        assert max_cut_brute_force(Graph(2, ((0, 1),))).witness == "01"

    def test_witness_is_first_in_ascending_order(self):
        g = cycle_graph(4)
        sol = max_cut_brute_force(g)
        # index 0b1010 (vertices 1 and 3 on side 1) is the first optimum with vertex 0 fixed
        assert sol.witness == "0101"

    @pytest.mark.parametrize("seed", range(15))
    def test_random_graphs_against_exhaustive(self, seed):
        g = gen_erdos_renyi(9, 0.45, seed)
        sol = max_cut_brute_force(g)
        assert sol.optimum == exhaustive_max_cut(g)
        assert sol.witness[0] == "0"
        assert 0 < sol.optimum <= g.m

    @pytest.mark.parametrize("n", range(3, 12))
    def test_cycles(self, n):
        assert max_cut_brute_force(cycle_graph(n)).optimum == (n if n % 2 == 0 else n - 1)

    def test_size_guard(self):
        with pytest.raises(GraphError):
            max_cut_brute_force(Graph(31, ((0, 1),)))


class TestGraphValidation:
    def test_self_loop(self):
        with pytest.raises(GraphError):
            Graph(3, ((1, 1),))

    def test_duplicate(self):
        with pytest.raises(GraphError):
            Graph(3, ((0, 1), (1, 0)))

    def test_out_of_range(self):
        with pytest.raises(GraphError):
            Graph(3, ((0, 3),))


class TestEdgeList:
    def test_header_er(self):
        g = gen_erdos_renyi(14, 1.0, 7)
        assert format_edgelist(g).splitlines()[0] == "14 91 er 1.0 7"

    def test_roundtrip(self, tmp_path):
        for g in (gen_three_regular(10, 4), gen_erdos_renyi(9, 0.3, 2), petersen_graph()):
            write_graph(g, tmp_path / "g.txt")
            assert read_graph(tmp_path / "g.txt") == g

    def test_edge_count_mismatch(self):
        with pytest.raises(GraphError):
            parse_edgelist("3 2 custom - -\n0 1\n")

    def test_bad_header(self):
        with pytest.raises(GraphError):
            parse_edgelist("3 1\n0 1\n")
