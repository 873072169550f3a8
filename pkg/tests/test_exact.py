import numpy as np
import pytest

from moranlab import (CapacityError, Digraph, GraphError, baseline_graph,
                      exact_extinction, exact_extinction_from_set,
                      expected_time_vs_bound, monotonicity_check)
from moranlab.smallgraphs import connected_graphs

from oracles import (brute_expected_steps_all_states,
                     brute_extinction_all_states, complete_graph_extinction,
                     neutral_undirected_per_vertex)

TOL = 1e-10


def two_cycle():
    return Digraph(2, [(0, 1), (1, 0)], directed=True)


class TestClosedForms:
    @pytest.mark.parametrize("r", [1.5, 2.0, 5.0])
    def test_two_vertices(self, r):
        for G in (Digraph(2, [(0, 1)]), two_cycle()):
            assert abs(exact_extinction(G, r).mean_extinction
                       - 1.0 / (1.0 + r)) < TOL

    @pytest.mark.parametrize("n", range(2, 11))
    @pytest.mark.parametrize("r", [1.5, 2.0, 5.0])
    def test_complete_graphs(self, n, r):
        got = exact_extinction(baseline_graph("complete", n), r).mean_extinction
        assert abs(got - complete_graph_extinction(n, r)) < TOL

    def test_neutral_mean_is_one_minus_inverse_n(self):
        for G in (baseline_graph("star", 7), baseline_graph("path", 5),
                  Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
                          directed=True)):
            res = exact_extinction(G, 1.0)
            assert abs(res.mean_extinction - (1.0 - 1.0 / G.n)) < TOL

    def test_neutral_per_vertex_undirected(self):
        # fixation from v at r=1 is proportional to 1/d(v)
        for G in (baseline_graph("star", 8), baseline_graph("path", 6)):
            res = exact_extinction(G, 1.0)
            want = neutral_undirected_per_vertex(G)
            assert np.abs(res.per_vertex_extinction - want).max() < TOL


class TestAgainstBruteForce:
    def test_full_state_vectors(self):
        rng = np.random.default_rng(7)
        graphs = [baseline_graph("star", 5), baseline_graph("cycle", 5),
                  Digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 0)],
                          directed=True)]
        for G in graphs:
            for r in (0.5, 1.0, 2.0, 5.0):
                res = exact_extinction(G, r, with_times=True)
                assert np.abs(res.ell_by_state
                              - brute_extinction_all_states(G, r)).max() < TOL
                assert np.abs(res.expected_steps_by_state
                              - brute_expected_steps_all_states(G, r)).max() < 1e-8

    def test_two_cycle_from_single(self):
        # hand-solved 4-state chain: both transitions from {0} absorb
        ell, steps = exact_extinction_from_set(two_cycle(), 2.0, [0])
        assert abs(ell - 1.0 / 3.0) < TOL
        assert abs(steps - 1.0) < TOL

    def test_absorbed_sets(self):
        G = baseline_graph("complete", 3)
        assert exact_extinction_from_set(G, 2.0, [0, 1, 2]) == (0.0, 0.0)
        assert exact_extinction_from_set(G, 2.0, []) == (1.0, 0.0)


class TestInvariants:
    def test_extinction_plus_fixation_is_one(self):
        # fixation solved as an independent hitting problem on the reverse
        # boundary: here via 1 - ell checked against a direct solve
        from oracles import brute_moran_transition
        G = baseline_graph("star", 5)
        r = 2.0
        res = exact_extinction(G, r)
        P = brute_moran_transition(G, r)
        ns = 1 << G.n
        full = ns - 1
        trans = [s for s in range(ns) if s not in (0, full)]
        A = np.eye(len(trans)) - P[np.ix_(trans, trans)]
        fix = np.linalg.solve(A, P[trans, full])
        rho = np.zeros(ns)
        rho[full] = 1.0
        rho[trans] = fix
        assert np.abs(res.ell_by_state + rho - 1.0).max() < TOL

    def test_strictly_interior_probabilities(self):
        for G in (baseline_graph("star", 6), two_cycle()):
            res = exact_extinction(G, 2.0)
            assert np.all(res.per_vertex_extinction > 0)
            assert np.all(res.per_vertex_extinction < 1)

    def test_mean_is_average_of_singletons(self):
        res = exact_extinction(baseline_graph("path", 5), 1.7)
        assert abs(res.mean_extinction
                   - res.per_vertex_extinction.mean()) < TOL


class TestTimeBound:
    def test_two_cycle(self):
        rep = expected_time_vs_bound(two_cycle(), 2.0)
        assert rep.bound == 32.0
        assert rep.max_expected_steps <= 32.0
        assert rep.satisfied

    def test_complete_three(self):
        rep = expected_time_vs_bound(baseline_graph("complete", 3), 2.0)
        assert rep.bound == 162.0
        assert rep.satisfied and rep.max_expected_steps < 162.0

    def test_requires_r_above_one(self):
        with pytest.raises(GraphError):
            expected_time_vs_bound(two_cycle(), 1.0)


class TestMonotonicity:
    def test_two_cycle_one_to_two(self):
        rep = monotonicity_check(two_cycle(), 1.0, 2.0)
        assert rep.ok
        assert abs(rep.ell_low - 0.5) < TOL
        assert abs(rep.ell_high - 1.0 / 3.0) < TOL

    def test_equal_fitness(self):
        rep = monotonicity_check(baseline_graph("cycle", 4), 2.0, 2.0)
        assert rep.ok and rep.ell_low == rep.ell_high

    def test_exhaustive_small_sweep(self):
        # all connected graphs up to 6 vertices, three fitness pairs
        pairs = [(1.0, 1.5), (1.5, 2.0), (2.0, 5.0)]
        for G in connected_graphs(2, 6):
            for lo, hi in pairs:
                assert monotonicity_check(G, lo, hi).ok


class TestErrors:
    def test_not_strongly_connected(self):
        with pytest.raises(GraphError):
            exact_extinction(Digraph(3, [(0, 1), (1, 2)], directed=True), 2.0)

    def test_state_cap(self):
        with pytest.raises(CapacityError):
            exact_extinction(baseline_graph("cycle", 16), 2.0, state_cap=14)

    def test_bad_fitness(self):
        with pytest.raises(GraphError):
            exact_extinction(two_cycle(), 0.0)
