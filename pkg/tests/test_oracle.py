"""
Tests for the truncated-generator oracle.
"""

import math
import unittest

import numpy as np

from wavegraph.analysis import (
    McEstimate,
    default_functionals,
    energy_rate_functional,
    generator_action,
    generator_oracle,
    named_functional,
    oracle_distribution,
    oracle_expectations,
    oracle_rate,
)
from wavegraph.analysis.oracle import transitions
from wavegraph.graph import build_graph, lattice_graph, ring_graph, two_node_graph
from wavegraph.ips import init_state, run_replicas
from wavegraph.ode import solve_ibvp
from wavegraph.utils.exceptions import EstimatorError, GraphError


class TestTransitions(unittest.TestCase):
    """Test the move list of a single state."""

    def test_two_node_moves(self):
        """Test rates and targets from f(a) = 1, c = 2."""
        graph = two_node_graph(weight=0.5)
        moves = transitions(graph, np.array([1, 0]), np.array([2]))
        self.assertEqual(len(moves), 2)
        rate, nodes, edges = moves[0]
        self.assertEqual(rate, 1.0)
        np.testing.assert_array_equal(edges, [1])
        rate, nodes, edges = moves[1]
        self.assertEqual(rate, 1.0)
        np.testing.assert_array_equal(nodes, [2, -1])

    def test_fixed_node_skipped(self):
        """Test that edge moves leave V_1 nodes alone."""
        graph = two_node_graph(boundary=("V1", "V0"))
        (_, nodes, _), = transitions(graph, np.array([0, 0]), np.array([1]))
        np.testing.assert_array_equal(nodes, [0, -1])


class TestGeneratorOracle(unittest.TestCase):
    """Test enumeration and the generator matrix."""

    def setUp(self):
        """Set up the two-node oracle from f(a) = 1."""
        self.graph = two_node_graph()
        self.f0 = init_state(self.graph, {"a": 1})
        self.oracle = generator_oracle(self.graph, self.f0, 8)

    def test_generator_rows(self):
        """Test that rows sum to zero and the overflow state absorbs."""
        Q = self.oracle.Q
        self.assertEqual(Q.shape, (self.oracle.state_count + 1,) * 2)
        np.testing.assert_allclose(np.asarray(Q.sum(axis=1)).ravel(), 0.0, atol=1e-12)
        np.testing.assert_array_equal(Q[self.oracle.overflow].toarray(), 0.0)
        np.testing.assert_array_equal(self.oracle.nodes[0], [1, 0])
        self.assertEqual(self.oracle.p0[0], 1.0)

    def test_zero_jump_cap(self):
        """Test that J = 0 keeps only f_0 and its values at t = 0."""
        oracle = generator_oracle(self.graph, self.f0, 0)
        self.assertEqual(oracle.state_count, 1)
        result = oracle_expectations(oracle, 0.0, ["node:a", "node:b"])
        self.assertEqual(result.values, {"node:a": 1.0, "node:b": 0.0})
        self.assertEqual(result.error_bound, 0.0)
        later = oracle_expectations(oracle, 0.5, ["node:a"])
        self.assertAlmostEqual(later.overflow_mass, 1.0 - math.exp(-0.5), places=10)

    def test_absorbing_start(self):
        """Test that the zero state is its own distribution."""
        oracle = generator_oracle(self.graph, init_state(self.graph), 5)
        p_t, tail = oracle_distribution(oracle, 1.0)
        np.testing.assert_array_equal(p_t, [1.0, 0.0])
        self.assertEqual(tail, 0.0)

    def test_distribution_is_normalized(self):
        """Test that probability is conserved including the overflow state."""
        p_t, tail = oracle_distribution(self.oracle, 0.7)
        self.assertAlmostEqual(float(p_t.sum()), 1.0, delta=1e-10 + tail)
        self.assertTrue(np.all(p_t > -1e-15))
        self.assertLess(tail, 1e-12)

    def test_matches_ode_mean(self):
        """Test E f_t against the ODE solution on the two-node graph."""
        oracle = generator_oracle(self.graph, self.f0, 12)
        result = oracle_expectations(oracle, 0.3, ["node:a", "node:b", "edge:a-b", "edge:b-a"])
        exact = solve_ibvp(self.graph, self.f0, 0.3, 1e-4).at(0.3)
        tolerance = 1e-6 + 20.0 * result.error_bound
        self.assertAlmostEqual(result.values["node:a"], exact.nodes[0], delta=tolerance)
        self.assertAlmostEqual(result.values["node:b"], exact.nodes[1], delta=tolerance)
        self.assertAlmostEqual(result.values["edge:a-b"], exact.edges[0], delta=tolerance)
        self.assertAlmostEqual(result.values["edge:b-a"], -exact.edges[0], delta=tolerance)
        self.assertAlmostEqual(result.values["node:a"], 0.5 * (1.0 + math.cos(math.sqrt(2.0) * 0.3)),
                               delta=1e-6)

    def test_matches_monte_carlo(self):
        """Test exact expectations against replica averages."""
        oracle = generator_oracle(self.graph, self.f0, 12)
        result = oracle_expectations(oracle, 0.3, ["energy", "l1"])
        batch = run_replicas(self.f0, [0.3], 20000, seed=17)
        for name in ("energy", "l1"):
            samples = named_functional(self.graph, name)(batch.nodes[:, 0], batch.edges[:, 0])
            est = McEstimate.from_samples(samples, 17)
            self.assertTrue(est.within(result.values[name], sigmas=4.0, slack=result.error_bound * 200))

    def test_state_cap(self):
        """Test that oversized enumerations raise EstimatorError."""
        with self.assertRaises(EstimatorError):
            generator_oracle(self.graph, self.f0, 8, state_cap=3)

    def test_invalid_inputs(self):
        """Test lazy graphs and negative jump caps."""
        with self.assertRaises(EstimatorError):
            generator_oracle(lattice_graph(1), init_state(lattice_graph(1), {(0,): 1}), 2)
        with self.assertRaises(EstimatorError):
            generator_oracle(self.graph, self.f0, -1)
        with self.assertRaises(EstimatorError):
            oracle_distribution(self.oracle, -0.1)


class TestFunctionals(unittest.TestCase):
    """Test named functionals and the generator action."""

    def test_default_functionals(self):
        """Test the default names on the two-node graph."""
        self.assertEqual(default_functionals(two_node_graph()),
                         ["node:a", "node:b", "edge:a-b", "energy", "l1"])

    def test_integer_ids(self):
        """Test node and edge names on the ring."""
        graph = ring_graph(4)
        nodes = np.array([[0, 5, 0, 0]])
        edges = np.array([[0, 0, 0, 7]])
        self.assertEqual(named_functional(graph, "node:1")(nodes, edges)[0], 5.0)
        self.assertEqual(named_functional(graph, "edge:0-3")(nodes, edges)[0], -7.0)

    def test_edge_names_with_dashes_in_ids(self):
        """Test edge names whose node ids contain '-'."""
        graph = build_graph({
            "nodes": [{"id": -1, "mass": 1.0}, {"id": 0, "mass": 1.0}, {"id": 1, "mass": 1.0},
                      {"id": "left-end", "mass": 1.0}],
            "edges": [{"tail": -1, "head": 0}, {"tail": 0, "head": 1}, {"tail": "left-end", "head": -1}],
        })
        nodes = np.zeros((1, 4))
        edges = np.array([[3, 5, 7]])
        self.assertEqual(named_functional(graph, "edge:-1-0")(nodes, edges)[0], 3.0)
        self.assertEqual(named_functional(graph, "edge:0--1")(nodes, edges)[0], -3.0)
        self.assertEqual(named_functional(graph, "edge:left-end--1")(nodes, edges)[0], 7.0)
        names = default_functionals(graph)
        self.assertIn("edge:left-end--1", names)
        for name in names:
            named_functional(graph, name)
        with self.assertRaises(GraphError):
            named_functional(graph, "edge:-1-1")

    def test_unknown_functional(self):
        """Test that unknown names raise EstimatorError."""
        with self.assertRaises(EstimatorError):
            named_functional(two_node_graph(), "entropy")

    def test_energy_action(self):
        """Test A ||f||^2 = energy_rate_functional on every enumerated state."""
        graph = build_graph({
            "nodes": [{"id": "x", "mass": 2.0}, {"id": "y", "mass": 0.5}, {"id": "z", "mass": 1.0}],
            "edges": [{"tail": "x", "head": "y", "weight": 3.0}, {"tail": "z", "head": "y", "weight": 0.5}],
        })
        oracle = generator_oracle(graph, init_state(graph, {"y": 1}, {("x", "y"): -1}), 3)
        action = generator_action(oracle, named_functional(graph, "energy"))
        np.testing.assert_allclose(action, energy_rate_functional(graph, oracle.nodes, oracle.edges))

    def test_oracle_rate(self):
        """Test d/dt E||f_t||^2 against the expected energy rate."""
        graph = two_node_graph()
        oracle = generator_oracle(graph, init_state(graph, {"a": 1}), 10)
        rate = oracle_rate(oracle, 0.2, "energy")
        expected = oracle_expectations(oracle, 0.2, ["energy_rate"])
        self.assertAlmostEqual(rate.values["energy"], expected.values["energy_rate"], places=10)
        self.assertEqual(set(rate.to_dict()), {"t", "energy", "overflow_mass", "poisson_tail"})


if __name__ == "__main__":
    unittest.main()
