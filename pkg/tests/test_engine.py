"""
Tests for particle states and the event-driven engine.
"""

import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pandas as pd

from wavegraph.graph import build_graph, lattice_graph, ring_graph, two_node_graph
from wavegraph.ips import (
    Observer,
    hydro_init,
    init_state,
    simulate,
    simulate_kernel,
    step,
    write_trajectory,
)
from wavegraph.ode import PeriodicData
from wavegraph.utils.exceptions import FieldError, GraphError, SimulationError
from wavegraph.utils.parallel import replica_rng


class TestParticleState(unittest.TestCase):
    """Test initial states and cached rates."""

    def test_init_state(self):
        """Test integer data and the total rate ||f||_1."""
        graph = two_node_graph(mass=0.5, weight=2.0)
        state = init_state(graph, {"a": 1, "b": -2}, {("b", "a"): 3})
        np.testing.assert_array_equal(state.nodes, [1, -2])
        np.testing.assert_array_equal(state.edges, [-3])
        self.assertAlmostEqual(state.total_rate, 2.0 + 4.0 + 6.0)
        self.assertAlmostEqual(state.l1_norm(), state.total_rate)

    def test_non_integer_rejected(self):
        """Test that particle counts must be integers."""
        with self.assertRaises(FieldError):
            init_state(two_node_graph(), {"a": 0.5})

    def test_unknown_node_rejected(self):
        """Test that support outside the graph is rejected."""
        with self.assertRaises(GraphError):
            init_state(two_node_graph(), {"c": 1})

    def test_copy_is_independent(self):
        """Test that copies share neither counts nor rate tree."""
        state = init_state(two_node_graph(), {"a": 1})
        clone = state.copy()
        step(clone, np.random.default_rng(0))
        np.testing.assert_array_equal(state.edges, [0])
        self.assertEqual(state.total_rate, 1.0)
        field = state.to_field()
        np.testing.assert_array_equal(field.nodes, [1.0, 0.0])
        self.assertEqual(field.nodes.dtype, np.float64)


class TestStep(unittest.TestCase):
    """Test single transitions."""

    def test_node_event(self):
        """Test that a node event at a moves -1 onto the edge a->b."""
        state = init_state(two_node_graph(), {"a": 1})
        record = step(state, np.random.default_rng(1))
        self.assertEqual((record.kind, record.index, record.sign), ("node", 0, 1))
        np.testing.assert_array_equal(state.nodes, [1, 0])
        np.testing.assert_array_equal(state.edges, [-1])
        self.assertEqual(state.jumps, 1)
        self.assertGreater(state.time, 0.0)
        self.assertEqual(state.total_rate, 2.0)

    def test_edge_event(self):
        """Test that an edge event moves one particle from head to tail."""
        state = init_state(two_node_graph(), None, {("a", "b"): 2})
        record = step(state, np.random.default_rng(2))
        self.assertEqual((record.kind, record.sign), ("edge", 1))
        np.testing.assert_array_equal(state.nodes, [1, -1])
        np.testing.assert_array_equal(state.edges, [2])

    def test_edge_event_skips_fixed_node(self):
        """Test that V_1 nodes are never changed."""
        graph = two_node_graph(boundary=("V0", "V1"))
        state = init_state(graph, None, {("a", "b"): -1})
        step(state, np.random.default_rng(3))
        np.testing.assert_array_equal(state.nodes, [-1, 0])

    def test_absorbing_state(self):
        """Test that stepping the zero state raises SimulationError."""
        state = init_state(two_node_graph())
        self.assertTrue(state.is_absorbing)
        with self.assertRaises(SimulationError):
            step(state, np.random.default_rng(0))


class TestSimulate(unittest.TestCase):
    """Test trajectories up to a horizon."""

    def setUp(self):
        """Set up a floored standing wave on the ring."""
        data = PeriodicData.from_json({"phi": [[1, 0.0, 1.0]], "psi": [[2, 0.0, 1.0]]})
        self.state = hydro_init(8, 5, data)

    def test_conservation_laws(self):
        """Test that the node sum and the ring edge sum never change."""
        nodes0, edges0 = self.state.nodes.sum(), self.state.edges.sum()
        summary = simulate(self.state, 0.2, rng=np.random.default_rng(5), debug=True)
        self.assertGreater(summary.jumps, 0)
        self.assertEqual(self.state.nodes.sum(), nodes0)
        self.assertEqual(self.state.edges.sum(), edges0)
        self.assertEqual(self.state.time, 0.2)

    def test_cached_rate_matches(self):
        """Test that the cached total rate tracks ||f||_1."""
        simulate(self.state, 0.1, rng=np.random.default_rng(6))
        self.assertAlmostEqual(self.state.total_rate, self.state.l1_norm(), places=9)

    def test_debug_from_environment(self):
        """Test that WAVEGRAPH_DEBUG enables the per-jump checks."""
        with patch.dict(os.environ, {"WAVEGRAPH_DEBUG": "1"}):
            with patch("wavegraph.ips.engine._InvariantChecker") as mock_checker:
                simulate(self.state, 0.01, rng=np.random.default_rng(8))
        self.assertTrue(mock_checker.called)

    def test_horizon_before_current_time(self):
        """Test that T must not lie in the past."""
        self.state.time = 1.0
        with self.assertRaises(SimulationError):
            simulate(self.state, 0.5)

    def test_circuit_breaker(self):
        """Test that max_jumps stops runaway trajectories."""
        with self.assertRaises(SimulationError) as ctx:
            simulate(self.state, 10.0, rng=np.random.default_rng(0), max_jumps=5)
        self.assertEqual(ctx.exception.jumps, 5)

    def test_fixed_node_unchanged(self):
        """Test that V_1 values stay fixed along a trajectory."""
        graph = build_graph({
            "nodes": [{"id": "a", "mass": 1.0}, {"id": "b", "mass": 1.0},
                      {"id": "z", "mass": 1.0, "boundary": "V1"}],
            "edges": [{"tail": "a", "head": "b"}, {"tail": "b", "head": "z"}],
        })
        state = init_state(graph, {"a": 2, "z": 3})
        simulate(state, 1.0, rng=np.random.default_rng(9), debug=True)
        self.assertEqual(state.nodes[2], 3)

    def test_lattice_simulation(self):
        """Test that lazy graphs grow while simulating."""
        graph = lattice_graph(1)
        state = init_state(graph, {(0,): 3})
        rng = np.random.default_rng(4)
        step(state, rng, debug=True)
        simulate(state, state.time + 0.5, rng=rng, debug=True)
        self.assertGreater(graph.node_count, 1)
        self.assertEqual(len(state.nodes), graph.node_count)
        self.assertEqual(state.nodes.sum(), 3)


class TestObserver(unittest.TestCase):
    """Test samples and exact time integrals."""

    def test_integral_replay(self):
        """Test the node integral against a replay of the recorded events."""
        graph = two_node_graph()
        state = init_state(graph, {"a": 2})
        observer = Observer(watch=["a"], record_events=True)
        simulate(state, 1.0, observer, np.random.default_rng(12))

        value, last, total = 2, 0.0, 0.0
        for event in observer.events:
            if event.kind == "edge":
                total += value * (event.tau - last)
                last = event.tau
                value += event.sign
        total += value * (1.0 - last)
        self.assertAlmostEqual(observer.integral("a"), total)
        self.assertEqual(observer.watched_ids, ["a"])

    def test_sample_times(self):
        """Test snapshots at the requested times."""
        state = init_state(two_node_graph(), {"a": 1})
        observer = Observer(watch="all", sample_times=[0.5, 0.0, 1.0])
        simulate(state, 1.0, observer, np.random.default_rng(2))
        self.assertEqual(observer.snapshot_times, [0.0, 0.5, 1.0])
        np.testing.assert_array_equal(observer.snapshots[0][0], [1, 0])
        self.assertEqual(observer.sample_jumps[0], 0)
        np.testing.assert_array_equal(observer.snapshots[-1][0], state.nodes)

    def test_on_event_hook(self):
        """Test that the hook fires once per jump."""
        calls = []
        state = init_state(two_node_graph(), {"a": 1})
        summary = simulate(state, 1.0, Observer(on_event=lambda r, s: calls.append(r.n)),
                           np.random.default_rng(3))
        self.assertEqual(len(calls), summary.jumps)

    def test_write_trajectory(self):
        """Test the trajectory CSV dump."""
        graph = two_node_graph()
        state = init_state(graph, {"a": 1})
        observer = Observer(record_events=True)
        simulate(state, 1.0, observer, np.random.default_rng(4))
        with tempfile.TemporaryDirectory() as temp_dir:
            path = write_trajectory(observer.events, graph, os.path.join(temp_dir, "trajectory.csv"))
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ["n", "tau", "kind", "id", "sign"])
        self.assertEqual(len(frame), len(observer.events))


class TestHydroInit(unittest.TestCase):
    """Test the floored ring initial state."""

    def test_floored_values(self):
        """Test f(k) = floor(N psi(k/n)) and c_k = floor(N n (phi((k+1)/n) - phi(k/n)))."""
        data = PeriodicData.from_json({"phi": [[1, 0.0, 1.0]], "psi": [[1, 1.0, 0.0]]})
        n, N = 4, 10
        state = hydro_init(n, N, data)
        np.testing.assert_array_equal(state.nodes, [10, 0, -10, 0])
        np.testing.assert_array_equal(state.edges, [40, -40, -40, 40])

    def test_invalid_scale(self):
        """Test that N must be a positive integer and n at least 3."""
        data = PeriodicData.from_json({"psi": [[1, 1.0, 0.0]]})
        with self.assertRaises(FieldError):
            hydro_init(4, 0, data)
        with self.assertRaises(GraphError):
            hydro_init(2, 10, data)


class TestKernel(unittest.TestCase):
    """Test the compiled event loop."""

    def _run(self, seed):
        graph = ring_graph(6)
        state = init_state(graph, [3, 0, -2, 0, 1, 0])
        return simulate_kernel(state.nodes, state.edges, graph.mass, graph.weight, graph.tail, graph.head,
                               graph.fixed, graph.inc_ptr, graph.inc_edge, graph.inc_sign,
                               np.array([0.0, 0.05, 0.1]), replica_rng(seed, 0), 10**7)

    def test_reproducible(self):
        """Test that one seed gives one trajectory."""
        first, second = self._run(42), self._run(42)
        for a, b in zip(first[:4], second[:4]):
            np.testing.assert_array_equal(a, b)

    def test_samples(self):
        """Test the initial sample, node-sum conservation and jump counts."""
        nodes, edges, integrals, jumps, status = self._run(7)
        self.assertEqual(status, 0)
        np.testing.assert_array_equal(nodes[0], [3, 0, -2, 0, 1, 0])
        np.testing.assert_array_equal(integrals[0], 0.0)
        np.testing.assert_array_equal(nodes.sum(axis=1), 2)
        self.assertTrue(np.all(np.diff(jumps) >= 0))


if __name__ == "__main__":
    unittest.main()
