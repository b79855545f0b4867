"""
Tests for seeded replica runs, the worker pool and the Yule process.
"""

import math
import unittest
from unittest.mock import patch

import numpy as np

from wavegraph.graph import lattice_graph, ring_graph, two_node_graph
from wavegraph.ips import init_state, run_replicas, yule_counts, yule_mean, yule_simulate
from wavegraph.utils.exceptions import ConfigurationError, EstimatorError, SimulationError
from wavegraph.utils.parallel import ReplicaPool, default_workers, replica_rng


class TestReplicaRng(unittest.TestCase):
    """Test per-replica random streams."""

    def test_reproducible_and_distinct(self):
        """Test that (seed, i) fixes the stream and i separates streams."""
        a = replica_rng(5, 0).random(3)
        np.testing.assert_array_equal(a, replica_rng(5, 0).random(3))
        self.assertFalse(np.array_equal(a, replica_rng(5, 1).random(3)))
        self.assertFalse(np.array_equal(a, replica_rng(6, 0).random(3)))


class TestReplicaPool(unittest.TestCase):
    """Test in-process and multi-process execution."""

    def test_invalid_workers(self):
        """Test that worker counts must be positive integers."""
        with self.assertRaises(ConfigurationError):
            ReplicaPool(workers=0)

    def test_in_process_order(self):
        """Test that results come back in replica order."""
        self.assertEqual(ReplicaPool(workers=1).map(str, 4), ["0", "1", "2", "3"])
        self.assertEqual(ReplicaPool(workers=1).map(str, 0), [])

    def test_worker_processes_order(self):
        """Test that chunked worker results keep replica order."""
        self.assertEqual(ReplicaPool(workers=2, chunk_size=2).map(str, 5), ["0", "1", "2", "3", "4"])

    @patch("wavegraph.utils.parallel.psutil.cpu_count", return_value=None)
    @patch("wavegraph.utils.parallel.os.cpu_count", return_value=3)
    def test_default_workers_fallback(self, mock_os_count, mock_psutil_count):
        """Test the logical core fallback when physical cores are unknown."""
        self.assertEqual(default_workers(), 3)
        self.assertEqual(ReplicaPool().workers, 3)


class TestRunReplicas(unittest.TestCase):
    """Test replica batches."""

    def setUp(self):
        """Set up a two-node state with one particle at a."""
        self.state = init_state(two_node_graph(), {"a": 1})

    def test_shapes(self):
        """Test the batch layout and the time-0 sample."""
        batch = run_replicas(self.state, [0.0, 0.5], 4, seed=1)
        self.assertEqual(batch.nodes.shape, (4, 2, 2))
        self.assertEqual(batch.edges.shape, (4, 2, 1))
        self.assertEqual(batch.integrals.shape, (4, 2, 2))
        self.assertEqual(batch.replicas, 4)
        np.testing.assert_array_equal(batch.nodes[:, 0], [[1, 0]] * 4)
        np.testing.assert_array_equal(batch.jumps[:, 0], 0)
        self.assertEqual(batch.time_index(0.5), 1)
        self.assertEqual(batch.watch, ["a", "b"])

    def test_state_not_modified(self):
        """Test that replicas start from private copies."""
        run_replicas(self.state, [1.0], 3, seed=2)
        np.testing.assert_array_equal(self.state.nodes, [1, 0])
        self.assertEqual(self.state.time, 0.0)

    def test_worker_independence(self):
        """Test that results do not depend on the number of workers."""
        state = init_state(ring_graph(5), [2, 0, -1, 0, 0])
        serial = run_replicas(state, [0.1, 0.2], 6, seed=3, workers=1)
        parallel = run_replicas(state, [0.1, 0.2], 6, seed=3, workers=2)
        np.testing.assert_array_equal(serial.nodes, parallel.nodes)
        np.testing.assert_array_equal(serial.edges, parallel.edges)
        np.testing.assert_array_equal(serial.jumps, parallel.jumps)

    def test_lazy_graph(self):
        """Test batches on the lattice with watched nodes."""
        state = init_state(lattice_graph(1), {(0,): 2})
        batch = run_replicas(state, [0.0, 0.3], 3, seed=4, watch=[(0,)])
        self.assertIsNone(batch.nodes)
        self.assertEqual(batch.integrals.shape, (3, 2, 1))
        np.testing.assert_array_equal(batch.jumps[:, 0], 0)

    def test_lazy_graph_requires_watch(self):
        """Test that lazy batches need watched nodes."""
        state = init_state(lattice_graph(1), {(0,): 2})
        with self.assertRaises(EstimatorError):
            run_replicas(state, [0.3], 3, seed=4)

    def test_unsorted_times(self):
        """Test that sample times must be sorted and non-negative."""
        with self.assertRaises(EstimatorError):
            run_replicas(self.state, [0.5, 0.1], 2, seed=1)
        with self.assertRaises(EstimatorError):
            run_replicas(self.state, [-0.1], 2, seed=1)

    def test_circuit_breaker(self):
        """Test that a replica beyond max_jumps raises SimulationError."""
        state = init_state(ring_graph(5), [20, 0, 0, 0, 0])
        with self.assertRaises(SimulationError):
            run_replicas(state, [1.0], 2, seed=5, max_jumps=3)

    def test_unsampled_time(self):
        """Test that time_index rejects unknown times."""
        batch = run_replicas(self.state, [0.5], 2, seed=1)
        with self.assertRaises(EstimatorError):
            batch.time_index(0.25)


class TestYule(unittest.TestCase):
    """Test the Yule comparator."""

    def test_zero_horizon(self):
        """Test that nothing is born by time 0."""
        self.assertEqual(yule_simulate(1.0, 3, 0.0, np.random.default_rng(0)), 0)

    def test_invalid_parameters(self):
        """Test rate, start and horizon validation."""
        rng = np.random.default_rng(0)
        with self.assertRaises(SimulationError):
            yule_simulate(0.0, 1, 1.0, rng)
        with self.assertRaises(SimulationError):
            yule_simulate(1.0, 0, 1.0, rng)
        with self.assertRaises(SimulationError):
            yule_simulate(1.0, 1, -1.0, rng)

    def test_mean_population(self):
        """Test E[r + births] = r exp(lambda t)."""
        lam, r, t, R = 1.0, 2, 0.5, 20000
        population = r + yule_counts(lam, r, t, R, seed=9)
        stderr = population.std(ddof=1) / math.sqrt(R)
        self.assertLess(abs(population.mean() - yule_mean(lam, r, t)), 4.0 * stderr)
        self.assertAlmostEqual(yule_mean(lam, r, t), 2.0 * math.exp(0.5))

    def test_reproducible(self):
        """Test that counts are fixed by the seed."""
        np.testing.assert_array_equal(yule_counts(1.0, 1, 1.0, 50, 3), yule_counts(1.0, 1, 1.0, 50, 3))


if __name__ == "__main__":
    unittest.main()
