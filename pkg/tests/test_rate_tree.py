"""
Tests for the event-rate sum tree.
"""

import unittest

import numpy as np

from wavegraph.ips import RateTree
from wavegraph.ips.rate_tree import capacity_for


class TestRateTree(unittest.TestCase):
    """Test totals, updates and sampling."""

    def setUp(self):
        """Set up node rates [1, 2] and edge rate [3]."""
        self.tree = RateTree(np.array([1.0, 2.0]), np.array([3.0]))

    def test_total(self):
        """Test that the root holds the sum of all rates."""
        self.assertEqual(self.tree.total, 6.0)
        self.assertEqual(self.tree.leaf_sum(), 6.0)

    def test_sample_boundaries(self):
        """Test that leaves are laid out node 0, edge 0, node 1."""
        self.assertEqual(self.tree.sample(0.1), ("node", 0))
        self.assertEqual(self.tree.sample(0.5), ("edge", 0))
        self.assertEqual(self.tree.sample(0.9), ("node", 1))

    def test_update(self):
        """Test that updates keep the total exact."""
        self.tree.set_edge(0, 0.0)
        self.tree.set_node(0, 4.0)
        self.assertEqual(self.tree.total, 6.0)
        self.assertEqual(self.tree.node_rate(0), 4.0)
        self.assertEqual(self.tree.edge_rate(0), 0.0)

    def test_zero_rate_never_sampled(self):
        """Test that a zero leaf is skipped even for u close to 1."""
        self.tree.set_node(1, 0.0)
        self.assertEqual(self.tree.sample(0.999999999), ("edge", 0))

    def test_growth(self):
        """Test that setting a rate beyond the capacity grows the tree."""
        self.tree.set_node(10, 1.5)
        self.assertEqual(self.tree.total, 7.5)
        self.assertEqual(self.tree.node_rate(10), 1.5)
        self.assertEqual(self.tree.edge_rate(0), 3.0)
        self.assertEqual(self.tree.edge_rate(1000), 0.0)

    def test_copy_is_independent(self):
        """Test that copies do not share storage."""
        clone = self.tree.copy()
        clone.set_node(0, 10.0)
        self.assertEqual(self.tree.total, 6.0)
        self.assertEqual(clone.total, 15.0)

    def test_sampling_frequencies(self):
        """Test that events are drawn proportionally to their rates."""
        rng = np.random.default_rng(11)
        counts = {("node", 0): 0, ("edge", 0): 0, ("node", 1): 0}
        draws = 30000
        for u in rng.random(draws):
            counts[self.tree.sample(float(u))] += 1
        self.assertAlmostEqual(counts[("node", 0)] / draws, 1 / 6, delta=0.01)
        self.assertAlmostEqual(counts[("edge", 0)] / draws, 3 / 6, delta=0.01)
        self.assertAlmostEqual(counts[("node", 1)] / draws, 2 / 6, delta=0.01)

    def test_capacity_for(self):
        """Test power-of-two capacities."""
        self.assertEqual(capacity_for(0), 2)
        self.assertEqual(capacity_for(5), 8)
        self.assertEqual(capacity_for(8), 8)


if __name__ == "__main__":
    unittest.main()
