"""
Tests for closed-form bounds and the Monte Carlo estimators.
"""

import math
import unittest

import numpy as np

from wavegraph.analysis import (
    McEstimate,
    dominance_start,
    energy_rate_check,
    feynman_kac,
    finite_bound,
    finite_lln_error_bound,
    floor_to_state,
    batch_energies,
    fluctuation,
    fluctuation_series,
    jump_count_bound,
    jump_count_dominance,
    lln_bound,
    lln_error,
    lln_error_bound,
    mean_field,
    scaled_floor,
)
from wavegraph.graph import Field, lattice_graph, norm_sq, ring_graph, two_node_graph
from wavegraph.ips import init_state, run_replicas
from wavegraph.ode import PeriodicData, periodic_zeta, solve_at, solve_ibvp
from wavegraph.utils.exceptions import EstimatorError, RoundingWarning

SQRT2 = math.sqrt(2.0)


class TestBounds(unittest.TestCase):
    """Test the closed-form bounds on the two-node graph (M*d = 2)."""

    def setUp(self):
        """Set up f = one particle at a."""
        self.graph = two_node_graph()
        self.f = init_state(self.graph, {"a": 1})

    def test_lln_bound(self):
        """Test M d t ||f||_1 + (||f||_1 + M d) e^{M d t}."""
        self.assertAlmostEqual(lln_bound(self.f, 0.5), 1.0 + 3.0 * math.e)

    def test_finite_bound(self):
        """Test ||f||^2 (e^{A t / ||f||} - 1) with A = 4 sqrt(3)."""
        self.assertAlmostEqual(finite_bound(self.f, 0.1), math.expm1(0.4 * math.sqrt(3.0)))
        self.assertEqual(finite_bound(init_state(self.graph), 1.0), 0.0)

    def test_finite_bound_lazy_graph(self):
        """Test that the finite bound needs the constant A."""
        with self.assertRaises(EstimatorError):
            finite_bound(init_state(lattice_graph(1), {(0,): 1}), 1.0)

    def test_dominance_start(self):
        """Test r = ceil(||f||_1 / (M d)), at least 1."""
        self.assertEqual(dominance_start(self.f), 1)
        self.assertEqual(dominance_start(init_state(self.graph, {"a": 4})), 2)
        self.assertEqual(dominance_start(init_state(self.graph, {"a": 5})), 3)

    def test_jump_count_bound(self):
        """Test (||f||_1 / (M d) + 1) e^{M d t}."""
        self.assertAlmostEqual(jump_count_bound(self.f, 0.5), 1.5 * math.e)

    def test_lln_error_bound_without_bias(self):
        """Test that f0 = c zeta leaves only the fluctuation term."""
        zeta = Field(self.graph, [0.01, 0.0], [0.0])
        self.assertAlmostEqual(lln_error_bound(zeta, self.f, 100.0, 0.5), lln_bound(self.f, 0.5) / 1e4)
        self.assertAlmostEqual(finite_lln_error_bound(zeta, self.f, 100.0, 0.5), finite_bound(self.f, 0.5) / 1e4)
        with self.assertRaises(EstimatorError):
            lln_error_bound(zeta, self.f, 0.0, 0.5)


class TestMcEstimate(unittest.TestCase):
    """Test the estimate container."""

    def test_from_samples(self):
        """Test mean and standard error std / sqrt(R)."""
        est = McEstimate.from_samples(np.array([1.0, 2.0, 3.0, 4.0]), seed=7, bound=10.0)
        self.assertEqual(est.estimate, 2.5)
        self.assertAlmostEqual(est.stderr, np.std([1, 2, 3, 4], ddof=1) / 2.0)
        self.assertEqual((est.replicas, est.seed, est.bound), (4, 7, 10.0))
        self.assertTrue(est.within(3.0, sigmas=1.0))
        self.assertEqual(est.shifted(1.0).estimate, 3.5)
        self.assertEqual(est.to_dict()["R"], 4)

    def test_too_few_samples(self):
        """Test that R < 2 is rejected."""
        with self.assertRaises(EstimatorError):
            McEstimate.from_samples(np.array([1.0]), seed=0)


class TestFloorToState(unittest.TestCase):
    """Test rounding of real-valued initial data."""

    def test_integer_data_is_silent(self):
        """Test that integer data is used as-is."""
        graph = two_node_graph()
        state = floor_to_state(Field(graph, [1.0, -2.0], [3.0]))
        np.testing.assert_array_equal(state.nodes, [1, -2])

    def test_rounding_warning(self):
        """Test floor and the RoundingWarning for fractional data."""
        graph = two_node_graph()
        with self.assertWarns(RoundingWarning):
            state = floor_to_state(Field(graph, [0.5, -0.5], [0.0]))
        np.testing.assert_array_equal(state.nodes, [0, -1])

    def test_scaled_floor(self):
        """Test floor(c zeta) with the 1e-9 tolerance."""
        graph = two_node_graph()
        state = scaled_floor(Field(graph, [0.29, -0.011], [1.0 / 3.0]), 100.0)
        np.testing.assert_array_equal(state.nodes, [29, -2])
        np.testing.assert_array_equal(state.edges, [33])
        with self.assertRaises(EstimatorError):
            scaled_floor(Field(graph), 0.0)


class TestFeynmanKac(unittest.TestCase):
    """Test the stochastic representation of u(x, t)."""

    def test_two_node_displacement(self):
        """Test u(a, 1) = (1 + cos(sqrt 2)) / 2 for phi = 1_a."""
        graph = two_node_graph()
        estimates = feynman_kac(graph, {"a": 1.0, "b": 0.0}, None, ["a", "b"], 1.0, 4000, seed=21)
        exact_a = 0.5 * (1.0 + math.cos(SQRT2))
        self.assertTrue(estimates["a"].within(exact_a, sigmas=4.0))
        self.assertTrue(estimates["b"].within(1.0 - exact_a, sigmas=4.0))
        self.assertEqual(estimates["a"].replicas, 4000)

    def test_time_zero(self):
        """Test that u(x, 0) = phi(x) exactly."""
        graph = two_node_graph()
        est = feynman_kac(graph, {"a": 1.0}, None, ["a"], 0.0, 2, seed=1)["a"]
        self.assertEqual(est.estimate, 1.0)
        self.assertEqual(est.stderr, 0.0)

    def test_rounding_warning(self):
        """Test that fractional zeta is floored with a warning."""
        with self.assertWarns(RoundingWarning):
            feynman_kac(two_node_graph(), {"a": 0.5}, None, ["a"], 0.1, 2, seed=1)

    def test_lattice(self):
        """Test u(0, t) close to 1 - t^2 on Z for phi = 1_0."""
        graph = lattice_graph(1)
        est = feynman_kac(graph, {(0,): 1.0}, None, [(0,)], 0.05, 2000, seed=3)[(0,)]
        self.assertTrue(est.within(1.0 - 0.05 ** 2, sigmas=4.0, slack=0.01))

    def test_invalid_arguments(self):
        """Test replica and time validation."""
        graph = two_node_graph()
        with self.assertRaises(EstimatorError):
            feynman_kac(graph, {"a": 1.0}, None, ["a"], 1.0, 1, seed=1)
        with self.assertRaises(EstimatorError):
            feynman_kac(graph, {"a": 1.0}, None, ["a"], -1.0, 10, seed=1)
        with self.assertRaises(EstimatorError):
            feynman_kac(lattice_graph(1), [1.0], None, [(0,)], 1.0, 10, seed=1)


class TestMeanField(unittest.TestCase):
    """Test E f_t against the ODE solution."""

    def test_agreement(self):
        """Test that every coordinate lies within 4 standard errors."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        field = mean_field(graph, f0, [0.25, 0.5], 4000, seed=8)
        solution = solve_ibvp(graph, f0, 0.5, 1e-3)
        for t in (0.25, 0.5):
            self.assertEqual(field.agreement(solution.at(t), t), 1.0)
        np.testing.assert_allclose(field.mean(0.5).nodes.sum(), 1.0)
        with self.assertRaises(EstimatorError):
            field.mean(0.3)

    def test_lazy_graph_rejected(self):
        """Test that mean fields need finite graphs."""
        state = init_state(lattice_graph(1), {(0,): 1})
        with self.assertRaises(EstimatorError):
            mean_field(state.graph, state, [0.1], 10, seed=1)


class TestFluctuation(unittest.TestCase):
    """Test V(t) = E||f_t - E f_t||^2 and its bounds."""

    def test_within_bounds(self):
        """Test 0 <= V(t) <= min(bounds) up to sampling error."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        est = fluctuation(graph, f0, 0.5, 4000, seed=4)
        self.assertEqual(est.bound, min(lln_bound(f0, 0.5), finite_bound(f0, 0.5)))
        self.assertGreater(est.estimate, -4.0 * est.stderr)
        self.assertLess(est.estimate, est.bound + 4.0 * est.stderr)

    def test_fixed_boundary_rejected(self):
        """Test that f0 must vanish on V_1."""
        graph = two_node_graph(boundary=("V0", "V1"))
        with self.assertRaises(EstimatorError):
            fluctuation(graph, init_state(graph, {"b": 1}), 0.5, 10, seed=1)

    def test_off_grid_times(self):
        """Test sample times that are not multiples of the solver step."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        estimates = fluctuation_series(graph, f0, [0.3333, 1.0], 50, seed=1)
        self.assertEqual(len(estimates), 2)
        exact = solve_at(graph, f0, [0.3333], 1e-3)[0]
        self.assertAlmostEqual(exact.nodes[0], (1.0 + math.cos(SQRT2 * 0.3333)) / 2.0, delta=1e-5)

    def test_monotone_in_time(self):
        """Test that V(t) does not decrease across several times."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        estimates = fluctuation_series(graph, f0, [0.25, 0.5, 1.0, 1.5], 2000, seed=12)
        for before, after in zip(estimates, estimates[1:]):
            self.assertGreater(after.estimate, before.estimate - 3.0 * math.hypot(before.stderr, after.stderr))
        self.assertGreater(estimates[-1].estimate, estimates[0].estimate)

    def test_ring_below_finite_bound(self):
        """Test V(t) against the finite-graph bound on the ring."""
        graph = ring_graph(8)
        f0 = init_state(graph, {0: 3, 4: 1})
        for t in (0.25, 0.5):
            with self.subTest(t=t):
                est = fluctuation(graph, f0, t, 1000, seed=13)
                self.assertLess(est.estimate, finite_bound(f0, t) + 3.0 * est.stderr)
                self.assertGreater(est.estimate, -3.0 * est.stderr)


class TestSecondMoment(unittest.TestCase):
    """Test that E||f_t||_2^2 is non-decreasing."""

    def test_non_decreasing(self):
        """Test pathwise increments of ||f_t||_2^2 have non-negative mean."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 2})
        times = [0.0, 0.2, 0.5, 1.0]
        batch = run_replicas(f0, times, 2000, seed=14)
        energies = np.stack([batch_energies(graph, batch.nodes[:, k], batch.edges[:, k])
                             for k in range(len(times))], axis=1)
        self.assertAlmostEqual(energies[0, 0], norm_sq(f0))
        increments = np.diff(energies, axis=1)
        means = increments.mean(axis=0)
        stderrs = increments.std(axis=0, ddof=1) / math.sqrt(len(increments))
        for mean, stderr in zip(means, stderrs):
            self.assertGreater(mean, -3.0 * stderr)
        self.assertGreater(energies[:, -1].mean(), norm_sq(f0))


class TestEnergyRate(unittest.TestCase):
    """Test both sides of the energy growth identity."""

    def test_sides_agree(self):
        """Test lhs and rhs within sampling and finite-difference error."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        lhs, rhs = energy_rate_check(graph, f0, 0.3, 0.05, 20000, seed=5)
        self.assertLess(abs(lhs.estimate - rhs.estimate), 4.0 * math.hypot(lhs.stderr, rhs.stderr) + 0.05)

    def test_window_before_zero(self):
        """Test that t - dt_fd must be non-negative."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        with self.assertRaises(EstimatorError):
            energy_rate_check(graph, f0, 0.01, 0.05, 10, seed=1)
        with self.assertRaises(EstimatorError):
            energy_rate_check(graph, f0, 0.3, 0.0, 10, seed=1)


class TestLlnError(unittest.TestCase):
    """Test the rescaled law-of-large-numbers error."""

    def test_below_bound(self):
        """Test E||f_t/c - g_t||^2 against its bound on the ring."""
        graph = ring_graph(8)
        zeta = periodic_zeta(graph, PeriodicData.from_json({"psi": [[1, 0.0, 1.0]]}))
        f0 = scaled_floor(zeta, 200.0)
        est = lln_error(graph, zeta, f0, 200.0, 0.1, 50, seed=6)
        self.assertGreaterEqual(est.estimate, 0.0)
        self.assertLess(est.estimate, est.bound)


class TestJumpCountDominance(unittest.TestCase):
    """Test jump counts against the Yule process."""

    def test_dominated(self):
        """Test E eta_t <= E Yule births <= bound up to sampling error."""
        graph = two_node_graph()
        f0 = init_state(graph, {"a": 1})
        check = jump_count_dominance(graph, f0, 0.5, 2000, seed=10)
        self.assertEqual(check.start, 1)
        self.assertEqual(check.rate, 2.0)
        self.assertEqual(check.yule_jumps.seed, 11)
        slack = 4.0 * math.hypot(check.ips_jumps.stderr, check.yule_jumps.stderr)
        self.assertLessEqual(check.ips_jumps.estimate, check.yule_jumps.estimate + slack)
        self.assertLessEqual(check.yule_jumps.estimate, check.bound + 4.0 * check.yule_jumps.stderr)


if __name__ == "__main__":
    unittest.main()
