"""
Tests for simulation config.py - Run descriptions and size distributions.
"""

import unittest

import numpy as np

from src.model.types import ChannelSpec, UserClass
from src.simulation.config import (
    DistributionKind, ServiceDistribution, SimClass, SimConfig, _bounded_pareto_mean,
)
from src.utils.random_streams import RandomStream
from src.utils.validation import ConfigError

MBPS = 1e6


def single_class_config(**overrides):
    params = dict(
        channel=ChannelSpec(100 * MBPS),
        classes=(SimClass(UserClass(0.5, 50 * MBPS, 100 * MBPS, "all"), 20),),
        horizon=100.0,
    )
    params.update(overrides)
    return SimConfig(**params)


class TestServiceDistribution(unittest.TestCase):
    """Tests for the request-size distributions."""

    def test_kind_from_string(self):
        self.assertIs(ServiceDistribution("deterministic").kind, DistributionKind.DETERMINISTIC)

    def test_unknown_kind(self):
        with self.assertRaises(ConfigError):
            ServiceDistribution("lognormal")

    def test_pareto_needs_parameters(self):
        with self.assertRaises(ConfigError):
            ServiceDistribution(DistributionKind.BOUNDED_PARETO, shape=1.5)
        with self.assertRaises(ConfigError):
            ServiceDistribution(DistributionKind.BOUNDED_PARETO, shape=1.5, cap_factor=1.0)
        with self.assertRaises(ConfigError):
            ServiceDistribution(DistributionKind.BOUNDED_PARETO, shape=0.0, cap_factor=10.0)

    def test_pareto_lower_bound_gives_unit_mean(self):
        for shape in (1.0, 1.5, 2.5):
            dist = ServiceDistribution(DistributionKind.BOUNDED_PARETO, shape=shape, cap_factor=100.0)
            lower = dist.pareto_lower_bound
            self.assertTrue(0 < lower < 1)
            self.assertAlmostEqual(_bounded_pareto_mean(lower, 100.0, shape), 1.0, places=9)

    def test_pareto_samples_stay_in_support(self):
        """Test draws lie in [L, cap] and average to about one."""
        dist = ServiceDistribution(DistributionKind.BOUNDED_PARETO, shape=2.5, cap_factor=100.0)
        sampler = dist.unit_sampler()
        stream = RandomStream.from_seed(7)
        draws = np.array([sampler(stream) for _ in range(200_000)])
        self.assertGreaterEqual(draws.min(), dist.pareto_lower_bound)
        self.assertLessEqual(draws.max(), 100.0)
        self.assertAlmostEqual(draws.mean(), 1.0, delta=0.02)

    def test_deterministic_sampler(self):
        sampler = ServiceDistribution(DistributionKind.DETERMINISTIC).unit_sampler()
        self.assertEqual(sampler(RandomStream.from_seed(0)), 1.0)

    def test_to_dict(self):
        self.assertEqual(ServiceDistribution().to_dict(), {"kind": "exponential"})
        dist = ServiceDistribution("bounded_pareto", shape=2.0, cap_factor=50.0)
        self.assertEqual(
            dist.to_dict(), {"kind": "bounded_pareto", "shape": 2.0, "cap_factor": 50.0}
        )


class TestSimConfig(unittest.TestCase):
    """Tests for SimConfig validation."""

    def test_default_warmup(self):
        """Test the warm-up defaults to a tenth of the horizon."""
        config = single_class_config(horizon=200.0)
        self.assertEqual(config.warmup, 20.0)
        self.assertEqual(config.measured_span, 180.0)

    def test_warmup_bounds(self):
        with self.assertRaises(ConfigError):
            single_class_config(warmup=100.0)
        with self.assertRaises(ConfigError):
            single_class_config(warmup=-1.0)
        self.assertEqual(single_class_config(warmup=0.0).warmup, 0.0)

    def test_horizon_positive(self):
        with self.assertRaises(ConfigError):
            single_class_config(horizon=0.0)
        with self.assertRaises(ConfigError):
            single_class_config(horizon=float("inf"))

    def test_seed_range(self):
        with self.assertRaises(ConfigError):
            single_class_config(seed=-1)
        with self.assertRaises(ConfigError):
            single_class_config(seed=2 ** 64)
        with self.assertRaises(ConfigError):
            single_class_config(seed=True)
        self.assertEqual(single_class_config(seed=2 ** 64 - 1).seed, 2 ** 64 - 1)

    def test_population(self):
        """Test populations must be integers of at least one."""
        user_class = UserClass(0.5, 1.0, 1.0)
        with self.assertRaises(ConfigError):
            SimClass(user_class, 0)
        with self.assertRaises(ConfigError):
            SimClass(user_class, 2.5)
        self.assertAlmostEqual(SimClass(user_class, 10).think_rate, 0.05)

    def test_invalid_mix_becomes_config_error(self):
        """Test a class rate above capacity surfaces as ConfigError."""
        with self.assertRaises(ConfigError):
            single_class_config(
                classes=(SimClass(UserClass(0.5, 1.0, 200 * MBPS), 1),)
            )

    def test_replace_helpers(self):
        config = single_class_config()
        self.assertEqual(config.with_seed(9).seed, 9)
        pareto = ServiceDistribution("bounded_pareto", shape=2.0, cap_factor=10.0)
        self.assertEqual(config.with_distribution(pareto).service_distribution, pareto)
        self.assertEqual(config.total_population, 20)

    def test_to_dict(self):
        data = single_class_config(seed=3).to_dict()
        self.assertEqual(data["channel"], {"capacity": 100 * MBPS, "discipline": "fair_sharing"})
        self.assertEqual(data["classes"][0]["population"], 20)
        self.assertEqual(data["seed"], 3)
        self.assertEqual(data["warmup"], 10.0)


if __name__ == '__main__':
    unittest.main()
