"""
Tests for types.py - Domain value objects and their invariants.
"""

import unittest

from src.model.types import (
    ChannelSpec, ClassMix, Discipline, FinitePopulationSpec, LoadPoint, RatePrediction, UserClass,
)
from src.utils.validation import InvalidClassError, UnstableLoadError


class TestChannelAndClass(unittest.TestCase):
    """Tests for ChannelSpec and UserClass validation."""

    def test_discipline_from_string(self):
        """Test a discipline name is converted to the enum."""
        channel = ChannelSpec(100.0, "proportional_fair")
        self.assertIs(channel.discipline, Discipline.PROPORTIONAL_FAIR)

    def test_unknown_discipline(self):
        with self.assertRaises(InvalidClassError):
            ChannelSpec(100.0, "round_robin")

    def test_capacity_must_be_positive(self):
        with self.assertRaises(InvalidClassError):
            ChannelSpec(0.0)

    def test_class_parameters(self):
        """Test negative arrivals and zero sizes or rates are rejected."""
        with self.assertRaises(InvalidClassError):
            UserClass(-1.0, 1.0, 1.0)
        with self.assertRaises(InvalidClassError):
            UserClass(1.0, 0.0, 1.0)
        with self.assertRaises(InvalidClassError):
            UserClass(1.0, 1.0, float("nan"))

    def test_offered_work(self):
        self.assertEqual(UserClass(0.5, 8.0, 10.0).offered_work, 4.0)


class TestClassMix(unittest.TestCase):
    """Tests for ClassMix invariants."""

    def test_requires_classes(self):
        with self.assertRaises(InvalidClassError):
            ClassMix(ChannelSpec(10.0), ())

    def test_rate_above_capacity(self):
        """Test C_i > C is rejected."""
        with self.assertRaises(InvalidClassError) as cm:
            ClassMix(ChannelSpec(10.0), (UserClass(0.1, 1.0, 20.0, "fast"),))
        self.assertIn("fast", str(cm.exception))

    def test_duplicate_labels(self):
        with self.assertRaises(InvalidClassError):
            ClassMix(ChannelSpec(10.0), (UserClass(0.1, 1.0, 5.0, "a"), UserClass(0.1, 1.0, 5.0, "a")))

    def test_lookup_and_total(self):
        mix = ClassMix(ChannelSpec(10.0), [UserClass(0.1, 1.0, 5.0, "a"), UserClass(0.3, 1.0, 5.0, "b")])
        self.assertIsInstance(mix.classes, tuple)
        self.assertAlmostEqual(mix.total_arrival_rate, 0.4)
        self.assertEqual(mix.get("b").arrival_rate, 0.3)
        with self.assertRaises(KeyError):
            mix.get("c")


class TestLoadPoint(unittest.TestCase):
    """Tests for LoadPoint invariants."""

    def test_single_component(self):
        self.assertEqual(LoadPoint.of(0.4).per_class_rho, (0.4,))

    def test_components_must_sum(self):
        """Test per-class loads must add up to rho."""
        LoadPoint(0.3, (0.1, 0.2))
        with self.assertRaises(InvalidClassError):
            LoadPoint(0.3, (0.1, 0.1))

    def test_unstable(self):
        """Test rho >= 1 raises UnstableLoadError."""
        with self.assertRaises(UnstableLoadError) as cm:
            LoadPoint.of(1.0)
        self.assertEqual(cm.exception.rho, 1.0)

    def test_negative(self):
        with self.assertRaises(InvalidClassError):
            LoadPoint.of(-0.01)


class TestFinitePopulationSpec(unittest.TestCase):

    def test_service_rate(self):
        spec = FinitePopulationSpec(3, 0.1, 50e6, 100e6)
        self.assertEqual(spec.service_rate, 2.0)

    def test_population_must_be_integer(self):
        with self.assertRaises(InvalidClassError):
            FinitePopulationSpec(2.5, 0.1, 1.0, 1.0)
        with self.assertRaises(InvalidClassError):
            FinitePopulationSpec(0, 0.1, 1.0, 1.0)

    def test_think_rate_positive(self):
        with self.assertRaises(InvalidClassError):
            FinitePopulationSpec(3, 0.0, 1.0, 1.0)


class TestRatePrediction(unittest.TestCase):

    def test_values_must_be_positive(self):
        with self.assertRaises(InvalidClassError):
            RatePrediction(0.0, 1.0, 1.0)


if __name__ == '__main__':
    unittest.main()
