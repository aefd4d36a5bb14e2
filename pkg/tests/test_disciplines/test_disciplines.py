"""
Tests for the scheduler disciplines and their registry.
"""

import unittest

import pytest

from src.disciplines.base_discipline import SchedulingDiscipline
from src.disciplines.fair_sharing import FairSharingDiscipline
from src.disciplines.proportional_fair import ProportionalFairDiscipline
from src.disciplines.registry import AVAILABLE_DISCIPLINES, get_discipline
from src.model.types import ChannelSpec, ClassMix, Discipline, UserClass
from src.utils.validation import ConfigError, UnstableLoadError

MBPS = 1e6


class TestRegistry(unittest.TestCase):
    """Test the discipline factory."""

    def test_lookup_by_name_and_enum(self):
        self.assertIsInstance(get_discipline("fair_sharing"), FairSharingDiscipline)
        self.assertIsInstance(
            get_discipline(Discipline.PROPORTIONAL_FAIR), ProportionalFairDiscipline
        )

    def test_every_discipline_registered(self):
        self.assertEqual(set(AVAILABLE_DISCIPLINES), {d.value for d in Discipline})
        for name in AVAILABLE_DISCIPLINES:
            self.assertIsInstance(get_discipline(name), SchedulingDiscipline)

    def test_unknown(self):
        with self.assertRaises(ConfigError) as cm:
            get_discipline("max_rate")
        self.assertIn("Available", str(cm.exception))

    def test_base_is_abstract(self):
        with self.assertRaises(TypeError):
            SchedulingDiscipline()


class TestFairSharing(unittest.TestCase):
    """Test fair sharing: every active flow gets C/n."""

    def setUp(self):
        self.discipline = FairSharingDiscipline()

    def test_drain_rates_conserve_work(self):
        rates = self.discipline.drain_rates(90.0, [90.0, 30.0, 10.0])
        self.assertEqual(rates, [30.0, 30.0, 30.0])
        self.assertAlmostEqual(sum(rates), 90.0)

    def test_class_rate_ignored(self):
        """Test a class's own channel rate does not change its reference rate."""
        user_class = UserClass(0.1, 1.0, 40.0)
        self.assertEqual(self.discipline.reference_rate(100.0, user_class), 100.0)

    def test_predict(self):
        """Test the prediction at rho 0.5 on 100 Mb/s."""
        mix = ClassMix(ChannelSpec(100 * MBPS), (UserClass(0.5, 100 * MBPS, 100 * MBPS, "all"),))
        prediction = self.discipline.predict(mix)["all"]
        self.assertAlmostEqual(prediction.mean_transfer_time, 2.0)
        self.assertAlmostEqual(prediction.per_user_throughput, 50 * MBPS)
        self.assertAlmostEqual(prediction.conditional_time_per_bit, 2.0 / (100 * MBPS))

    def test_predict_unstable(self):
        mix = ClassMix(ChannelSpec(1.0), (UserClass(2.0, 1.0, 1.0),))
        with self.assertRaises(UnstableLoadError):
            self.discipline.predict(mix)


class TestProportionalFair:
    """Test proportional fair: every active flow gets C_i/n."""

    @pytest.fixture
    def discipline(self):
        return ProportionalFairDiscipline()

    @pytest.fixture
    def mix(self):
        return ClassMix(
            ChannelSpec(100 * MBPS, Discipline.PROPORTIONAL_FAIR),
            (
                UserClass(0.25, 100 * MBPS, 100 * MBPS, "near"),
                UserClass(0.125, 100 * MBPS, 50 * MBPS, "far"),
            ),
        )

    def test_rate_share_constant(self, discipline):
        """Test c_i / C_i is the same for every active flow."""
        channel_rates = [100.0, 50.0, 20.0, 20.0]
        rates = discipline.drain_rates(100.0, channel_rates)
        shares = {round(r / c, 12) for r, c in zip(rates, channel_rates)}
        assert shares == {0.25}

    def test_total_is_effective_capacity(self, discipline):
        """Test the drain rates add up to sum(C_j)/n."""
        rates = discipline.drain_rates(100.0, [100.0, 50.0])
        assert sum(rates) == pytest.approx(75.0)

    def test_idle(self, discipline):
        assert discipline.drain_rates(100.0, []) == []

    def test_predict_per_class(self, discipline, mix):
        """Test rho 0.5 gives v = {50, 25} Mb/s."""
        prediction = discipline.predict(mix)
        assert discipline.utilization(mix).rho == pytest.approx(0.5)
        assert prediction["near"].per_user_throughput == pytest.approx(50 * MBPS)
        assert prediction["far"].per_user_throughput == pytest.approx(25 * MBPS)
        assert prediction["far"].mean_transfer_time == pytest.approx(4.0)
        assert list(prediction) == ["near", "far"]
