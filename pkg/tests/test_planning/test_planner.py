"""
Tests for the area planner and batch evaluation.
"""

import pytest

from src.planning.batch import evaluate_batch
from src.planning.planner import (
    FAILS, MEETS, SATURATED, base_utilization, evaluate_area, is_monotone, legacy_rates,
    required_channel_rate,
)
from src.planning.records import AreaRecord, DirectionDemand, GrowthModel, TargetThreshold
from src.utils.validation import MalformedRecordError, UnstableLoadError

MBPS = 1e6
GIGA = TargetThreshold.preset("italia_1_giga")


def area(area_id="A", down_rate=2e9, down_rho=0.5, up_rate=400 * MBPS, up_rho=None,
         base_year=2025, line=None):
    return AreaRecord(
        area_id=area_id,
        download=DirectionDemand(channel_rate=down_rate, rho=down_rho),
        upload=DirectionDemand(channel_rate=up_rate, rho=up_rho),
        base_year=base_year,
        line=line,
    )


class TestRequiredRate:

    def test_values(self):
        """Test 1 Gb/s at rho 0.5 needs 2 Gb/s and 200 Mb/s at 0.2 needs 250 Mb/s."""
        assert required_channel_rate(1e9, 0.5) == pytest.approx(2e9)
        assert required_channel_rate(200 * MBPS, 0.2) == pytest.approx(250 * MBPS)

    def test_saturated(self):
        with pytest.raises(UnstableLoadError):
            required_channel_rate(1e9, 1.0)


class TestEvaluateArea:

    def test_meets_at_equality(self):
        """Test 2 Gb/s at rho 0.5 delivers exactly 1 Gb/s and meets the floor."""
        verdict = evaluate_area(area(), [GIGA], GrowthModel())
        (year,) = verdict.years
        assert year.directions["down"].rate == 1e9
        assert year.directions["up"].rate == 200 * MBPS
        assert year.classification["italia_1_giga"] == MEETS
        assert verdict.binding_year["italia_1_giga"] is None

    def test_upload_defaults_to_download_load(self):
        verdict = evaluate_area(area(down_rho=0.3), [GIGA], GrowthModel())
        assert verdict.years[0].directions["up"].rho == 0.3

    def test_fails_below_floor(self):
        verdict = evaluate_area(area(down_rho=0.6), [GIGA], GrowthModel())
        assert verdict.years[0].classification["italia_1_giga"] == FAILS

    def test_binding_year_at_saturation(self):
        """Test rho 0.8 growing 12% a year saturates in the second plan year."""
        verdict = evaluate_area(area(down_rho=0.8), [GIGA], GrowthModel(0.12, 4))
        sequence = verdict.classification_sequence("italia_1_giga")
        assert sequence == [FAILS, FAILS, SATURATED, SATURATED, SATURATED]
        assert verdict.binding_year["italia_1_giga"] == 2027
        assert verdict.years[2].directions["down"].rate is None
        assert verdict.years[2].directions["down"].required_rates["italia_1_giga"] is None

    def test_binding_year_when_meeting_lapses(self):
        verdict = evaluate_area(area(down_rho=0.4), [GIGA], GrowthModel(0.3, 3))
        assert verdict.classification_sequence("italia_1_giga")[:2] == [MEETS, FAILS]
        assert verdict.binding_year["italia_1_giga"] == 2026

    @pytest.mark.parametrize("rho", [0.0, 0.2, 0.5, 0.7, 0.9])
    def test_classifications_never_improve(self, rho):
        verdict = evaluate_area(area(down_rho=rho), [GIGA], GrowthModel(0.1, 10))
        assert is_monotone(verdict.classification_sequence("italia_1_giga"))

    def test_rates_fall_with_growth(self):
        verdict = evaluate_area(area(down_rho=0.2), [GIGA], GrowthModel(0.05, 5))
        rates = [y.directions["down"].rate for y in verdict.years]
        assert rates == sorted(rates, reverse=True)

    def test_needs_a_threshold(self):
        with pytest.raises(MalformedRecordError):
            evaluate_area(area(), [], GrowthModel())

    def test_demand_based_load(self):
        """Test 200 users at 0.01/s of 50 Mb on 1 Gb/s give rho 0.1."""
        demand = DirectionDemand(
            channel_rate=100 * MBPS, capacity=1e9, users=200, arrival_rate=0.01,
            mean_size=50 * MBPS, contemporaneity=0.1,
        )
        assert base_utilization(demand) == pytest.approx(0.1)
        legacy = legacy_rates(demand)
        assert legacy["nominal"] == 100 * MBPS
        assert legacy["contemporaneity"] == pytest.approx(50 * MBPS)

    def test_overloaded_demand_saturates(self):
        demand = DirectionDemand(
            channel_rate=100 * MBPS, capacity=100 * MBPS, users=10, arrival_rate=1.0,
            mean_size=50 * MBPS,
        )
        assert base_utilization(demand) == pytest.approx(5.0)


class TestBatch:

    def test_empty_input(self):
        result = evaluate_batch([], [GIGA], GrowthModel(0.1, 2))
        assert result.verdicts == []
        rows = result.summary_rows()
        assert len(rows) == 3
        assert all(r["meets"] == r["fails"] == r["saturated"] == 0 for r in rows)

    def test_summary_counts(self):
        """Test one area of each classification is counted once."""
        records = [area("A", down_rho=0.5), area("B", down_rho=0.7), area("C", down_rho=1.2)]
        result = evaluate_batch(records, [GIGA], GrowthModel())
        assert result.summary["italia_1_giga"][0] == {MEETS: 1, FAILS: 1, SATURATED: 1}

    def test_malformed_and_duplicates(self):
        entries = [
            (2, area("A", line=2)),
            (3, MalformedRecordError("bad rate", 3)),
            (4, area("A", line=4)),
        ]
        result = evaluate_batch(entries, [GIGA], GrowthModel())
        assert [v.line for v in result.verdicts] == [2, 4]
        assert result.malformed == [(3, "line 3: bad rate")]
        assert result.duplicates == ["A"]

    def test_workers_keep_input_order(self):
        records = [area(f"A{i}", down_rho=(i % 9) / 10) for i in range(40)]
        serial = evaluate_batch(records, [GIGA], GrowthModel(0.1, 3))
        parallel = evaluate_batch(records, [GIGA], GrowthModel(0.1, 3), workers=4)
        assert [v.area_id for v in parallel.verdicts] == [f"A{i}" for i in range(40)]
        assert parallel.summary == serial.summary
