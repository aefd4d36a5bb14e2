"""
Tests for the validation sweep.
"""

import math

import pytest

from src.harness.sweep import (
    CURVE_COLUMNS, SCATTER_COLUMNS, ProbeProfile, SweepSpec, run_sweep, scale_mix,
    scatter_regression, template_utilization,
)
from src.model.types import ChannelSpec, ClassMix, Discipline, UserClass
from src.utils.validation import ConfigError

MBPS = 1e6


@pytest.fixture
def template():
    return ClassMix(ChannelSpec(100 * MBPS), (UserClass(1.0, 1 * MBPS, 100 * MBPS, "bg"),))


def make_spec(template, **overrides):
    params = dict(
        rho_grid=(0.0, 0.3),
        template=template,
        populations=(50,),
        profiles=(ProbeProfile(100 * MBPS),),
        probes_per_point=10,
        probe_size=20 * MBPS,
        seed=5,
    )
    params.update(overrides)
    return SweepSpec(**params)


class TestScaling:

    def test_scale_mix(self, template):
        scaled = scale_mix(template, 0.4)
        assert template_utilization(scaled) == pytest.approx(0.4)
        assert scaled.classes[0].mean_size == template.classes[0].mean_size

    def test_pf_template(self):
        mix = ClassMix(
            ChannelSpec(100 * MBPS, Discipline.PROPORTIONAL_FAIR),
            (UserClass(1.0, 10 * MBPS, 50 * MBPS),),
        )
        assert template_utilization(mix) == pytest.approx(0.2)
        assert template_utilization(scale_mix(mix, 0.6)) == pytest.approx(0.6)


class TestSweepSpec:

    def test_grid_validation(self, template):
        with pytest.raises(ConfigError):
            make_spec(template, rho_grid=())
        with pytest.raises(ConfigError):
            make_spec(template, rho_grid=(0.2, 0.1))
        with pytest.raises(ConfigError):
            make_spec(template, rho_grid=(0.5, 1.0))

    def test_populations_match_classes(self, template):
        with pytest.raises(ConfigError):
            make_spec(template, populations=(10, 10))

    def test_spacing(self, template):
        with pytest.raises(ConfigError):
            make_spec(template, spacing=1.0)


class TestRunSweep:

    def test_curve_and_scatter(self, template):
        result = run_sweep(make_spec(template), workers=1)
        assert list(result.curve.columns) == CURVE_COLUMNS
        assert list(result.scatter.columns) == SCATTER_COLUMNS
        assert result.curve["rho"].tolist() == [0.0, 0.3]
        assert result.curve["status"].tolist() == ["ok", "ok"]
        assert result.failures == []

        idle = result.curve.iloc[0]
        assert idle["analytic_speed"] == 100 * MBPS
        assert idle["relative_gap"] == pytest.approx(0.0, abs=1e-9)
        assert idle["samples"] == 10
        assert len(result.scatter) == 20
        assert result.scatter["sample_id"].is_unique
        assert result.regression["samples"] == 20

    def test_workers_do_not_change_results(self, template):
        spec = make_spec(template)
        serial = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=3)
        assert serial.curve.equals(parallel.curve)
        assert serial.scatter.equals(parallel.scatter)

    def test_failing_point_is_reported(self, template):
        """Test a probe smaller than its warm-up fails every point without aborting."""
        result = run_sweep(make_spec(template, warmup_bits=50 * MBPS), workers=1)
        assert len(result.failures) == 2
        assert all(s.startswith("error:") for s in result.curve["status"])
        assert list(result.curve.columns) == CURVE_COLUMNS
        assert result.scatter.empty
        assert result.regression == {}

    def test_to_dict(self, template):
        data = make_spec(template).to_dict()
        assert data["rho_grid"] == [0.0, 0.3]
        assert data["classes"][0]["population"] == 50


def test_regression_needs_spread():
    import pandas as pd
    flat = pd.DataFrame({"predicted_speed": [1.0, 1.0], "measured_speed": [1.0, 2.0]})
    assert math.isnan(scatter_regression(flat)["slope"])
    line = pd.DataFrame({"predicted_speed": [1.0, 2.0, 3.0], "measured_speed": [2.0, 4.0, 6.0]})
    assert scatter_regression(line)["slope"] == pytest.approx(2.0)
