"""
Simulation Cross-Checks
Matched-seed comparisons probing two structural properties of the model:
insensitivity of mean transfer time to the size distribution, and the
equivalence of proportional fair with an inflated fair-sharing workload.
"""

from dataclasses import dataclass, replace
import math
from typing import Dict
import logging

from src.model.formulas import inflation_factor
from src.model.types import ChannelSpec, Discipline, UserClass
from src.simulation.config import SimClass, SimConfig
from src.simulation.engine import run_simulation
from src.simulation.stats import SimStats
from src.utils.validation import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonReport:
    """Per-class mean transfer times of two runs and their relative gaps."""
    name: str
    baseline: SimStats
    candidate: SimStats
    relative_gap: Dict[str, float]

    @property
    def max_gap(self) -> float:
        gaps = [g for g in self.relative_gap.values() if not math.isnan(g)]
        return max(gaps) if gaps else math.nan

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "max_gap": self.max_gap,
            "classes": [
                {
                    "label": label,
                    "baseline_mean_transfer_time":
                        self.baseline.per_class[label].mean_transfer_time,
                    "baseline_half_width":
                        self.baseline.per_class[label].transfer_time_half_width,
                    "candidate_mean_transfer_time":
                        self.candidate.per_class[label].mean_transfer_time,
                    "candidate_half_width":
                        self.candidate.per_class[label].transfer_time_half_width,
                    "relative_gap": gap,
                }
                for label, gap in self.relative_gap.items()
            ],
        }


def _gaps(baseline: SimStats, candidate: SimStats) -> Dict[str, float]:
    gaps = {}
    for label in baseline.labels:
        a = baseline.per_class[label].mean_transfer_time
        b = candidate.per_class[label].mean_transfer_time
        gaps[label] = abs(b - a) / a if a > 0 else math.nan
    return gaps


def insensitivity_check(baseline: SimConfig, candidate: SimConfig) -> ComparisonReport:
    """
    Compare two runs that differ only in their size distribution (and seed).

    Raises:
        ConfigError: If the configurations differ in anything else
    """
    aligned = replace(
        candidate, service_distribution=baseline.service_distribution, seed=baseline.seed
    )
    if aligned != baseline:
        raise ConfigError(
            "Insensitivity check needs configurations that differ only in service distribution"
        )

    baseline_stats = run_simulation(baseline)
    candidate_stats = run_simulation(candidate)
    report = ComparisonReport(
        name="insensitivity",
        baseline=baseline_stats,
        candidate=candidate_stats,
        relative_gap=_gaps(baseline_stats, candidate_stats),
    )
    logger.info(
        f"Insensitivity {baseline.service_distribution.kind.value} vs "
        f"{candidate.service_distribution.kind.value}: max gap {report.max_gap:.4%}"
    )
    return report


def inflated_fair_config(pf_config: SimConfig) -> SimConfig:
    """
    Fair-sharing twin of a proportional-fair run.

    Each class transfers nu_i times its bits at the full capacity C, with
    the same populations, think rates and seed.
    """
    if pf_config.channel.discipline != Discipline.PROPORTIONAL_FAIR:
        raise ConfigError("Inflation check needs a proportional_fair configuration")
    capacity = pf_config.channel.capacity
    classes = []
    for sim_class in pf_config.classes:
        user_class = sim_class.user_class
        nu = inflation_factor(capacity, user_class.channel_rate)
        classes.append(SimClass(
            UserClass(
                arrival_rate=user_class.arrival_rate,
                mean_size=nu * user_class.mean_size,
                channel_rate=capacity,
                label=user_class.label,
            ),
            sim_class.population,
        ))
    return replace(
        pf_config,
        channel=ChannelSpec(capacity, Discipline.FAIR_SHARING),
        classes=tuple(classes),
    )


def inflation_check(pf_config: SimConfig) -> ComparisonReport:
    """
    Run a PF configuration and its inflated fair-sharing twin on matched seeds.

    Returns:
        ComparisonReport of mean transfer times per class
    """
    fair_config = inflated_fair_config(pf_config)
    pf_stats = run_simulation(pf_config)
    fair_stats = run_simulation(fair_config)
    report = ComparisonReport(
        name="inflation",
        baseline=pf_stats,
        candidate=fair_stats,
        relative_gap=_gaps(pf_stats, fair_stats),
    )
    logger.info(f"PF vs inflated fair sharing: max gap {report.max_gap:.4%}")
    return report
