"""
Simulation Statistics
Per-class transfer-time and throughput metrics, busy fraction and
time-in-state occupancy of a simulation run.
"""

from dataclasses import dataclass, field
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats as scipy_stats

from src.constants import CONFIDENCE_BATCHES, CONFIDENCE_LEVEL


def batch_means_half_width(
    values: Sequence[float],
    batches: int = CONFIDENCE_BATCHES,
    level: float = CONFIDENCE_LEVEL,
) -> float:
    """
    Confidence half-width of the mean by the batch-means method.

    Values are split in order into ``batches`` contiguous batches; the
    half-width is the Student t quantile times the standard error of the
    batch means. NaN when there are fewer than two values per batch.
    """
    data = np.asarray(values, dtype=float)
    if batches < 2 or len(data) < 2 * batches:
        return math.nan
    batch_means = np.array([chunk.mean() for chunk in np.array_split(data, batches)])
    quantile = scipy_stats.t.ppf(0.5 + level / 2.0, batches - 1)
    return float(quantile * batch_means.std(ddof=1) / math.sqrt(batches))


@dataclass(frozen=True)
class ClassStats:
    """Empirical counterparts of D_i and v_i for one class."""
    label: str
    completed: int
    mean_transfer_time: float
    transfer_time_half_width: float
    mean_throughput: float
    throughput_half_width: float
    throughput_ratio: float
    mean_slowdown: float
    max_slowdown: float
    scheduler_share: float


@dataclass(frozen=True)
class SimStats:
    """
    Result of a run.

    ``occupancy_time[n]`` is the time spent with n active flows during the
    measured window, so it sums to horizon - warmup.
    """
    per_class: Dict[str, ClassStats]
    busy_fraction: float
    occupancy_time: Tuple[float, ...]
    completed_flows: int
    measured_span: float
    probe_share: float = 0.0
    labels: Tuple[str, ...] = field(default=())

    @property
    def mean_active_flows(self) -> float:
        total = sum(self.occupancy_time)
        return sum(n * t for n, t in enumerate(self.occupancy_time)) / total

    def to_dict(self) -> dict:
        return {
            "busy_fraction": self.busy_fraction,
            "completed_flows": self.completed_flows,
            "measured_span": self.measured_span,
            "probe_share": self.probe_share,
            "mean_active_flows": self.mean_active_flows,
            "occupancy": list(occupancy_histogram(self)),
            "classes": [vars(self.per_class[label]).copy() for label in self.labels],
        }


def _mean(values: List[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def build_stats(
    labels: Sequence[str],
    transfer_times: Sequence[List[float]],
    throughputs: Sequence[List[float]],
    slowdowns: Sequence[List[float]],
    bits: Sequence[float],
    occupancy: Sequence[float],
    class_share_time: Sequence[float],
    probe_share_time: float,
    measured_span: float,
) -> SimStats:
    """Assemble SimStats from the simulator's raw accumulators."""
    per_class = {}
    for k, label in enumerate(labels):
        times = transfer_times[k]
        total_time = math.fsum(times)
        per_class[label] = ClassStats(
            label=label,
            completed=len(times),
            mean_transfer_time=_mean(times),
            transfer_time_half_width=batch_means_half_width(times),
            mean_throughput=_mean(throughputs[k]),
            throughput_half_width=batch_means_half_width(throughputs[k]),
            throughput_ratio=bits[k] / total_time if total_time > 0 else math.nan,
            mean_slowdown=_mean(slowdowns[k]),
            max_slowdown=float(max(slowdowns[k])) if slowdowns[k] else math.nan,
            scheduler_share=class_share_time[k] / measured_span,
        )

    occupancy = tuple(float(t) for t in occupancy)
    total = math.fsum(occupancy)
    busy = (total - occupancy[0]) / total if total > 0 else 0.0
    return SimStats(
        per_class=per_class,
        busy_fraction=min(max(busy, 0.0), 1.0),
        occupancy_time=occupancy,
        completed_flows=sum(len(t) for t in transfer_times),
        measured_span=measured_span,
        probe_share=probe_share_time / measured_span,
        labels=tuple(labels),
    )


def occupancy_histogram(stats: SimStats) -> np.ndarray:
    """
    Time-weighted distribution of the number of active flows.

    Returns:
        Array indexed by n, nonnegative and summing to 1
    """
    occupancy = np.asarray(stats.occupancy_time, dtype=float)
    total = occupancy.sum()
    if total <= 0:
        histogram = np.zeros(max(len(occupancy), 1))
        histogram[0] = 1.0
        return histogram
    return occupancy / total
