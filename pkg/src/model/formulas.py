"""
Closed-Form Model
Processor-sharing and proportional-fair formulas for transfer time,
per-user throughput, utilization and workload inflation.

All functions are pure; rates in bit/s, sizes in bits, times in seconds.
"""

from dataclasses import dataclass
import math
from typing import Sequence, Tuple, Union
import logging

from src.constants import IDENTITY_TOLERANCE
from src.model.types import ClassMix, Discipline, LoadPoint
from src.utils.validation import (
    EmptySystemError,
    InconsistentMeasurementError,
    InvalidClassError,
    UnstableLoadError,
    require_positive,
)

logger = logging.getLogger(__name__)

LoadLike = Union[LoadPoint, float]


def _rho(load: LoadLike) -> float:
    if isinstance(load, LoadPoint):
        return load.rho
    rho = float(load)
    if math.isnan(rho) or rho < 0:
        raise InvalidClassError(f"Utilization must be a nonnegative number, got {load!r}")
    if rho >= 1:
        raise UnstableLoadError(rho)
    return rho


def _require_discipline(mix: ClassMix, discipline: Discipline):
    if mix.channel.discipline != discipline:
        raise InvalidClassError(
            f"Expected a {discipline.value} channel, got {mix.channel.discipline.value}"
        )


def utilization_fair(mix: ClassMix) -> LoadPoint:
    """
    Utilization of a fair-sharing channel: rho = sum(lambda_i * m_i) / C.

    Raises:
        UnstableLoadError: If rho >= 1 (carries the computed value)
    """
    _require_discipline(mix, Discipline.FAIR_SHARING)
    capacity = mix.channel.capacity
    parts = tuple(c.offered_work / capacity for c in mix.classes)
    return LoadPoint(rho=math.fsum(parts), per_class_rho=parts)


def utilization_proportional_fair(mix: ClassMix) -> LoadPoint:
    """
    Utilization of a proportional-fair channel: rho = sum(lambda_i * m_i / C_i).

    Each class occupies the channel for its bits at its own reference rate.
    """
    _require_discipline(mix, Discipline.PROPORTIONAL_FAIR)
    parts = tuple(c.offered_work / c.channel_rate for c in mix.classes)
    return LoadPoint(rho=math.fsum(parts), per_class_rho=parts)


def mean_transfer_time(mean_size: float, channel_rate: float, load: LoadLike) -> float:
    """D = (m / C) / (1 - rho). Under PF pass the class rate C_i."""
    mean_size = require_positive(mean_size, "mean_size")
    channel_rate = require_positive(channel_rate, "channel_rate")
    return (mean_size / channel_rate) / (1.0 - _rho(load))


def conditional_transfer_time(size: float, channel_rate: float, load: LoadLike) -> float:
    """d(x) = (x / C) / (1 - rho); linear in x."""
    size = require_positive(size, "size")
    channel_rate = require_positive(channel_rate, "channel_rate")
    return (size / channel_rate) / (1.0 - _rho(load))


def per_user_throughput(channel_rate: float, load: LoadLike) -> float:
    """v = (1 - rho) * C_i."""
    channel_rate = require_positive(channel_rate, "channel_rate")
    return (1.0 - _rho(load)) * channel_rate


def infer_utilization(measured_speed: float, channel_rate: float) -> float:
    """
    Invert the throughput formula: rho = 1 - v / C_i.

    Raises:
        InconsistentMeasurementError: If the measured speed exceeds C_i
    """
    measured_speed = require_positive(measured_speed, "measured_speed")
    channel_rate = require_positive(channel_rate, "channel_rate")
    if measured_speed > channel_rate * (1.0 + IDENTITY_TOLERANCE):
        raise InconsistentMeasurementError(
            f"Measured speed {measured_speed:g} exceeds channel rate {channel_rate:g}"
        )
    return max(1.0 - measured_speed / channel_rate, 0.0)


def inflation_factor(capacity: float, channel_rate: float) -> float:
    """nu_i = C / C_i: how much longer a PF class holds the channel per bit."""
    capacity = require_positive(capacity, "capacity")
    channel_rate = require_positive(channel_rate, "channel_rate")
    if channel_rate > capacity:
        raise InvalidClassError(
            f"Channel rate {channel_rate:g} exceeds capacity {capacity:g}"
        )
    return capacity / channel_rate


def equivalent_mean_demand(mix: ClassMix) -> float:
    """
    Mean size m'_X of the fair-sharing workload equivalent to a PF mix.

    m'_X = sum((lambda_i / lambda) * nu_i * m_i), so that lambda * m'_X / C
    equals the PF utilization.
    """
    total_rate = mix.total_arrival_rate
    if total_rate <= 0:
        raise InvalidClassError("Equivalent demand needs a positive total arrival rate")
    capacity = mix.channel.capacity
    return math.fsum(
        (c.arrival_rate / total_rate) * inflation_factor(capacity, c.channel_rate) * c.mean_size
        for c in mix.classes
    )


@dataclass(frozen=True)
class EffectiveCapacity:
    """Instantaneous PF sharing state of an active set."""
    capacity: float
    share: float
    instantaneous_rates: Tuple[float, ...]


def effective_capacity(active_channel_rates: Sequence[float]) -> EffectiveCapacity:
    """
    C' = sum(C_j) / n with share alpha = 1/n and rates c_j = C_j / n.

    Raises:
        EmptySystemError: With no active flows (the channel is idle)
    """
    rates = [require_positive(r, "channel_rate") for r in active_channel_rates]
    n = len(rates)
    if n == 0:
        raise EmptySystemError("Effective capacity is undefined with no active flows")
    share = 1.0 / n
    return EffectiveCapacity(
        capacity=math.fsum(rates) / n,
        share=share,
        instantaneous_rates=tuple(r * share for r in rates),
    )


def mean_active_flows(load: LoadLike) -> float:
    """Mean number of concurrently active flows, rho / (1 - rho)."""
    rho = _rho(load)
    return rho / (1.0 - rho)
