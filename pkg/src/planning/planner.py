"""
Area Planner
Projects each area's peak-time load over the plan years, predicts the
per-user rate in both directions and classifies it against capacity
thresholds.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence
import logging

from src.model.formulas import per_user_throughput, utilization_fair
from src.model.types import ChannelSpec, ClassMix, Discipline, UserClass
from src.planning.records import DIRECTIONS, AreaRecord, DirectionDemand, GrowthModel, TargetThreshold
from src.utils.validation import MalformedRecordError, UnstableLoadError, require_positive

logger = logging.getLogger(__name__)

MEETS = "meets"
FAILS = "fails"
SATURATED = "saturated"
CLASSIFICATIONS = (MEETS, FAILS, SATURATED)
_SEVERITY = {MEETS: 0, FAILS: 1, SATURATED: 2}


def required_channel_rate(floor: float, rho: float) -> float:
    """
    Minimum channel rate C_i delivering ``floor`` at load rho: floor / (1 - rho).

    Raises:
        UnstableLoadError: If rho >= 1
    """
    floor = require_positive(floor, "floor")
    if rho >= 1:
        raise UnstableLoadError(rho)
    if rho < 0:
        raise MalformedRecordError(f"rho must be nonnegative, got {rho!r}")
    return floor / (1.0 - rho)


def base_utilization(demand: DirectionDemand) -> float:
    """
    Peak-time rho of a direction: supplied directly or from the sharing
    group's demand on a fair-sharing channel. May be >= 1.
    """
    if demand.rho is not None:
        return demand.rho
    mix = ClassMix(
        ChannelSpec(demand.capacity, Discipline.FAIR_SHARING),
        (UserClass(
            arrival_rate=demand.users * demand.arrival_rate,
            mean_size=demand.mean_size,
            channel_rate=demand.channel_rate,
            label="subscribers",
        ),),
    )
    try:
        return utilization_fair(mix).rho
    except UnstableLoadError as e:
        return e.rho


def legacy_rates(demand: DirectionDemand) -> Dict[str, Optional[float]]:
    """
    Rates older planning practice would report: the nominal channel rate,
    and capacity split by the expected number of simultaneous users.
    """
    contemporaneity = None
    if demand.capacity is not None and demand.users is not None \
            and demand.contemporaneity is not None:
        contemporaneity = min(
            demand.capacity / max(1.0, demand.users * demand.contemporaneity),
            demand.channel_rate,
        )
    return {"nominal": demand.channel_rate, "contemporaneity": contemporaneity}


@dataclass(frozen=True)
class DirectionYear:
    rho: float
    rate: Optional[float]              # None when saturated
    required_rates: Dict[str, Optional[float]]

    @property
    def saturated(self) -> bool:
        return self.rate is None


@dataclass(frozen=True)
class YearVerdict:
    year: int
    offset: int
    directions: Dict[str, DirectionYear]
    classification: Dict[str, str]


@dataclass(frozen=True)
class PlanVerdict:
    area_id: str
    years: List[YearVerdict]
    binding_year: Dict[str, Optional[int]]
    legacy: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    line: Optional[int] = None

    def classification_sequence(self, threshold: str) -> List[str]:
        return [y.classification[threshold] for y in self.years]


def _classify(directions: Dict[str, DirectionYear], threshold: TargetThreshold) -> str:
    if any(d.saturated for d in directions.values()):
        return SATURATED
    meets = all(directions[d].rate >= threshold.floor(d) for d in DIRECTIONS)
    return MEETS if meets else FAILS


def evaluate_area(
    record: AreaRecord,
    thresholds: Sequence[TargetThreshold],
    growth: GrowthModel,
) -> PlanVerdict:
    """
    Year-by-year predicted rates and threshold classification of one area.

    Rates are v_t = (1 - rho_t) * C_i with rho_t = rho_0 * (1 + g)^t; a
    direction at rho_t >= 1 makes the year "saturated". "meets" needs
    v_t >= floor in both directions. The binding year of a threshold is the
    first year classified worse than the base year.

    Raises:
        MalformedRecordError: If a direction has no usable data
    """
    if not thresholds:
        raise MalformedRecordError("At least one threshold is required", record.line)

    base_rho = {"down": base_utilization(record.download)}
    if record.upload.rho is not None or record.upload.has_demand:
        base_rho["up"] = base_utilization(record.upload)
    else:
        base_rho["up"] = base_rho["down"]

    years = []
    for offset in range(growth.horizon_years + 1):
        directions = {}
        for d in DIRECTIONS:
            demand = record.direction(d)
            rho = growth.project(base_rho[d], offset)
            if rho >= 1:
                directions[d] = DirectionYear(
                    rho=rho, rate=None, required_rates={t.name: None for t in thresholds}
                )
            else:
                directions[d] = DirectionYear(
                    rho=rho,
                    rate=per_user_throughput(demand.channel_rate, rho),
                    required_rates={
                        t.name: required_channel_rate(t.floor(d), rho) for t in thresholds
                    },
                )
        years.append(YearVerdict(
            year=record.base_year + offset,
            offset=offset,
            directions=directions,
            classification={t.name: _classify(directions, t) for t in thresholds},
        ))

    binding = {}
    for t in thresholds:
        base = _SEVERITY[years[0].classification[t.name]]
        binding[t.name] = next(
            (y.year for y in years if _SEVERITY[y.classification[t.name]] > base), None
        )

    verdict = PlanVerdict(
        area_id=record.area_id,
        years=years,
        binding_year=binding,
        legacy={d: legacy_rates(record.direction(d)) for d in DIRECTIONS},
        line=record.line,
    )
    logger.debug(
        f"{record.area_id}: base rho down={base_rho['down']:.4f} up={base_rho['up']:.4f}, "
        f"binding years {binding}"
    )
    return verdict


def is_monotone(sequence: Sequence[str]) -> bool:
    """True if classifications never improve along the sequence."""
    severities = [_SEVERITY[c] for c in sequence]
    return all(a <= b for a, b in zip(severities, severities[1:]))
