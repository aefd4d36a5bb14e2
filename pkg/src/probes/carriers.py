"""
Carrier Aggregation
A user served on several carriers gets the sum of its per-carrier rates.
Secondary carriers do not report their own MCS: the primary's index is
reused and looked up in each secondary's own rate table.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple
import logging

from src.model.formulas import per_user_throughput
from src.model.types import ChannelSpec, LoadPoint
from src.probes.mcs import RateTable, map_mcs_to_rate
from src.utils.validation import ConfigError, InvalidClassError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Carrier:
    """
    One carrier: its channel, its load and how C_i is obtained on it.

    Either ``channel_rate`` is given directly or ``rate_table`` maps the
    (primary's) MCS index to it.
    """
    channel: ChannelSpec
    load: LoadPoint
    channel_rate: Optional[float] = None
    rate_table: Optional[RateTable] = None
    name: str = "carrier"

    def __post_init__(self):
        if not isinstance(self.load, LoadPoint):
            object.__setattr__(self, "load", LoadPoint.of(self.load))
        if self.channel_rate is None and self.rate_table is None:
            raise ConfigError(f"{self.name}: needs a channel_rate or a rate_table")

    def resolve_rate(self, mcs_index: Optional[int]) -> float:
        if self.rate_table is not None and mcs_index is not None:
            rate = map_mcs_to_rate(mcs_index, self.rate_table)
        elif self.channel_rate is not None:
            rate = self.channel_rate
        else:
            raise ConfigError(f"{self.name}: rate table given but no MCS index reported")
        if rate > self.channel.capacity:
            raise InvalidClassError(
                f"{self.name}: channel rate {rate:g} exceeds capacity {self.channel.capacity:g}"
            )
        return rate


@dataclass(frozen=True)
class CarrierSetup:
    """Primary carrier plus any secondaries inheriting its MCS."""
    primary: Carrier
    secondaries: Tuple[Carrier, ...] = ()
    mcs_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "secondaries", tuple(self.secondaries))


def carrier_rates(setup: CarrierSetup) -> List[Tuple[str, float, float]]:
    """
    Per-carrier (name, C_i, v) with v = (1 - rho_k) * C_i,k.

    Raises:
        UnstableLoadError: If any carrier is saturated
    """
    rows = []
    for carrier in (setup.primary,) + setup.secondaries:
        rate = carrier.resolve_rate(setup.mcs_index)
        rows.append((carrier.name, rate, per_user_throughput(rate, carrier.load)))
    return rows


def aggregate_carriers(setup: CarrierSetup) -> float:
    """Total per-user rate across the primary and secondary carriers."""
    rows = carrier_rates(setup)
    total = sum(v for _, _, v in rows)
    logger.debug(f"Aggregated {len(rows)} carriers: {total:g} bit/s")
    return total