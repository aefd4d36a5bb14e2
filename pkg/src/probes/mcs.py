"""
MCS Rate Tables
Maps the Modulation and Coding Scheme index a probe reports to the channel
rate C_i that index allows. Tables are technology specific and always
supplied as configuration.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple, Union
import logging

from src.utils.validation import ConfigError, UnknownMcsError, require_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateTable:
    """MCS index -> channel rate (bit/s)."""
    name: str
    entries: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        entries = []
        for index, rate in self.entries:
            if isinstance(index, bool) or int(index) != index:
                raise ConfigError(f"{self.name}: MCS index must be an integer, got {index!r}")
            entries.append((int(index), require_positive(rate, f"{self.name}[{index}]", ConfigError)))
        indices = [i for i, _ in entries]
        if len(set(indices)) != len(indices):
            raise ConfigError(f"{self.name}: duplicate MCS indices")
        if not entries:
            raise ConfigError(f"{self.name}: rate table is empty")
        object.__setattr__(self, "entries", tuple(sorted(entries)))

    @classmethod
    def from_mapping(cls, name: str, rates: Mapping[int, float]) -> "RateTable":
        return cls(name=name, entries=tuple(rates.items()))

    def as_dict(self) -> Dict[int, float]:
        return dict(self.entries)


def map_mcs_to_rate(mcs_index: int, rate_table: Union[RateTable, Mapping[int, float]]) -> float:
    """
    Look up the channel rate of an MCS index.

    Raises:
        UnknownMcsError: If the index is not in the table
    """
    table = rate_table.as_dict() if isinstance(rate_table, RateTable) else rate_table
    try:
        return float(table[int(mcs_index)])
    except (KeyError, TypeError, ValueError):
        raise UnknownMcsError(mcs_index)


def lint_rate_table(rate_table: RateTable) -> List[str]:
    """
    Check that a higher MCS index never maps to a lower rate.

    Returns:
        Warning messages (empty when the table is monotone); each is also logged
    """
    warnings = []
    for (low_index, low_rate), (high_index, high_rate) in zip(
        rate_table.entries, rate_table.entries[1:]
    ):
        if high_rate < low_rate:
            message = (
                f"{rate_table.name}: MCS {high_index} rate {high_rate:g} is below "
                f"MCS {low_index} rate {low_rate:g}"
            )
            logger.warning(message)
            warnings.append(message)
    return warnings
