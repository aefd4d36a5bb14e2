"""
Planning Records
Per-area inputs, capacity thresholds and growth assumptions, plus parsing
of area rows read from a delimiter-separated file.
"""

from dataclasses import dataclass
import math
from typing import Dict, List, Mapping, Optional, Tuple
import logging

import pandas as pd

from src.constants import THRESHOLD_PRESETS
from src.utils.units import parse_rate, parse_size
from src.utils.validation import AccessModelError, ConfigError, MalformedRecordError

logger = logging.getLogger(__name__)

DIRECTIONS = ("down", "up")
DIRECTION_FIELDS = (
    "channel_rate", "capacity", "users", "arrival_rate", "mean_size", "rho", "contemporaneity",
)
RECORD_COLUMNS = ["area_id", "base_year"] + [
    f"{d}_{f}" for d in DIRECTIONS for f in DIRECTION_FIELDS
]
REQUIRED_COLUMNS = ["area_id", "down_channel_rate", "up_channel_rate"]


@dataclass(frozen=True)
class DirectionDemand:
    """
    One direction of an area: nominal per-user channel rate plus either a
    supplied utilization or the sharing group's demand.

    Demand is ``users`` subscribers each issuing ``arrival_rate`` requests/s
    of ``mean_size`` bits on a group of total ``capacity``.
    """
    channel_rate: float
    rho: Optional[float] = None
    capacity: Optional[float] = None
    users: Optional[int] = None
    arrival_rate: Optional[float] = None
    mean_size: Optional[float] = None
    contemporaneity: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.channel_rate) and self.channel_rate > 0):
            raise MalformedRecordError(f"channel rate must be positive, got {self.channel_rate!r}")
        if self.rho is not None and not (math.isfinite(self.rho) and self.rho >= 0):
            raise MalformedRecordError(f"rho must be nonnegative, got {self.rho!r}")
        for name in ("capacity", "mean_size", "contemporaneity"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise MalformedRecordError(f"{name} must be positive, got {value!r}")
        if self.users is not None and self.users < 1:
            raise MalformedRecordError(f"users must be >= 1, got {self.users!r}")
        if self.arrival_rate is not None and not (
            math.isfinite(self.arrival_rate) and self.arrival_rate >= 0
        ):
            raise MalformedRecordError(f"arrival_rate must be nonnegative, got {self.arrival_rate!r}")
        if self.capacity is not None and self.channel_rate > self.capacity:
            raise MalformedRecordError(
                f"channel rate {self.channel_rate:g} exceeds group capacity {self.capacity:g}"
            )

    @property
    def has_demand(self) -> bool:
        return all(
            v is not None for v in (self.capacity, self.users, self.arrival_rate, self.mean_size)
        )


@dataclass(frozen=True)
class AreaRecord:
    area_id: str
    download: DirectionDemand
    upload: DirectionDemand
    base_year: int = 0
    line: Optional[int] = None

    def __post_init__(self):
        if not str(self.area_id).strip():
            raise MalformedRecordError("area_id is empty", self.line)
        if self.download.rho is None and not self.download.has_demand:
            raise MalformedRecordError(
                f"{self.area_id}: download needs either rho or demand parameters", self.line
            )

    def direction(self, name: str) -> DirectionDemand:
        return self.download if name == "down" else self.upload


@dataclass(frozen=True)
class TargetThreshold:
    name: str
    download_floor: float
    upload_floor: float

    def __post_init__(self):
        for floor in (self.download_floor, self.upload_floor):
            if not (math.isfinite(floor) and floor > 0):
                raise ConfigError(f"{self.name}: floors must be positive, got {floor!r}")

    def floor(self, direction: str) -> float:
        return self.download_floor if direction == "down" else self.upload_floor

    @classmethod
    def preset(cls, name: str) -> "TargetThreshold":
        try:
            down, up = THRESHOLD_PRESETS[name]
        except KeyError:
            raise ConfigError(
                f"Unknown threshold preset '{name}'. Available: {sorted(THRESHOLD_PRESETS)}"
            )
        return cls(name, down, up)


@dataclass(frozen=True)
class GrowthModel:
    """Compound annual growth g applied to rho over ``horizon_years`` years."""
    growth_rate: float = 0.0
    horizon_years: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.growth_rate) and self.growth_rate >= 0):
            raise ConfigError(f"growth rate must be >= 0, got {self.growth_rate!r}")
        if isinstance(self.horizon_years, bool) or int(self.horizon_years) != self.horizon_years \
                or self.horizon_years < 0:
            raise ConfigError(f"horizon must be an integer >= 0, got {self.horizon_years!r}")
        object.__setattr__(self, "horizon_years", int(self.horizon_years))

    def project(self, rho: float, offset: int) -> float:
        return rho * (1.0 + self.growth_rate) ** offset


# ------------------------------------------------------------------ parsing


def _blank(value) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value)) \
        or (isinstance(value, str) and not value.strip())


def _field(row: Mapping, column: str, parser, line: int):
    value = row.get(column)
    if _blank(value):
        return None
    try:
        return parser(value)
    except (ConfigError, ValueError, TypeError) as e:
        raise MalformedRecordError(f"{column}: {e}", line)


def _direction(row: Mapping, prefix: str, line: int) -> Dict:
    return {
        "channel_rate": _field(row, f"{prefix}_channel_rate", parse_rate, line),
        "capacity": _field(row, f"{prefix}_capacity", parse_rate, line),
        "users": _field(row, f"{prefix}_users", lambda v: int(float(v)), line),
        "arrival_rate": _field(row, f"{prefix}_arrival_rate", float, line),
        "mean_size": _field(row, f"{prefix}_mean_size", parse_size, line),
        "rho": _field(row, f"{prefix}_rho", float, line),
        "contemporaneity": _field(row, f"{prefix}_contemporaneity", float, line),
    }


def parse_area_row(row: Mapping, line: int) -> AreaRecord:
    """
    Build an AreaRecord from one table row.

    A missing upload load (no rho, no demand) is left as None and later
    defaults to the download load.

    Raises:
        MalformedRecordError: With the file line number
    """
    area_id = row.get("area_id")
    if _blank(area_id):
        raise MalformedRecordError("area_id is empty", line)
    try:
        down = _direction(row, "down", line)
        up = _direction(row, "up", line)
        for name, values in (("download", down), ("upload", up)):
            if values["channel_rate"] is None:
                raise MalformedRecordError(f"{area_id}: missing {name} channel rate", line)
        base_year = _field(row, "base_year", lambda v: int(float(v)), line) or 0
        return AreaRecord(
            area_id=str(area_id).strip(),
            download=DirectionDemand(**down),
            upload=DirectionDemand(**up),
            base_year=base_year,
            line=line,
        )
    except MalformedRecordError as e:
        if e.line is None:
            raise MalformedRecordError(str(e), line)
        raise
    except AccessModelError as e:
        raise MalformedRecordError(str(e), line)


def parse_area_table(df: pd.DataFrame) -> List[Tuple[int, object]]:
    """
    Parse every row of an area table.

    Returns:
        (line, AreaRecord or MalformedRecordError) per row, in file order
    """
    first_line = df.attrs.get("first_line", 2)
    entries = []
    for position, row in enumerate(df.to_dict(orient="records")):
        line = first_line + position
        try:
            entries.append((line, parse_area_row(row, line)))
        except MalformedRecordError as e:
            entries.append((line, e))
    return entries
