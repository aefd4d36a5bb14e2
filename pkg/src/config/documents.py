"""
Configuration Documents
YAML documents for the model, simulation, sweep and rate-table inputs,
validated with pydantic and converted into the frozen domain types.

Rates accept numbers (bit/s) or strings such as "100 Mb/s"; sizes accept
numbers (bits) or strings such as "50 Mb".
"""

from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from src.model.types import ChannelSpec, ClassMix, Discipline, FinitePopulationSpec, UserClass
from src.probes.mcs import RateTable, map_mcs_to_rate
from src.simulation.config import ServiceDistribution, SimClass, SimConfig
from src.utils.units import parse_rate, parse_size
from src.utils.validation import AccessModelError, ConfigError, UnknownMcsError


def _as_rate(value: Any) -> float:
    try:
        return parse_rate(value)
    except ConfigError as e:
        raise ValueError(str(e))


def _as_size(value: Any) -> float:
    try:
        return parse_size(value)
    except ConfigError as e:
        raise ValueError(str(e))


Rate = Annotated[float, BeforeValidator(_as_rate)]
Size = Annotated[float, BeforeValidator(_as_size)]


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChannelDoc(_Document):
    capacity: Rate
    discipline: Discipline = Discipline.FAIR_SHARING

    def to_domain(self) -> ChannelSpec:
        return ChannelSpec(self.capacity, self.discipline)


class ClassDoc(_Document):
    label: str
    arrival_rate: Optional[float] = Field(default=None, ge=0)
    think_rate: Optional[float] = Field(default=None, ge=0)
    mean_size: Size
    channel_rate: Optional[Rate] = None
    mcs: Optional[int] = None
    population: Optional[int] = Field(default=None, ge=1)
    weight: Optional[float] = Field(default=None, ge=0)

    def resolve_rate(self, capacity: float, rate_table: Optional[RateTable]) -> float:
        if self.channel_rate is not None:
            return self.channel_rate
        if self.mcs is not None:
            if rate_table is None:
                raise ConfigError(f"{self.label}: 'mcs' given but no rate_table")
            return map_mcs_to_rate(self.mcs, rate_table)
        return capacity

    def aggregate_arrival_rate(self) -> float:
        if self.arrival_rate is not None:
            return self.arrival_rate
        if self.think_rate is not None and self.population is not None:
            return self.think_rate * self.population
        if self.weight is not None:
            return self.weight
        raise ConfigError(
            f"{self.label}: give arrival_rate, or think_rate with population"
        )


class RateTableDoc(_Document):
    name: str = "rate_table"
    rates: Dict[int, Rate]

    def to_domain(self) -> RateTable:
        return RateTable.from_mapping(self.name, self.rates)


class FinitePopulationDoc(_Document):
    population: int = Field(ge=1)
    think_rate: float = Field(gt=0)
    mean_size: Size
    capacity: Rate

    def to_domain(self) -> FinitePopulationSpec:
        return FinitePopulationSpec(self.population, self.think_rate, self.mean_size, self.capacity)


class ModelDocument(_Document):
    """Input of `predict`."""
    channel: ChannelDoc
    classes: List[ClassDoc] = Field(min_length=1)
    rate_table: Optional[RateTableDoc] = None
    finite_population: Optional[FinitePopulationDoc] = None

    def to_domain(self) -> ClassMix:
        channel = self.channel.to_domain()
        table = self.rate_table.to_domain() if self.rate_table else None
        return ClassMix(channel, tuple(
            UserClass(
                arrival_rate=c.aggregate_arrival_rate(),
                mean_size=c.mean_size,
                channel_rate=c.resolve_rate(channel.capacity, table),
                label=c.label,
            )
            for c in self.classes
        ))


class DistributionDoc(_Document):
    kind: str = "exponential"
    shape: Optional[float] = None
    cap_factor: Optional[float] = None

    def to_domain(self) -> ServiceDistribution:
        return ServiceDistribution(self.kind, self.shape, self.cap_factor)


class SimulationDocument(ModelDocument):
    """Input of `simulate`: a model document plus run control."""
    service_distribution: DistributionDoc = DistributionDoc()
    horizon: float = Field(gt=0)
    warmup: Optional[float] = Field(default=None, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _populations(self):
        for c in self.classes:
            if c.population is None:
                raise ValueError(f"class '{c.label}' needs a population for simulation")
        return self

    def to_domain(self) -> SimConfig:
        mix = super().to_domain()
        return SimConfig(
            channel=mix.channel,
            classes=tuple(
                SimClass(user_class, doc.population)
                for user_class, doc in zip(mix.classes, self.classes)
            ),
            service_distribution=self.service_distribution.to_domain(),
            horizon=self.horizon,
            warmup=self.warmup,
            seed=self.seed,
        )


class ProbeDoc(_Document):
    channel_rates: List[Rate] = Field(default_factory=list)
    mcs: List[int] = Field(default_factory=list)
    size: Optional[Size] = None
    size_multiplier: Optional[float] = Field(default=None, gt=0)
    warmup_bits: Size = 0.0
    spacing: float = Field(default=3.0, gt=1)
    load_window: float = Field(default=0.0, ge=0)


class SweepDocument(_Document):
    """Input of `validate`: a load grid over a class-mix template."""
    rho_grid: List[float] = Field(min_length=1)
    channel: ChannelDoc
    classes: List[ClassDoc] = Field(min_length=1)
    rate_table: Optional[RateTableDoc] = None
    probe: ProbeDoc = ProbeDoc()
    probes_per_point: int = Field(default=500, ge=1)
    seeds_per_point: int = Field(default=1, ge=1)
    service_distribution: DistributionDoc = DistributionDoc()
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _grid(self):
        grid = self.rho_grid
        if any(not 0 <= r < 1 for r in grid):
            raise ValueError(f"rho_grid values must lie in [0, 1), got {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"rho_grid must be strictly increasing, got {grid}")
        if self.probe.channel_rates and self.probe.mcs:
            raise ValueError("probe: give channel_rates or mcs, not both")
        if self.probe.mcs and self.rate_table is None:
            raise ValueError("probe.mcs needs a rate_table")
        return self


def load_yaml(path: Path) -> Any:
    """Parse a YAML file with safe_load."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}")


DocumentT = TypeVar("DocumentT", bound=BaseModel)


def parse_document(data: Any, model: Type[DocumentT], source: Union[str, Path] = "document"
                   ) -> DocumentT:
    """
    Validate raw YAML data against a document model.

    Raises:
        ConfigError: On schema or unit errors
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a mapping at the top level")
    try:
        return model.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"{source}: {details}")


def load_document(path: Path, model: Type[DocumentT]) -> DocumentT:
    return parse_document(load_yaml(path), model, path)


def to_domain(document: Any):
    """Convert a document, mapping domain invariant failures to ConfigError."""
    try:
        return document.to_domain()
    except (ConfigError, UnknownMcsError):
        raise
    except AccessModelError as e:
        raise ConfigError(str(e)) from e
