"""
Model Domain Types
Immutable value objects shared by the analytic model, the simulator, the
speed-test emulation and the planner. Units: bits, bit/s, seconds.
"""

from dataclasses import dataclass, field
from enum import Enum
import math
from typing import Optional, Tuple

from src.constants import IDENTITY_TOLERANCE
from src.utils.validation import (
    InvalidClassError,
    UnstableLoadError,
    require_nonnegative,
    require_positive,
)


class Discipline(str, Enum):
    """Scheduler discipline of a shared channel."""
    FAIR_SHARING = "fair_sharing"
    PROPORTIONAL_FAIR = "proportional_fair"


@dataclass(frozen=True)
class ChannelSpec:
    """The shared resource: total capacity C and scheduler discipline."""
    capacity: float
    discipline: Discipline = Discipline.FAIR_SHARING

    def __post_init__(self):
        object.__setattr__(self, "capacity", require_positive(self.capacity, "capacity"))
        try:
            object.__setattr__(self, "discipline", Discipline(self.discipline))
        except ValueError:
            raise InvalidClassError(f"Unknown discipline {self.discipline!r}")


@dataclass(frozen=True)
class UserClass:
    """
    A demand class.

    Attributes:
        arrival_rate: Aggregate request rate of the class (1/s)
        mean_size: Mean request size (bits)
        channel_rate: Reference channel rate C_i the class's MCS allows (bit/s)
        label: Class identifier
    """
    arrival_rate: float
    mean_size: float
    channel_rate: float
    label: str = "class"

    def __post_init__(self):
        object.__setattr__(
            self, "arrival_rate",
            require_nonnegative(self.arrival_rate, f"{self.label}.arrival_rate")
        )
        object.__setattr__(
            self, "mean_size", require_positive(self.mean_size, f"{self.label}.mean_size")
        )
        object.__setattr__(
            self, "channel_rate",
            require_positive(self.channel_rate, f"{self.label}.channel_rate")
        )

    @property
    def offered_work(self) -> float:
        """Offered traffic lambda_i * m_i in bit/s."""
        return self.arrival_rate * self.mean_size


@dataclass(frozen=True)
class ClassMix:
    """A channel and the ordered demand classes sharing it."""
    channel: ChannelSpec
    classes: Tuple[UserClass, ...]

    def __post_init__(self):
        classes = tuple(self.classes)
        if not classes:
            raise InvalidClassError("A class mix needs at least one class")
        labels = [c.label for c in classes]
        if len(set(labels)) != len(labels):
            raise InvalidClassError(f"Duplicate class labels: {labels}")
        for c in classes:
            if c.channel_rate > self.channel.capacity:
                raise InvalidClassError(
                    f"{c.label}: channel rate {c.channel_rate:g} exceeds capacity "
                    f"{self.channel.capacity:g}"
                )
        object.__setattr__(self, "classes", classes)

    @property
    def total_arrival_rate(self) -> float:
        return sum(c.arrival_rate for c in self.classes)

    def get(self, label: str) -> UserClass:
        for c in self.classes:
            if c.label == label:
                return c
        raise KeyError(label)


@dataclass(frozen=True)
class LoadPoint:
    """A utilization state rho with its per-class decomposition."""
    rho: float
    per_class_rho: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        rho = float(self.rho)
        if not math.isfinite(rho) or rho < 0:
            raise InvalidClassError(f"Utilization must be a nonnegative number, got {self.rho!r}")
        if rho >= 1:
            raise UnstableLoadError(rho)
        parts = tuple(float(r) for r in self.per_class_rho) or (rho,)
        if any(r < 0 for r in parts):
            raise InvalidClassError(f"Per-class utilization must be nonnegative: {parts}")
        total = math.fsum(parts)
        if abs(total - rho) > IDENTITY_TOLERANCE * max(1.0, abs(rho)):
            raise InvalidClassError(
                f"Per-class utilization sums to {total!r}, expected {rho!r}"
            )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "per_class_rho", parts)

    @classmethod
    def of(cls, rho: float) -> "LoadPoint":
        """Single-component load point."""
        return cls(rho=rho, per_class_rho=(rho,))


@dataclass(frozen=True)
class FinitePopulationSpec:
    """N users, each issuing a request at rate gamma while idle."""
    population: int
    think_rate: float
    mean_size: float
    capacity: float

    def __post_init__(self):
        if isinstance(self.population, bool) or int(self.population) != self.population \
                or self.population < 1:
            raise InvalidClassError(f"population must be an integer >= 1, got {self.population!r}")
        object.__setattr__(self, "population", int(self.population))
        object.__setattr__(self, "think_rate", require_positive(self.think_rate, "think_rate"))
        object.__setattr__(self, "mean_size", require_positive(self.mean_size, "mean_size"))
        object.__setattr__(self, "capacity", require_positive(self.capacity, "capacity"))

    @property
    def service_rate(self) -> float:
        """mu = C / m_X, completions per second of a lone flow."""
        return self.capacity / self.mean_size


@dataclass(frozen=True)
class RatePrediction:
    """Predicted transfer time and rate for one class."""
    mean_transfer_time: float
    per_user_throughput: float
    conditional_time_per_bit: float
    label: Optional[str] = None

    def __post_init__(self):
        for name in ("mean_transfer_time", "per_user_throughput", "conditional_time_per_bit"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidClassError(f"{name} must be positive and finite, got {value!r}")
