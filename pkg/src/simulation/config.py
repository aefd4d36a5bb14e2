"""
Simulation Configuration
Validated, immutable description of one simulation run.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
import math
from typing import Callable, Optional, Tuple

from scipy import optimize

from src.constants import DEFAULT_WARMUP_FRACTION
from src.model.types import ChannelSpec, ClassMix, UserClass
from src.utils.random_streams import RandomStream
from src.utils.validation import AccessModelError, ConfigError


class DistributionKind(str, Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"
    BOUNDED_PARETO = "bounded_pareto"


def _bounded_pareto_mean(lower: float, upper: float, shape: float) -> float:
    ratio = (lower / upper) ** shape
    if abs(shape - 1.0) < 1e-12:
        return lower * math.log(upper / lower) / (1.0 - ratio)
    return (
        (lower ** shape) / (1.0 - ratio) * shape / (shape - 1.0)
        * (lower ** (1.0 - shape) - upper ** (1.0 - shape))
    )


@dataclass(frozen=True)
class ServiceDistribution:
    """
    Shape of the request-size distribution; its mean comes from each class.

    Bounded Pareto takes a shape and a cap expressed as a multiple of the mean.
    """
    kind: DistributionKind = DistributionKind.EXPONENTIAL
    shape: Optional[float] = None
    cap_factor: Optional[float] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", DistributionKind(self.kind))
        except ValueError:
            raise ConfigError(f"Unknown service distribution {self.kind!r}")
        if self.kind == DistributionKind.BOUNDED_PARETO:
            if self.shape is None or self.cap_factor is None:
                raise ConfigError("bounded_pareto needs both shape and cap_factor")
            if not self.shape > 0:
                raise ConfigError(f"bounded_pareto shape must be > 0, got {self.shape!r}")
            if not self.cap_factor > 1:
                raise ConfigError(
                    f"bounded_pareto cap_factor must be > 1, got {self.cap_factor!r}"
                )

    @cached_property
    def pareto_lower_bound(self) -> float:
        """Lower bound L giving a unit-mean bounded Pareto on [L, cap_factor]."""
        upper = float(self.cap_factor)
        return optimize.brentq(
            lambda low: _bounded_pareto_mean(low, upper, self.shape) - 1.0,
            1e-12, 1.0 - 1e-12, xtol=1e-15, maxiter=500,
        )

    def unit_sampler(self) -> Callable[[RandomStream], float]:
        """Function drawing a unit-mean size variate from a stream."""
        if self.kind == DistributionKind.EXPONENTIAL:
            return lambda stream: stream.exponential()
        if self.kind == DistributionKind.DETERMINISTIC:
            return lambda stream: 1.0

        lower, upper, shape = self.pareto_lower_bound, float(self.cap_factor), float(self.shape)
        tail = 1.0 - (lower / upper) ** shape

        def sample(stream: RandomStream) -> float:
            return lower * (1.0 - stream.uniform() * tail) ** (-1.0 / shape)

        return sample

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value}
        if self.kind == DistributionKind.BOUNDED_PARETO:
            data.update(shape=self.shape, cap_factor=self.cap_factor)
        return data


@dataclass(frozen=True)
class SimClass:
    """
    A user class with its finite population.

    ``user_class.arrival_rate`` is the aggregate request rate of all N users,
    so each idle user thinks at gamma = arrival_rate / N.
    """
    user_class: UserClass
    population: int

    def __post_init__(self):
        if isinstance(self.population, bool) or int(self.population) != self.population \
                or self.population < 1:
            raise ConfigError(
                f"{self.user_class.label}: population must be an integer >= 1, "
                f"got {self.population!r}"
            )
        object.__setattr__(self, "population", int(self.population))

    @property
    def think_rate(self) -> float:
        return self.user_class.arrival_rate / self.population

    @property
    def label(self) -> str:
        return self.user_class.label


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: channel, populations, size distribution, horizon and seed."""
    channel: ChannelSpec
    classes: Tuple[SimClass, ...]
    service_distribution: ServiceDistribution = ServiceDistribution()
    horizon: float = 1000.0
    warmup: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        classes = tuple(self.classes)
        object.__setattr__(self, "classes", classes)
        try:
            ClassMix(self.channel, tuple(c.user_class for c in classes))
        except AccessModelError as e:
            raise ConfigError(str(e)) from e

        if not (isinstance(self.horizon, (int, float)) and math.isfinite(self.horizon)
                and self.horizon > 0):
            raise ConfigError(f"horizon must be a positive number, got {self.horizon!r}")
        warmup = DEFAULT_WARMUP_FRACTION * self.horizon if self.warmup is None else self.warmup
        if not (math.isfinite(warmup) and 0 <= warmup < self.horizon):
            raise ConfigError(
                f"warmup must satisfy 0 <= warmup < horizon ({self.horizon}), got {warmup!r}"
            )
        object.__setattr__(self, "warmup", float(warmup))
        object.__setattr__(self, "horizon", float(self.horizon))

        if isinstance(self.seed, bool) or int(self.seed) != self.seed \
                or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def mix(self) -> ClassMix:
        return ClassMix(self.channel, tuple(c.user_class for c in self.classes))

    @property
    def total_population(self) -> int:
        return sum(c.population for c in self.classes)

    @property
    def measured_span(self) -> float:
        return self.horizon - self.warmup

    def with_distribution(self, distribution: ServiceDistribution) -> "SimConfig":
        return replace(self, service_distribution=distribution)

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        """Canonical, JSON-serializable form used in manifests."""
        return {
            "channel": {
                "capacity": self.channel.capacity,
                "discipline": self.channel.discipline.value,
            },
            "classes": [
                {
                    "label": c.label,
                    "arrival_rate": c.user_class.arrival_rate,
                    "mean_size": c.user_class.mean_size,
                    "channel_rate": c.user_class.channel_rate,
                    "population": c.population,
                }
                for c in self.classes
            ],
            "service_distribution": self.service_distribution.to_dict(),
            "horizon": self.horizon,
            "warmup": self.warmup,
            "seed": self.seed,
        }
