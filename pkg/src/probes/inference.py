"""
Load Inference
Estimates the utilization rho of a channel from speed measurements by
inverting v = (1 - rho) * C_i per sample and averaging.
"""

from dataclasses import dataclass, field
import math
from typing import List, Optional, Protocol, Sequence
import logging

import numpy as np

from src.model.formulas import infer_utilization
from src.utils.validation import EmptyInputError, InconsistentMeasurementError

logger = logging.getLogger(__name__)


class Measurement(Protocol):
    measured_speed: float
    channel_rate: float


@dataclass(frozen=True)
class MeasuredSpeed:
    """A measurement read from a samples file."""
    measured_speed: float
    channel_rate: float
    sample_id: Optional[str] = None
    mcs_index: Optional[int] = None
    line: Optional[int] = None


@dataclass
class InferenceReport:
    """
    Aggregate and per-sample inferred utilization.

    ``per_sample`` holds None for inconsistent samples (v > C_i), which are
    listed in ``inconsistent`` by position and excluded from the aggregate.
    """
    rho: float
    used: int
    per_sample: List[Optional[float]] = field(default_factory=list)
    inconsistent: List[int] = field(default_factory=list)
    std: float = math.nan

    @property
    def inconsistent_count(self) -> int:
        return len(self.inconsistent)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "used": self.used,
            "std": self.std,
            "inconsistent_count": self.inconsistent_count,
            "inconsistent": list(self.inconsistent),
        }


def infer_load_from_samples(samples: Sequence[Measurement]) -> InferenceReport:
    """
    Mean of 1 - v_i / C_i over consistent samples.

    Raises:
        EmptyInputError: With no samples, or none consistent
    """
    if not samples:
        raise EmptyInputError("No samples to infer utilization from")

    per_sample: List[Optional[float]] = []
    inconsistent: List[int] = []
    for position, sample in enumerate(samples):
        try:
            per_sample.append(infer_utilization(sample.measured_speed, sample.channel_rate))
        except InconsistentMeasurementError as e:
            per_sample.append(None)
            inconsistent.append(position)
            logger.debug(f"Sample {position} excluded: {e}")

    values = np.array([r for r in per_sample if r is not None], dtype=float)
    if inconsistent:
        logger.warning(
            f"{len(inconsistent)} of {len(samples)} samples report a speed above their "
            f"channel rate and were excluded"
        )
    if values.size == 0:
        raise EmptyInputError("Every sample is inconsistent (measured speed above channel rate)")

    report = InferenceReport(
        rho=float(values.mean()),
        used=int(values.size),
        per_sample=per_sample,
        inconsistent=inconsistent,
        std=float(values.std(ddof=1)) if values.size > 1 else math.nan,
    )
    logger.info(f"Inferred rho {report.rho:.4f} from {report.used} samples")
    return report
