"""
Speed-Test Emulation

Injects probe flows into a simulated channel and reports what a speed test
would measure: bits transferred after a warm-up portion divided by the time
they took. Each sample also carries the ground-truth background load during
the probe's lifetime and the model's prediction (1 - rho) * C_i for it.
"""

from dataclasses import dataclass
import math
from typing import List, Optional, Tuple
import logging

import numpy as np
import pandas as pd

from src.constants import PROBE_SIZE_MULTIPLIER
from src.disciplines.registry import get_discipline
from src.simulation.config import SimConfig
from src.simulation.engine import ProbeRequest, ProcessorSharingSimulator
from src.simulation.stats import SimStats
from src.utils.random_streams import spawn_streams
from src.utils.validation import ConfigError, EmptyInputError, ProbeStarvedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbeSpec:
    """
    How speed tests are injected and measured.

    Attributes:
        channel_rate: The probe's MCS-determined rate C_i (bit/s)
        size: Probe size in bits (None with no duration: 100x the mean background size)
        duration: Fixed test duration in seconds, instead of a size
        injection_times: Explicit injection instants
        sampling_rate: Poisson injection rate (1/s) from the warm-up on, instead of times
        warmup_bits: Bits excluded from the speed of a size-based probe
        warmup_seconds: Seconds excluded from the speed of a duration-based probe
        load_window: Padding (s) added on both sides of the probe lifetime for ground truth
        mcs_index: MCS index reported by the probe, when known
    """
    channel_rate: float
    size: Optional[float] = None
    duration: Optional[float] = None
    injection_times: Tuple[float, ...] = ()
    sampling_rate: Optional[float] = None
    warmup_bits: float = 0.0
    warmup_seconds: float = 0.0
    load_window: float = 0.0
    mcs_index: Optional[int] = None
    label: str = "probe"

    def __post_init__(self):
        object.__setattr__(self, "injection_times", tuple(float(t) for t in self.injection_times))
        if not (self.channel_rate and self.channel_rate > 0):
            raise ConfigError(f"Probe channel_rate must be positive, got {self.channel_rate!r}")
        if self.size is not None and self.duration is not None:
            raise ConfigError("A probe has either a size or a duration, not both")
        if self.size is not None and not self.size > 0:
            raise ConfigError(f"Probe size must be positive, got {self.size!r}")
        if self.duration is not None and not self.duration > 0:
            raise ConfigError(f"Probe duration must be positive, got {self.duration!r}")
        if self.warmup_bits < 0 or self.warmup_seconds < 0 or self.load_window < 0:
            raise ConfigError("Probe warm-up and load window must be nonnegative")
        if self.size is not None and not self.size > self.warmup_bits:
            raise ConfigError(
                f"Probe size {self.size:g} must exceed the warm-up exclusion {self.warmup_bits:g}"
            )
        if self.duration is not None and not self.duration > self.warmup_seconds:
            raise ConfigError(
                f"Probe duration {self.duration:g} must exceed the warm-up "
                f"{self.warmup_seconds:g}"
            )
        if bool(self.injection_times) == (self.sampling_rate is not None):
            raise ConfigError("Give either injection_times or a sampling_rate")
        if self.sampling_rate is not None and not self.sampling_rate > 0:
            raise ConfigError(f"sampling_rate must be positive, got {self.sampling_rate!r}")
        if any(t < 0 for t in self.injection_times):
            raise ConfigError("Injection times must be nonnegative")


@dataclass(frozen=True)
class SpeedTestSample:
    """One emulated measurement."""
    injection_time: float
    measured_speed: float
    channel_rate: float
    rho: float
    model_predicted_speed: float
    configured_rho: float
    transfer_time: float
    measured_bits: float
    mcs_index: Optional[int] = None

    def to_row(self) -> dict:
        return {
            "injection_time": self.injection_time,
            "measured_speed": self.measured_speed,
            "channel_rate": self.channel_rate,
            "mcs": self.mcs_index,
            "rho": self.rho,
            "configured_rho": self.configured_rho,
            "predicted_speed": self.model_predicted_speed,
            "transfer_time": self.transfer_time,
            "measured_bits": self.measured_bits,
        }


@dataclass
class SpeedTestResult:
    samples: List[SpeedTestSample]
    stats: SimStats
    dropped: int = 0
    configured_rho: float = 0.0
    probe_rate: float = 0.0


def _default_probe_size(sim: SimConfig) -> float:
    mix = sim.mix
    total = mix.total_arrival_rate
    if total > 0:
        mean = sum(c.arrival_rate * c.mean_size for c in mix.classes) / total
    else:
        mean = sum(c.mean_size for c in mix.classes) / len(mix.classes)
    return PROBE_SIZE_MULTIPLIER * mean


def _injection_times(sim: SimConfig, probe: ProbeSpec) -> List[float]:
    if probe.injection_times:
        return sorted(probe.injection_times)
    # Stream 0 of a run is reserved for probe injection
    stream = spawn_streams(sim.seed, 1)[0]
    times = []
    t = sim.warmup
    while True:
        t += stream.exponential() / probe.sampling_rate
        if t >= sim.horizon:
            return times
        times.append(t)


def _window_load(arrival_times: np.ndarray, cumulative_work: np.ndarray,
                 start: float, end: float) -> float:
    """Offered normalized work of arrivals in [start, end) per second."""
    lo = np.searchsorted(arrival_times, start, side="left")
    hi = np.searchsorted(arrival_times, end, side="left")
    work = cumulative_work[hi] - cumulative_work[lo]
    return float(work / (end - start))


def speed_test_run(sim: SimConfig, probe: ProbeSpec) -> SpeedTestResult:
    """
    Run a simulation with probes and turn the probe traces into samples.

    Sampled (Poisson) probes still running at the horizon are dropped;
    an explicitly timed probe that does not finish is an error.

    Raises:
        ConfigError: On invalid specs or injection times past the horizon
        ProbeStarvedError: If a timed probe does not complete, or no probe does
    """
    discipline = get_discipline(sim.channel.discipline)
    if probe.channel_rate > sim.channel.capacity:
        raise ConfigError(
            f"Probe channel rate {probe.channel_rate:g} exceeds capacity {sim.channel.capacity:g}"
        )
    configured_rho = discipline.utilization(sim.mix).rho
    size = probe.size
    if size is None and probe.duration is None:
        size = _default_probe_size(sim)
        if size <= probe.warmup_bits:
            raise ConfigError(
                f"Default probe size {size:g} does not exceed the warm-up {probe.warmup_bits:g}"
            )

    times = _injection_times(sim, probe)
    if any(t >= sim.horizon for t in times):
        raise ConfigError("Probe injection times must lie before the horizon")
    if not times:
        raise ConfigError("No probe falls inside the simulated horizon")

    requests = [
        ProbeRequest(
            injection_time=t,
            channel_rate=probe.channel_rate,
            size=size,
            duration=probe.duration,
            warmup_bits=probe.warmup_bits,
            warmup_seconds=probe.warmup_seconds,
        )
        for t in times
    ]
    simulator = ProcessorSharingSimulator(sim, probes=requests, record_arrivals=True)
    result = simulator.run()

    cumulative_work = np.concatenate(([0.0], np.cumsum(result.arrival_work)))
    samples = []
    dropped = 0
    for trace in result.probes:
        if not trace.completed:
            if probe.sampling_rate is None:
                raise ProbeStarvedError(
                    f"Probe injected at {trace.injection_time:g}s did not complete "
                    f"before the horizon {sim.horizon:g}s"
                )
            dropped += 1
            continue

        elapsed = trace.end_time - trace.warm_time
        bits = trace.end_bits - trace.warm_bits
        window_start = max(trace.injection_time - probe.load_window, 0.0)
        window_end = min(trace.end_time + probe.load_window, sim.horizon)
        rho = _window_load(result.arrival_times, cumulative_work, window_start, window_end)
        if rho >= 1:
            logger.warning(
                f"Probe at {trace.injection_time:g}s saw offered load {rho:.3f} >= 1; "
                f"predicted speed floored at 0"
            )
        samples.append(SpeedTestSample(
            injection_time=trace.injection_time,
            measured_speed=bits / elapsed,
            channel_rate=trace.channel_rate,
            rho=rho,
            model_predicted_speed=max(1.0 - rho, 0.0) * trace.channel_rate,
            configured_rho=configured_rho,
            transfer_time=elapsed,
            measured_bits=bits,
            mcs_index=probe.mcs_index,
        ))

    if dropped:
        logger.info(f"{dropped} sampled probes were still running at the horizon and were dropped")
    if not samples:
        raise ProbeStarvedError("No probe completed within the horizon")

    logger.info(
        f"Speed test: {len(samples)} samples, configured rho {configured_rho:.4f}, "
        f"mean measured {np.mean([s.measured_speed for s in samples]):.6g} bit/s"
    )
    return SpeedTestResult(
        samples=samples,
        stats=result.stats,
        dropped=dropped,
        configured_rho=configured_rho,
        probe_rate=samples[0].channel_rate,
    )


def run_speed_test(sim: SimConfig, probe: ProbeSpec) -> List[SpeedTestSample]:
    """Emulated speed-test samples for a simulated channel."""
    return speed_test_run(sim, probe).samples


def ratio_speed(samples: List[SpeedTestSample]) -> float:
    """Sum of measured bits over sum of measured time: x / E[d(x)] for equal probes."""
    if not samples:
        raise EmptyInputError("No samples")
    return math.fsum(s.measured_bits for s in samples) / math.fsum(s.transfer_time for s in samples)


def bin_samples_by_load(samples: List[SpeedTestSample], bin_width: float = 0.05) -> pd.DataFrame:
    """
    Average measured and predicted speeds per ground-truth load bin.

    Returns:
        DataFrame with rho_low, rho_high, count, mean_rho, mean_measured_speed,
        mean_predicted_speed (one row per nonempty bin, ascending)
    """
    if not samples:
        raise EmptyInputError("No samples to bin")
    if not 0 < bin_width <= 1:
        raise ConfigError(f"bin_width must be in (0, 1], got {bin_width!r}")

    df = pd.DataFrame({
        "rho": [s.rho for s in samples],
        "measured": [s.measured_speed for s in samples],
        "predicted": [s.model_predicted_speed for s in samples],
    })
    df["bin"] = np.floor(df["rho"] / bin_width).astype(int)
    grouped = df.groupby("bin", sort=True).agg(
        count=("rho", "size"),
        mean_rho=("rho", "mean"),
        mean_measured_speed=("measured", "mean"),
        mean_predicted_speed=("predicted", "mean"),
    ).reset_index()
    grouped.insert(0, "rho_low", grouped["bin"] * bin_width)
    grouped.insert(1, "rho_high", (grouped["bin"] + 1) * bin_width)
    return grouped.drop(columns="bin")
