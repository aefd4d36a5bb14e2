"""
Validation Sweep
Runs matched model/simulation comparisons over a grid of loads: for every
grid point and probe profile, speed tests are emulated on a simulated
channel and compared with the analytic per-user rate (1 - rho) * C_i.

Produces a curve dataset (one row per load and profile) and a scatter
dataset (one row per probe) in plot-ready columnar form.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
import pandas as pd
from scipy import stats as scipy_stats

from src.config.documents import SweepDocument, to_domain
from src.config.settings import settings
from src.constants import PROBE_SIZE_MULTIPLIER, SWEEP_POPULATION, SWEEP_TAIL_DURATIONS
from src.disciplines.registry import get_discipline
from src.model.types import ClassMix, Discipline, UserClass
from src.probes.mcs import map_mcs_to_rate
from src.probes.speed_test import ProbeSpec, ratio_speed, speed_test_run
from src.simulation.config import ServiceDistribution, SimClass, SimConfig
from src.simulation.stats import batch_means_half_width
from src.utils.random_streams import derive_seed
from src.utils.validation import AccessModelError, ConfigError

logger = logging.getLogger(__name__)

CURVE_COLUMNS = [
    "rho", "channel_rate", "mcs", "reference_rate", "analytic_speed", "simulated_speed",
    "mean_measured_speed", "half_width", "relative_gap", "samples", "busy_fraction", "status",
]
SCATTER_COLUMNS = [
    "sample_id", "point_rho", "replica", "seed", "injection_time", "measured_speed",
    "channel_rate", "mcs", "rho", "configured_rho", "predicted_speed", "transfer_time",
    "measured_bits",
]


@dataclass(frozen=True)
class ProbeProfile:
    channel_rate: float
    mcs_index: Optional[int] = None


@dataclass(frozen=True)
class SweepSpec:
    """A load grid over a class-mix template, with probing parameters."""
    rho_grid: Tuple[float, ...]
    template: ClassMix
    populations: Tuple[int, ...]
    profiles: Tuple[ProbeProfile, ...]
    probes_per_point: int = 500
    seeds_per_point: int = 1
    probe_size: Optional[float] = None
    size_multiplier: float = PROBE_SIZE_MULTIPLIER
    warmup_bits: float = 0.0
    spacing: float = 3.0
    load_window: float = 0.0
    service_distribution: ServiceDistribution = ServiceDistribution()
    seed: int = 0

    def __post_init__(self):
        grid = tuple(float(r) for r in self.rho_grid)
        if not grid:
            raise ConfigError("rho_grid is empty")
        if any(not 0 <= r < 1 for r in grid):
            raise ConfigError(f"rho_grid values must lie in [0, 1), got {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"rho_grid must be strictly increasing, got {grid}")
        object.__setattr__(self, "rho_grid", grid)
        if len(self.populations) != len(self.template.classes):
            raise ConfigError("One population per template class is required")
        if not self.profiles:
            raise ConfigError("At least one probe profile is required")
        if self.probes_per_point < 1 or self.seeds_per_point < 1:
            raise ConfigError("probes_per_point and seeds_per_point must be >= 1")
        if self.spacing <= 1:
            raise ConfigError(f"probe spacing must exceed 1, got {self.spacing!r}")
        if max(grid) > 0 and template_utilization(self.template) <= 0:
            raise ConfigError("The class-mix template has no demand to scale")

    def to_dict(self) -> dict:
        return {
            "rho_grid": list(self.rho_grid),
            "channel": {
                "capacity": self.template.channel.capacity,
                "discipline": self.template.channel.discipline.value,
            },
            "classes": [
                {
                    "label": c.label,
                    "arrival_weight": c.arrival_rate,
                    "mean_size": c.mean_size,
                    "channel_rate": c.channel_rate,
                    "population": n,
                }
                for c, n in zip(self.template.classes, self.populations)
            ],
            "profiles": [vars(p).copy() for p in self.profiles],
            "probes_per_point": self.probes_per_point,
            "seeds_per_point": self.seeds_per_point,
            "probe_size": self.probe_size,
            "size_multiplier": self.size_multiplier,
            "warmup_bits": self.warmup_bits,
            "spacing": self.spacing,
            "load_window": self.load_window,
            "service_distribution": self.service_distribution.to_dict(),
            "seed": self.seed,
        }


def template_utilization(mix: ClassMix) -> float:
    """Utilization of a template mix; unbounded, unlike LoadPoint."""
    if mix.channel.discipline == Discipline.FAIR_SHARING:
        return sum(c.offered_work for c in mix.classes) / mix.channel.capacity
    return sum(c.offered_work / c.channel_rate for c in mix.classes)


def scale_mix(template: ClassMix, rho: float) -> ClassMix:
    """Template mix with arrival rates scaled to utilization rho."""
    base = template_utilization(template)
    factor = rho / base if base > 0 else 0.0
    return ClassMix(template.channel, tuple(
        replace(c, arrival_rate=c.arrival_rate * factor) for c in template.classes
    ))


def sweep_spec_from_document(document: SweepDocument) -> SweepSpec:
    """Resolve a sweep document into a SweepSpec."""
    channel = to_domain(document.channel)
    table = to_domain(document.rate_table) if document.rate_table else None
    classes = []
    for c in document.classes:
        classes.append(UserClass(
            arrival_rate=c.aggregate_arrival_rate(),
            mean_size=c.mean_size,
            channel_rate=c.resolve_rate(channel.capacity, table),
            label=c.label,
        ))
    try:
        template = ClassMix(channel, tuple(classes))
    except AccessModelError as e:
        raise ConfigError(str(e)) from e

    probe = document.probe
    if probe.mcs:
        profiles = tuple(ProbeProfile(map_mcs_to_rate(i, table), i) for i in probe.mcs)
    elif probe.channel_rates:
        profiles = tuple(ProbeProfile(rate) for rate in probe.channel_rates)
    else:
        profiles = (ProbeProfile(channel.capacity),)

    return SweepSpec(
        rho_grid=tuple(document.rho_grid),
        template=template,
        populations=tuple(c.population or SWEEP_POPULATION for c in document.classes),
        profiles=profiles,
        probes_per_point=document.probes_per_point,
        seeds_per_point=document.seeds_per_point,
        probe_size=probe.size,
        size_multiplier=probe.size_multiplier or PROBE_SIZE_MULTIPLIER,
        warmup_bits=probe.warmup_bits,
        spacing=probe.spacing,
        load_window=probe.load_window,
        service_distribution=to_domain(document.service_distribution),
        seed=document.seed,
    )


@dataclass
class SweepResult:
    curve: pd.DataFrame
    scatter: pd.DataFrame
    regression: Dict[str, float] = field(default_factory=dict)
    failures: List[Dict[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class _Task:
    point: int
    rho: float
    profile_index: int
    replica: int
    probes: int


def _mean_size(mix: ClassMix) -> float:
    total = mix.total_arrival_rate
    if total > 0:
        return sum(c.arrival_rate * c.mean_size for c in mix.classes) / total
    return sum(c.mean_size for c in mix.classes) / len(mix.classes)


def _run_task(spec: SweepSpec, task: _Task):
    mix = scale_mix(spec.template, task.rho)
    profile = spec.profiles[task.profile_index]
    discipline = get_discipline(mix.channel.discipline)
    reference = discipline.reference_rate(
        mix.channel.capacity, UserClass(0.0, 1.0, profile.channel_rate, "probe")
    )
    size = spec.probe_size or spec.size_multiplier * _mean_size(spec.template)
    if size <= spec.warmup_bits:
        raise ConfigError(f"Probe size {size:g} does not exceed the warm-up {spec.warmup_bits:g}")

    expected = size / ((1.0 - task.rho) * reference)
    gap = spec.spacing * expected
    warmup = gap
    times = tuple(warmup + k * gap for k in range(task.probes))
    horizon = times[-1] + SWEEP_TAIL_DURATIONS * expected + gap

    sim = SimConfig(
        channel=mix.channel,
        classes=tuple(SimClass(c, n) for c, n in zip(mix.classes, spec.populations)),
        service_distribution=spec.service_distribution,
        horizon=horizon,
        warmup=warmup,
        seed=derive_seed(spec.seed, task.point, task.profile_index, task.replica),
    )
    probe = ProbeSpec(
        channel_rate=profile.channel_rate,
        size=size,
        injection_times=times,
        warmup_bits=spec.warmup_bits,
        load_window=spec.load_window,
        mcs_index=profile.mcs_index,
    )
    logger.debug(
        f"Sweep point rho={task.rho:g} profile={task.profile_index} replica={task.replica}: "
        f"{task.probes} probes, horizon {horizon:.6g}s"
    )
    return speed_test_run(sim, probe), reference, sim.seed


def _tasks(spec: SweepSpec) -> List[_Task]:
    tasks = []
    per_run = math.ceil(spec.probes_per_point / (len(spec.profiles) * spec.seeds_per_point))
    for point, rho in enumerate(spec.rho_grid):
        for p in range(len(spec.profiles)):
            for replica in range(spec.seeds_per_point):
                tasks.append(_Task(point, rho, p, replica, per_run))
    return tasks


def scatter_regression(scatter: pd.DataFrame) -> Dict[str, float]:
    """Least-squares fit of measured on predicted speed."""
    if len(scatter) < 2 or scatter["predicted_speed"].nunique() < 2:
        return {"slope": math.nan, "intercept": math.nan, "rvalue": math.nan,
                "samples": int(len(scatter))}
    fit = scipy_stats.linregress(scatter["predicted_speed"], scatter["measured_speed"])
    return {
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "rvalue": float(fit.rvalue),
        "samples": int(len(scatter)),
    }


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """
    Execute every grid point; a failing point is reported, not fatal.

    Args:
        spec: Sweep to run
        workers: Worker threads (default: settings.sweep_workers); results keep grid order

    Returns:
        SweepResult with curve, scatter, regression and per-point failures
    """
    tasks = _tasks(spec)
    workers = workers or settings.sweep_workers

    def attempt(task: _Task):
        try:
            return _run_task(spec, task)
        except AccessModelError as e:
            logger.error(f"Sweep point rho={task.rho:g} failed: {e}", exc_info=True)
            return e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(attempt, tasks))
    else:
        outcomes = [attempt(task) for task in tasks]

    grouped: Dict[Tuple[int, int], List] = {}
    for task, outcome in zip(tasks, outcomes):
        grouped.setdefault((task.point, task.profile_index), []).append((task, outcome))

    curve_rows, scatter_rows, failures = [], [], []
    for (point, p), runs in grouped.items():
        rho = spec.rho_grid[point]
        profile = spec.profiles[p]
        errors = [o for _, o in runs if isinstance(o, Exception)]
        row = {"rho": rho, "channel_rate": profile.channel_rate, "mcs": profile.mcs_index}
        if errors:
            failures.append({"rho": rho, "channel_rate": profile.channel_rate,
                             "error": str(errors[0])})
            curve_rows.append({**row, "status": f"error: {errors[0]}"})
            continue

        samples = []
        busy = []
        reference = runs[0][1][1]
        for task, (result, _, seed) in runs:
            busy.append(result.stats.busy_fraction)
            for k, sample in enumerate(result.samples):
                samples.append(sample)
                scatter_rows.append({
                    "sample_id": f"p{point}-c{p}-r{task.replica}-{k}",
                    "point_rho": rho,
                    "replica": task.replica,
                    "seed": seed,
                    **sample.to_row(),
                })

        analytic = (1.0 - rho) * reference
        simulated = ratio_speed(samples)
        speeds = [s.measured_speed for s in samples]
        curve_rows.append({
            **row,
            "reference_rate": reference,
            "analytic_speed": analytic,
            "simulated_speed": simulated,
            "mean_measured_speed": float(np.mean(speeds)),
            "half_width": batch_means_half_width(speeds),
            "relative_gap": abs(simulated - analytic) / analytic,
            "samples": len(samples),
            "busy_fraction": float(np.mean(busy)),
            "status": "ok",
        })

    curve = pd.DataFrame(curve_rows, columns=CURVE_COLUMNS)
    scatter = pd.DataFrame(scatter_rows, columns=SCATTER_COLUMNS)
    regression = scatter_regression(scatter) if not scatter.empty else {}
    logger.info(
        f"Sweep finished: {len(curve_rows)} curve points, {len(scatter_rows)} probes, "
        f"{len(failures)} failures"
    )
    return SweepResult(curve=curve, scatter=scatter, regression=regression, failures=failures)
