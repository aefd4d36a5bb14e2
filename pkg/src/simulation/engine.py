"""
Processor-Sharing Simulator - Event-Driven

Simulates a shared channel under fair sharing or proportional fair with a
finite population of users per class. Each user alternates between an
exponential think period and a transfer.

Flows are drained analytically in virtual time: every flow's work is its
size divided by its reference rate (C under fair sharing, C_i under
proportional fair) and, with n flows active, every flow's remaining work
shrinks at rate 1/n. Completions are the smallest finish tags in a heap.
"""

from dataclasses import dataclass, field
import heapq
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from src.constants import COMPLETION_SLACK_BITS
from src.disciplines.registry import get_discipline
from src.simulation.config import SimConfig
from src.simulation.stats import SimStats, build_stats
from src.utils.random_streams import spawn_streams
from src.utils.validation import SimulationError

logger = logging.getLogger(__name__)

# Finish-heap entry kinds
_COMPLETION = 0
_MILESTONE = 1

# Timed-event ranks; completions always precede timed events at equal times
_PROBE_TIMER = 0
_USER_ARRIVAL = 1
_PROBE_INJECTION = 2


@dataclass(frozen=True)
class FlowState:
    """Snapshot of an active flow."""
    label: str
    remaining_bits: float
    start_time: float
    channel_rate: float


@dataclass(frozen=True)
class ProbeRequest:
    """
    A measurement flow injected at a fixed time.

    Exactly one of ``size`` (bits) or ``duration`` (seconds) is set. The
    warm-up is in bits for size-based probes and seconds for duration-based ones.
    """
    injection_time: float
    channel_rate: float
    size: Optional[float] = None
    duration: Optional[float] = None
    warmup_bits: float = 0.0
    warmup_seconds: float = 0.0


@dataclass
class ProbeTrace:
    """Timing of one probe: where its measured part starts and ends."""
    index: int
    injection_time: float
    channel_rate: float
    warm_time: Optional[float] = None
    warm_bits: Optional[float] = None
    end_time: Optional[float] = None
    end_bits: Optional[float] = None

    @property
    def completed(self) -> bool:
        return self.end_time is not None and self.warm_time is not None


@dataclass
class SimulationResult:
    """Statistics of a run plus the raw traces needed by the speed-test emulation."""
    stats: SimStats
    probes: List[ProbeTrace] = field(default_factory=list)
    arrival_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    arrival_work: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class _Flow:
    owner: int           # class index, or -1 for probes
    user: int            # global user index, or probe index
    start_time: float
    size: float
    rate: float          # reference rate used to normalize work
    finish_tag: float
    start_tag: float


class ProcessorSharingSimulator:
    """Event-driven simulator of one SimConfig."""

    def __init__(self, config: SimConfig, probes: Sequence[ProbeRequest] = (),
                 record_arrivals: bool = False):
        self.config = config
        self.discipline = get_discipline(config.channel.discipline)
        self.probes = list(probes)
        self.record_arrivals = record_arrivals or bool(self.probes)

        self._capacity = config.channel.capacity
        self._sampler = config.service_distribution.unit_sampler()

        # User layout: users of class k occupy a contiguous index range
        self._user_class: List[int] = []
        for k, sim_class in enumerate(config.classes):
            self._user_class.extend([k] * sim_class.population)
        self._class_rates = [
            self.discipline.reference_rate(self._capacity, c.user_class) for c in config.classes
        ]
        self._class_means = [c.user_class.mean_size for c in config.classes]
        self._think_rates = [c.think_rate for c in config.classes]

        # Stream 0 is reserved for probe injection times
        streams = spawn_streams(config.seed, 1 + len(self._user_class))
        self._think_streams = []
        self._size_streams = []
        for stream in streams[1:]:
            think, size = stream.spawn(2)
            self._think_streams.append(think)
            self._size_streams.append(size)

    # ------------------------------------------------------------------ state

    def _reset(self):
        self.now = 0.0
        self.virtual_time = 0.0
        self._active: Dict[int, _Flow] = {}
        self._finish_heap: List[Tuple[float, int, int, int]] = []
        self._timers: List[Tuple[float, int, int, int]] = []
        self._next_flow_id = 0

        n_classes = len(self.config.classes)
        self._class_active = [0] * n_classes
        self._probe_active = 0
        self._occupancy: List[float] = [0.0]
        self._share_time = [0.0] * n_classes
        self._probe_share_time = 0.0

        self._times: List[List[float]] = [[] for _ in range(n_classes)]
        self._rates: List[List[float]] = [[] for _ in range(n_classes)]
        self._slowdowns: List[List[float]] = [[] for _ in range(n_classes)]
        self._bits: List[float] = [0.0] * n_classes

        self._arrival_times: List[float] = []
        self._arrival_work: List[float] = []
        self._traces = [
            ProbeTrace(index=i, injection_time=p.injection_time, channel_rate=p.channel_rate)
            for i, p in enumerate(self.probes)
        ]
        self._probe_flow: Dict[int, int] = {}
        self._events = 0

    @property
    def active_count(self) -> int:
        return len(self._active)

    def snapshot(self) -> List[FlowState]:
        """Active flows with their remaining bits at the current instant."""
        flows = []
        for flow in self._active.values():
            label = (
                self.config.classes[flow.owner].label if flow.owner >= 0 else f"probe-{flow.user}"
            )
            remaining_work = max(flow.finish_tag - self.virtual_time, 0.0) \
                if math.isfinite(flow.finish_tag) else math.inf
            flows.append(FlowState(
                label=label,
                remaining_bits=remaining_work * flow.rate,
                start_time=flow.start_time,
                channel_rate=flow.rate,
            ))
        return flows

    def drain_rates(self) -> List[float]:
        """Instantaneous drain rate of each active flow, in snapshot order."""
        return self.discipline.drain_rates(
            self._capacity, [flow.rate for flow in self._active.values()]
        )

    # ------------------------------------------------------------ scheduling

    def _schedule_think(self, user: int):
        gamma = self._think_rates[self._user_class[user]]
        if gamma <= 0:
            return
        when = self.now + self._think_streams[user].exponential() / gamma
        if when <= self.config.horizon:
            heapq.heappush(self._timers, (when, _USER_ARRIVAL, user, 0))

    def _start_flow(self, owner: int, user: int, size: float, rate: float) -> int:
        flow_id = self._next_flow_id
        self._next_flow_id += 1
        work = size / rate
        flow = _Flow(owner, user, self.now, size, rate,
                     self.virtual_time + work, self.virtual_time)
        self._active[flow_id] = flow
        if math.isfinite(flow.finish_tag):
            heapq.heappush(self._finish_heap, (flow.finish_tag, _COMPLETION, user, flow_id))
        if owner >= 0:
            self._class_active[owner] += 1
        else:
            self._probe_active += 1
        return flow_id

    def _remove_flow(self, flow_id: int) -> _Flow:
        flow = self._active.pop(flow_id)
        if flow.owner >= 0:
            self._class_active[flow.owner] -= 1
        else:
            self._probe_active -= 1
        return flow

    def _peek_finish(self) -> Optional[Tuple[float, int, int, int]]:
        while self._finish_heap:
            entry = self._finish_heap[0]
            if entry[3] in self._active:
                return entry
            heapq.heappop(self._finish_heap)
        return None

    def _advance(self, until: float):
        """Move the clock, integrating occupancy over the measured window."""
        span_start = max(self.now, self.config.warmup)
        n = len(self._active)
        if until > span_start:
            span = until - span_start
            while len(self._occupancy) <= n:
                self._occupancy.append(0.0)
            self._occupancy[n] += span
            if n:
                for k, count in enumerate(self._class_active):
                    if count:
                        self._share_time[k] += span * count / n
                if self._probe_active:
                    self._probe_share_time += span * self._probe_active / n
        if n and until > self.now:
            self.virtual_time += (until - self.now) / n
        self.now = until

    # -------------------------------------------------------------- handlers

    def _complete(self, entry: Tuple[float, int, int, int]):
        tag, kind, _, flow_id = heapq.heappop(self._finish_heap)
        flow = self._active[flow_id]

        if kind == _MILESTONE:
            trace = self._traces[flow.user]
            trace.warm_time = self.now
            trace.warm_bits = self.probes[flow.user].warmup_bits
            return

        self._remove_flow(flow_id)
        elapsed = self.now - flow.start_time
        if elapsed <= 0:
            raise SimulationError(
                f"Flow {flow_id} completed with nonpositive transfer time {elapsed!r}"
            )

        if flow.owner < 0:
            trace = self._traces[flow.user]
            trace.end_time = self.now
            trace.end_bits = flow.size
            return

        if flow.start_time >= self.config.warmup:
            k = flow.owner
            self._times[k].append(elapsed)
            self._rates[k].append(flow.size / elapsed)
            self._slowdowns[k].append(elapsed * flow.rate / flow.size)
            self._bits[k] += flow.size
        self._schedule_think(flow.user)

    def _user_arrival(self, user: int):
        k = self._user_class[user]
        size = self._class_means[k] * self._sampler(self._size_streams[user])
        rate = self._class_rates[k]
        if self.record_arrivals:
            self._arrival_times.append(self.now)
            self._arrival_work.append(size / rate)
        self._start_flow(k, user, size, rate)

    def _probe_injection(self, index: int):
        probe = self.probes[index]
        rate = self.discipline.reference_rate(
            self._capacity, _ProbeClass(probe.channel_rate)
        )
        trace = self._traces[index]
        trace.channel_rate = rate
        size = probe.size if probe.size is not None else math.inf
        flow_id = self._start_flow(-1, index, size, rate)
        self._probe_flow[index] = flow_id

        if probe.size is not None:
            if probe.warmup_bits > 0:
                heapq.heappush(
                    self._finish_heap,
                    (self.virtual_time + probe.warmup_bits / rate, _MILESTONE, index, flow_id),
                )
            else:
                trace.warm_time = self.now
                trace.warm_bits = 0.0
        else:
            if probe.warmup_seconds > 0:
                heapq.heappush(
                    self._timers, (self.now + probe.warmup_seconds, _PROBE_TIMER, index, 1)
                )
            else:
                trace.warm_time = self.now
                trace.warm_bits = 0.0
            heapq.heappush(self._timers, (self.now + probe.duration, _PROBE_TIMER, index, 2))

    def _probe_timer(self, index: int, which: int):
        flow_id = self._probe_flow[index]
        flow = self._active[flow_id]
        bits = (self.virtual_time - flow.start_tag) * flow.rate
        trace = self._traces[index]
        if which == 1:
            trace.warm_time = self.now
            trace.warm_bits = bits
        else:
            self._remove_flow(flow_id)
            trace.end_time = self.now
            trace.end_bits = bits

    # ------------------------------------------------------------------- run

    def run(self, on_event: Optional[Callable[["ProcessorSharingSimulator"], None]] = None
            ) -> SimulationResult:
        """
        Execute the run to the horizon.

        Args:
            on_event: Optional observer called after every processed event

        Returns:
            SimulationResult with SimStats and probe traces
        """
        self._reset()
        config = self.config
        horizon = config.horizon
        logger.debug(
            f"Simulating {config.channel.discipline.value} channel: "
            f"{config.total_population} users, horizon {horizon:g}s, seed {config.seed}"
        )

        for user in range(len(self._user_class)):
            self._schedule_think(user)
        for index, probe in enumerate(self.probes):
            if probe.injection_time < horizon:
                heapq.heappush(self._timers, (probe.injection_time, _PROBE_INJECTION, index, 0))

        while True:
            entry = self._peek_finish()
            n = len(self._active)
            if entry is not None:
                completion_time = self.now + (entry[0] - self.virtual_time) * n
            else:
                completion_time = math.inf
            timer_time = self._timers[0][0] if self._timers else math.inf

            if min(completion_time, timer_time) > horizon:
                self._advance(horizon)
                break

            if completion_time <= timer_time:
                self._advance(max(completion_time, self.now))
                self.virtual_time = max(self.virtual_time, entry[0])
                self._complete(entry)
                self._drain_simultaneous()
            else:
                when, rank, index, which = heapq.heappop(self._timers)
                self._advance(when)
                if rank == _USER_ARRIVAL:
                    self._user_arrival(index)
                elif rank == _PROBE_INJECTION:
                    self._probe_injection(index)
                else:
                    self._probe_timer(index, which)

            self._events += 1
            if on_event is not None:
                on_event(self)

        stats = build_stats(
            labels=[c.label for c in config.classes],
            transfer_times=self._times,
            throughputs=self._rates,
            slowdowns=self._slowdowns,
            bits=self._bits,
            occupancy=self._occupancy,
            class_share_time=self._share_time,
            probe_share_time=self._probe_share_time,
            measured_span=config.measured_span,
        )
        logger.info(
            f"Simulation finished: {self._events} events, {stats.completed_flows} flows "
            f"measured, busy fraction {stats.busy_fraction:.4f}"
        )
        return SimulationResult(
            stats=stats,
            probes=self._traces,
            arrival_times=np.asarray(self._arrival_times, dtype=float),
            arrival_work=np.asarray(self._arrival_work, dtype=float),
        )

    def _drain_simultaneous(self):
        """Complete flows whose remaining bits are within the slack of zero."""
        while True:
            entry = self._peek_finish()
            if entry is None:
                return
            flow = self._active[entry[3]]
            if (entry[0] - self.virtual_time) * flow.rate > COMPLETION_SLACK_BITS:
                return
            self._complete(entry)


@dataclass(frozen=True)
class _ProbeClass:
    """Minimal class view handed to the discipline for a probe's reference rate."""
    channel_rate: float
    label: str = "probe"


def run_simulation(config: SimConfig) -> SimStats:
    """Run one simulation and return its statistics."""
    return ProcessorSharingSimulator(config).run().stats
