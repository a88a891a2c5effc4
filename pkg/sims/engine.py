"""Link Engine - deterministic tick-ordered simulation of one scheduler against one adversary."""
import heapq
import json
from collections import deque
from fractions import Fraction
from typing import Literal, Optional
from dataclasses import dataclass, field, asdict, replace
from loguru import logger

from utils_model import (
    FEEDBACK, SLOT_STAGE, ContractViolation, ErrorEvent, ExecutionTrace, InstanceParams, Packet, Slot, Stage,
    TransmissionRecord, derive_params, error_corrupts,
)
from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals
from schedulers import Scheduler
from adversaries import Adversary, AdversaryDecision, EventKind, LinkEvent, make_adversary
from offline_solver import OfflineInstance
from utils_instance import parse_instance, render_instance

ARRIVAL_SOURCE = Literal['adversary', 'stochastic', 'scripted']


#>>> Everything one run needs <<<#
@dataclass
class RunConfig:
    params: InstanceParams
    scheduler: str
    adversary: str
    arrivals: ARRIVAL_SOURCE = 'adversary'
    feedback: FEEDBACK = 'instantaneous'
    horizon: int = 10_000
    sample_every: int = 1_000
    seed: int = 0
    lam: Optional[Fraction] = None
    p: Optional[Fraction] = None
    instance: Optional[OfflineInstance] = None
    max_phases: Optional[int] = None
    adversary_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be at least 1, got {self.sample_every}")
        if self.horizon < self.sample_every:
            raise ValueError(f"horizon ({self.horizon}) must be at least sample_every ({self.sample_every})")
        if self.arrivals not in ARRIVAL_SOURCE.__args__:
            raise ValueError(f"Arrival source must be one of {ARRIVAL_SOURCE.__args__}, got {self.arrivals!r}")
        if self.feedback not in FEEDBACK.__args__:
            raise ValueError(f"Feedback must be one of {FEEDBACK.__args__}, got {self.feedback!r}")
        if self.arrivals == 'stochastic' and (self.lam is None or self.p is None):
            raise ValueError("Stochastic arrivals need lambda and p")
        if self.arrivals == 'scripted' and self.instance is None:
            raise ValueError("Scripted arrivals need an instance file")
        if self.max_phases is not None and self.max_phases < 1:
            raise ValueError(f"phases must be positive, got {self.max_phases}")

    def with_seed(self, seed: int) -> 'RunConfig':
        return replace(self, seed=seed)

    def to_json(self):
        data = asdict(self)
        data['params'] = {'l_min': self.params.l_min, 'l_max': self.params.l_max}
        data['lam'] = None if self.lam is None else str(self.lam)
        data['p'] = None if self.p is None else str(self.p)
        data['instance'] = None if self.instance is None else render_instance(self.instance)
        return json.dumps(data)

    @classmethod
    def from_json(cls, json_str: str):
        data = json.loads(json_str)
        data['params'] = derive_params(data['params']['l_min'], data['params']['l_max'])
        data['lam'] = None if data['lam'] is None else Fraction(data['lam'])
        data['p'] = None if data['p'] is None else Fraction(data['p'])
        data['instance'] = None if data['instance'] is None else parse_instance(data['instance'])
        return cls(**data)


@dataclass
class Flight:
    packet: Packet
    start: int
    corrupted_at: Optional[int] = None

    @property
    def end(self) -> int:
        return self.start + self.packet.length


#>>> Event loop; also the read-only view handed to the adversary <<<#
class LinkEngine:

    def __init__(self, config: RunConfig, arrivals: list[Packet], scheduler: Scheduler, adversary: Adversary):
        self.config = config
        self.params = config.params
        self.feedback = config.feedback
        self.scheduler = scheduler
        self.adversary = adversary
        self.incoming = deque(sorted(arrivals, key=lambda p: (p.arrival_time, p.id)))
        self.next_id = max((p.id for p in arrivals), default=-1) + 1
        self.trace = ExecutionTrace(params=config.params, feedback=config.feedback, horizon=config.horizon,
                                    policy=scheduler.policy, adversary=adversary.name)
        self.released: dict[int, Packet] = {}
        self.allocated: dict[int, Packet] = {}
        self.pending_errors: list[tuple[tuple[int, int], ErrorEvent]] = []
        self.flight: Optional[Flight] = None
        self.phase_start = True
        self.now = 0
        self.stage = Stage.START

    # View for adversaries
    @property
    def arrivals(self) -> list[Packet]:
        return self.trace.arrivals

    def online_pending(self, length: int) -> int:
        return self.scheduler.pending_count(length)

    def allocate(self, length: int) -> Packet:
        packet = Packet(id=self.next_id, length=length, arrival_time=self.now)
        self.next_id += 1
        self.allocated[packet.id] = packet
        return packet

    def run(self) -> ExecutionTrace:
        self._react(LinkEvent(EventKind.START, 0))
        t = 0
        while t is not None and t <= self.config.horizon:
            self._tick(t)
            if self._phase_limit_reached(t):
                self.trace.horizon = t
                break
            t = self._next_time(t)
        return self.trace

    def _tick(self, t: int):
        self.now = t
        self.stage = Stage.COMPLETION
        if self.flight is not None and self.flight.end == t:
            self._complete()

        self.stage = Stage.PRE_ERROR
        self._fire_errors(t, Slot.PRE)

        self.stage = Stage.ARRIVAL
        while self.incoming and self.incoming[0].arrival_time == t:
            self._release(self.incoming.popleft())

        self.stage = Stage.SCHEDULE
        if self.flight is None and self.scheduler.has_pending():
            self._schedule(t)

        self.stage = Stage.POST_ERROR
        self._fire_errors(t, Slot.POST)

    def _schedule(self, t: int):
        packet = self.scheduler.choose(self.phase_start)
        if packet is None:
            raise ContractViolation(f"Scheduler {self.scheduler.name} idled at t={t} with pending packets")
        self.phase_start = False
        self.flight = Flight(packet, t)
        logger.debug(f"t={t}: transmit packet {packet.id} (length {packet.length})")
        self._react(LinkEvent(EventKind.TRANSMIT, t, packet=packet))

    def _complete(self):
        flight, self.flight = self.flight, None
        record = TransmissionRecord(flight.packet.id, flight.start, flight.end,
                                    success=flight.corrupted_at is None, corrupted_at=flight.corrupted_at)
        self.trace.transmissions.append(record)
        if not record.success:
            # Deferred feedback: the verdict arrives with the last bit
            self.scheduler.requeue(flight.packet)
            self.phase_start = True
        self._react(LinkEvent(EventKind.COMPLETE, self.now, packet=flight.packet, record=record))

    def _fire_errors(self, t: int, slot: Slot):
        key = (t, int(SLOT_STAGE[slot]))
        while self.pending_errors and self.pending_errors[0][0] == key:
            _, error = heapq.heappop(self.pending_errors)
            self._fire(error)

    def _fire(self, error: ErrorEvent):
        self.trace.errors.append(error)
        flight, record = self.flight, None
        if flight is not None and error_corrupts(flight.start, flight.packet.length, error):
            if self.feedback == 'instantaneous':
                record = TransmissionRecord(flight.packet.id, flight.start, error.time, success=False,
                                            corrupted_at=error.time)
                self.trace.transmissions.append(record)
                self.scheduler.requeue(flight.packet)
                self.flight = None
                self.phase_start = True
            elif flight.corrupted_at is None:
                flight.corrupted_at = error.time
        elif self.feedback == 'instantaneous':
            self.phase_start = True
        self._react(LinkEvent(EventKind.ERROR, error.time, record=record, error=error))

    def _release(self, packet: Packet):
        self.released[packet.id] = packet
        self.trace.arrivals.append(packet)
        self.scheduler.enqueue(packet)

    def _react(self, event: LinkEvent):
        self._apply(self.adversary.react(self, event))

    #>>> Validate and apply one adversary decision <<<#
    def _apply(self, decision: AdversaryDecision):
        for packet in decision.inject_arrivals:
            if self.allocated.pop(packet.id, None) != packet or packet.arrival_time != self.now:
                raise ContractViolation(f"Adversary injected unknown or back-dated packet {packet}")
            self._release(packet)

        if (error := decision.error) is not None:
            key = error.order_key
            if key <= (self.now, int(self.stage)):
                raise ContractViolation(f"Adversary placed error {error} in the past (now={self.now}, stage={self.stage.name})")
            if all(queued != key for queued, _ in self.pending_errors):
                heapq.heappush(self.pending_errors, (key, error))

        for action in decision.off_actions:
            packet = self.released.get(action.packet_id)
            if packet is None:
                raise ContractViolation(f"OFF transmitted packet {action.packet_id} before its arrival")
            if action.start < max(self.now, packet.arrival_time):
                raise ContractViolation(f"OFF started packet {packet.id} at {action.start} before t={self.now}")
            self.trace.off_transmissions.append(TransmissionRecord(packet.id, action.start, action.start + packet.length))

        if decision.phase is not None:
            self.trace.phases.append(decision.phase)

    def _phase_limit_reached(self, t: int) -> bool:
        n = self.config.max_phases
        return n is not None and len(self.trace.phases) >= n and self.trace.phases[n - 1].end <= t

    def _next_time(self, t: int) -> Optional[int]:
        candidates = []
        if self.flight is not None:
            candidates.append(self.flight.end)
        elif self.scheduler.has_pending():
            candidates.append(t + 1)
        if self.pending_errors:
            candidates.append(self.pending_errors[0][0][0])
        if self.incoming:
            candidates.append(self.incoming[0].arrival_time)
        return min(candidates) if candidates else None


#>>> Arrivals for the configured source <<<#
def build_arrivals(config: RunConfig) -> list[Packet]:
    if config.arrivals == 'stochastic':
        stochastic = StochasticArrivalConfig(lam=config.lam, p=config.p, seed=config.seed, horizon=config.horizon)
        return generate_poisson_arrivals(stochastic, config.params)
    if config.arrivals == 'scripted':
        return list(config.instance.packets)
    return []


#>>> Simulate one configuration to its horizon <<<#
def run(config: RunConfig) -> ExecutionTrace:
    options = dict(config.adversary_options)
    if config.adversary == 'scripted':
        if config.instance is None:
            raise ValueError("The scripted adversary needs an instance file")
        options['errors'] = config.instance.error_times
    scheduler = Scheduler(config.scheduler, config.params, lam=config.lam, p=config.p)
    adversary = make_adversary(config.adversary, config.params, feedback=config.feedback,
                               supply=config.arrivals == 'adversary', **options)
    logger.info(f"Run {config.scheduler} vs {config.adversary}: l_min={config.params.l_min}, "
                f"l_max={config.params.l_max}, feedback={config.feedback}, seed={config.seed}")

    trace = LinkEngine(config, build_arrivals(config), scheduler, adversary).run()

    logger.info(f"Done at t={trace.horizon}: L_alg={trace.completed_length(trace.transmissions)}, "
                f"L_off={trace.completed_length(trace.off_transmissions)}, errors={len(trace.errors)}")
    return trace
