# Schedulers - online, work-conserving policies for the lossy link
# SL (short first), LL (long first), SL-Preamble and the rate-aware CSL-Preamble

from collections import deque
from fractions import Fraction
from typing import Literal, Optional
from dataclasses import dataclass, field
from loguru import logger

from utils_model import InstanceParams, Packet

POLICY = Literal['sl', 'll', 'sl-preamble', 'csl-preamble']


#>>> Pending queue grouped by length, FIFO inside each length <<<#
@dataclass
class SchedulerState:
    params: InstanceParams
    policy_id: str
    pending: dict[int, deque] = field(default_factory=dict)
    preamble_left: int = 0

    def __post_init__(self):
        for length in self.params.lengths:
            self.pending.setdefault(length, deque())

    @property
    def in_preamble(self) -> bool:
        return self.preamble_left > 0

    def enqueue(self, packet: Packet):
        self._queue(packet.length).append(packet)

    #>>> A corrupted packet goes back to the head of its length class <<<#
    def requeue(self, packet: Packet):
        self._queue(packet.length).appendleft(packet)

    def count(self, length: int) -> int:
        return len(self.pending.get(length, ()))

    def head(self, length: int) -> Optional[Packet]:
        queue = self.pending.get(length)
        return queue[0] if queue else None

    def pop(self, packet: Packet):
        queue = self._queue(packet.length)
        if not queue or queue[0].id != packet.id:
            raise ValueError(f"Packet {packet.id} is not at the head of its queue")
        queue.popleft()

    def total(self) -> int:
        return sum(len(q) for q in self.pending.values())

    def _queue(self, length: int) -> deque:
        if length not in self.pending:
            raise ValueError(f"Packet length {length} is not one of {self.params.lengths}")
        return self.pending[length]


@dataclass(frozen=True)
class SchedulerDecision:
    packet: Optional[Packet] = None

    @property
    def is_idle(self) -> bool:
        return self.packet is None


IDLE = SchedulerDecision()


def sl_choose(state: SchedulerState) -> SchedulerDecision:
    for length in (state.params.l_min, state.params.l_max):
        if (packet := state.head(length)) is not None:
            return SchedulerDecision(packet)
    return IDLE


def ll_choose(state: SchedulerState) -> SchedulerDecision:
    for length in (state.params.l_max, state.params.l_min):
        if (packet := state.head(length)) is not None:
            return SchedulerDecision(packet)
    return IDLE


#>>> Preamble of gamma_bar short packets when enough are banked at phase start, LL otherwise <<<#
def sl_preamble_choose(state: SchedulerState, at_phase_start: bool, params: InstanceParams) -> SchedulerDecision:
    if at_phase_start:
        enough = state.count(params.l_min) >= params.gamma_bar
        state.preamble_left = params.gamma_bar if enough else 0
    if state.preamble_left > 0 and (packet := state.head(params.l_min)) is not None:
        state.preamble_left -= 1
        return SchedulerDecision(packet)
    state.preamble_left = 0
    return ll_choose(state)


#>>> SL when the short-packet load exceeds gamma_bar / (2 rho), SL-Preamble otherwise <<<#
def csl_select_policy(lam: Fraction, p: Fraction, params: InstanceParams) -> str:
    load = Fraction(lam) * Fraction(p) * params.l_min
    threshold = Fraction(params.gamma_bar) / (2 * params.rho)
    return 'sl' if load > threshold else 'sl-preamble'


POLICY_MAP = {
    'sl': lambda state, at_phase_start, params: sl_choose(state),
    'll': lambda state, at_phase_start, params: ll_choose(state),
    'sl-preamble': sl_preamble_choose,
}


#>>> Scheduler owned by one engine run <<<#
class Scheduler:

    def __init__(self, name: POLICY, params: InstanceParams, lam: Optional[Fraction] = None, p: Optional[Fraction] = None):
        if name not in POLICY.__args__:
            raise ValueError(f"Scheduler must be one of {POLICY.__args__}, got {name!r}")
        if name == 'csl-preamble':
            if lam is None or p is None:
                raise ValueError("csl-preamble needs the arrival rate lambda and the short-packet probability p")
            policy = csl_select_policy(lam, p, params)
            logger.info(f"csl-preamble runs {policy} (lambda*p*l_min={Fraction(lam) * Fraction(p) * params.l_min})")
        else:
            policy = name
        self.name = name
        self.params = params
        self.state = SchedulerState(params, policy)
        self._choose = POLICY_MAP[policy]

    @property
    def policy(self) -> str:
        return self.state.policy_id

    def enqueue(self, packet: Packet):
        self.state.enqueue(packet)

    def requeue(self, packet: Packet):
        self.state.requeue(packet)

    def pending_count(self, length: int) -> int:
        return self.state.count(length)

    def has_pending(self) -> bool:
        return self.state.total() > 0

    #>>> Pick the next packet and take it off the queue <<<#
    def choose(self, at_phase_start: bool) -> Optional[Packet]:
        decision = self._choose(self.state, at_phase_start, self.params)
        if decision.is_idle:
            return None
        self.state.pop(decision.packet)
        return decision.packet
