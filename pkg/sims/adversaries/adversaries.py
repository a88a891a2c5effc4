# Adversaries - adaptive, history-only error (and arrival) controllers
# Each adversary reacts to link events and drives a paired OFF reference schedule

from enum import Enum
from collections import deque
from typing import Literal, Optional
from dataclasses import dataclass, field
from loguru import logger

from utils_model import (
    ContractViolation, ErrorEvent, InstanceParams, Packet, PhaseMark, Slot, TransmissionRecord,
)

ADVERSARY = Literal['adv-arrival', 'stochastic', 'deferred-killer', 'sl-killer', 'll-killer',
                    'sl-stochastic-killer', 'scripted']


class EventKind(str, Enum):
    START = 'start'
    TRANSMIT = 'transmit'
    COMPLETE = 'complete'
    ERROR = 'error'


#>>> Link event handed to the adversary <<<#
@dataclass(frozen=True)
class LinkEvent:
    kind: EventKind
    time: int
    packet: Optional[Packet] = None
    record: Optional[TransmissionRecord] = None
    error: Optional[ErrorEvent] = None


@dataclass(frozen=True)
class OffAction:
    packet_id: int
    start: int


@dataclass
class AdversaryDecision:
    inject_arrivals: list[Packet] = field(default_factory=list)
    error: Optional[ErrorEvent] = None
    off_actions: list[OffAction] = field(default_factory=list)
    phase: Optional[PhaseMark] = None


#>>> OFF's own queue: every arrival minus what OFF already sent <<<#
class OffQueue:

    def __init__(self, params: InstanceParams):
        self.pending = {length: deque() for length in params.lengths}
        self.known: set[int] = set()
        self.cursor = 0

    def ingest(self, arrivals: list[Packet]):
        for packet in arrivals[self.cursor:]:
            self.add(packet)
        self.cursor = len(arrivals)

    def add(self, packet: Packet):
        if packet.id not in self.known:
            self.known.add(packet.id)
            self.pending[packet.length].append(packet)

    def count(self, length: int) -> int:
        return len(self.pending[length])

    def take(self, length: int) -> Packet:
        if not self.pending[length]:
            raise ContractViolation(f"OFF has no pending packet of length {length}")
        return self.pending[length].popleft()


#>>> Base adversary: dispatches events and tracks phase starts <<<#
class Adversary:
    name = ''
    accepts: tuple[str, ...] = ()

    def __init__(self, params: InstanceParams, feedback: str = 'instantaneous', supply: bool = False, **options):
        self.params = params
        self.feedback = feedback
        self.supply = supply
        self.options = options
        self.off = OffQueue(params)
        self.awaiting_phase = True

    def react(self, view, event: LinkEvent) -> AdversaryDecision:
        self.off.ingest(view.arrivals)
        match event.kind:
            case EventKind.START:
                return self.on_start(view, event)
            case EventKind.TRANSMIT if self.awaiting_phase:
                self.awaiting_phase = False
                return self.on_phase_start(view, event)
            case EventKind.TRANSMIT:
                return self.on_transmit(view, event)
            case EventKind.COMPLETE:
                return self.on_complete(view, event)
            case EventKind.ERROR:
                self.awaiting_phase = True
                return self.on_error(view, event)
        raise ContractViolation(f"Unknown event kind {event.kind}")

    def on_start(self, view, event: LinkEvent) -> AdversaryDecision:
        return AdversaryDecision()

    def on_phase_start(self, view, event: LinkEvent) -> AdversaryDecision:
        return AdversaryDecision()

    def on_transmit(self, view, event: LinkEvent) -> AdversaryDecision:
        return AdversaryDecision()

    def on_complete(self, view, event: LinkEvent) -> AdversaryDecision:
        return AdversaryDecision()

    def on_error(self, view, event: LinkEvent) -> AdversaryDecision:
        return AdversaryDecision()

    #>>> Inject packets that OFF also holds from now on <<<#
    def inject(self, view, *lengths: int) -> list[Packet]:
        packets = [view.allocate(length) for length in lengths]
        for packet in packets:
            self.off.add(packet)
        return packets

    #>>> OFF sends packets of the given lengths back to back from `start` <<<#
    def off_burst(self, start: int, *lengths: int) -> tuple[list[OffAction], int]:
        actions, clock = [], start
        for length in lengths:
            actions.append(OffAction(self.off.take(length).id, clock))
            clock += length
        return actions, clock

    #>>> Dense errors: one post-schedule error per tick <<<#
    @staticmethod
    def block_from(event: LinkEvent) -> ErrorEvent:
        if event.kind == EventKind.ERROR and event.error.slot == Slot.POST:
            return ErrorEvent(event.time + 1, Slot.POST)
        return ErrorEvent(event.time, Slot.POST)

    def require_two_lengths(self):
        if self.params.l_min == self.params.l_max:
            raise ValueError(f"{self.name} needs two distinct packet lengths")

    def require_supply(self, expected: bool):
        if self.supply != expected:
            source = 'adversary' if expected else 'stochastic or scripted'
            raise ValueError(f"{self.name} needs {source} arrivals")


#>>> Adversarial arrivals: type-1 and type-2 phases decided by the online's first packet <<<#
class AdvArrivalAdversary(Adversary):
    name = 'adv-arrival'

    def __init__(self, params, feedback='instantaneous', supply=True, **options):
        super().__init__(params, feedback, supply, **options)
        self.require_supply(True)
        if params.gamma_hat < 1:
            raise ValueError("adv-arrival needs l_max > l_min")

    def on_start(self, view, event):
        return AdversaryDecision(inject_arrivals=self._top_up(view))

    def on_error(self, view, event):
        return AdversaryDecision(inject_arrivals=self._top_up(view))

    def on_phase_start(self, view, event):
        now, params = event.time, self.params
        if event.packet.length == params.l_max:
            smalls = self.inject(view, *[params.l_min] * params.gamma_hat)
            actions, end = self.off_burst(now, *[params.l_min] * params.gamma_hat)
            return AdversaryDecision(inject_arrivals=smalls, error=ErrorEvent(end, Slot.PRE), off_actions=actions,
                                     phase=PhaseMark('1', now, end, params.gamma_hat))
        actions, end = self.off_burst(now, params.l_max)
        return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions, phase=PhaseMark('2', now, end, 1))

    # Infinite long-packet supply: both queues always hold an l_max
    def _top_up(self, view) -> list[Packet]:
        if view.online_pending(self.params.l_max) == 0 or self.off.count(self.params.l_max) == 0:
            return self.inject(view, self.params.l_max)
        return []


#>>> Stochastic arrivals: rounds 1a / 1b / 2a / 2b <<<#
class StochasticAdversary(Adversary):
    name = 'stochastic'

    def __init__(self, params, feedback='instantaneous', supply=False, **options):
        super().__init__(params, feedback, supply, **options)
        self.require_supply(False)

    def on_phase_start(self, view, event):
        now, params = event.time, self.params
        starts_long = event.packet.length == params.l_max and params.l_max != params.l_min
        if starts_long:
            if (k := min(params.gamma_hat, self.off.count(params.l_min))) == 0:
                return AdversaryDecision(error=ErrorEvent(now, Slot.POST), phase=PhaseMark('1b', now, now))
            actions, end = self.off_burst(now, *[params.l_min] * k)
            return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions, phase=PhaseMark('1a', now, end, k))
        if self.off.count(params.l_max) == 0:
            return AdversaryDecision(error=ErrorEvent(now, Slot.POST), phase=PhaseMark('2b', now, now))
        actions, end = self.off_burst(now, params.l_max)
        return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions, phase=PhaseMark('2a', now, end, 1))


#>>> Deferred feedback, one length: an error in the middle of every online packet <<<#
class DeferredKiller(Adversary):
    name = 'deferred-killer'

    def __init__(self, params, feedback='deferred', supply=False, **options):
        super().__init__(params, feedback, supply, **options)
        if params.l_min != params.l_max:
            raise ValueError("deferred-killer needs a single packet length")
        if feedback != 'deferred':
            raise ValueError("deferred-killer needs deferred feedback")
        self.length = params.l_max

    def on_start(self, view, event):
        return AdversaryDecision(inject_arrivals=self.inject(view, self.length) if self.supply else [])

    def on_phase_start(self, view, event):
        return self.on_transmit(view, event)

    def on_transmit(self, view, event):
        if self.length == 1:
            return AdversaryDecision(error=ErrorEvent(event.time, Slot.POST))
        return AdversaryDecision(error=ErrorEvent(event.time + -(-self.length // 2), Slot.PRE))

    # OFF fills the gap up to the next midpoint error
    def on_error(self, view, event):
        decision = AdversaryDecision()
        if self.supply and self.off.count(self.length) == 0:
            decision.inject_arrivals = self.inject(view, self.length)
        if event.error.slot == Slot.PRE and self.off.count(self.length) > 0:
            decision.off_actions, _ = self.off_burst(event.time, self.length)
        return decision


#>>> Adversarial arrivals against SL: long-then-short OFF cycle <<<#
class SLKiller(Adversary):
    name = 'sl-killer'

    def __init__(self, params, feedback='instantaneous', supply=True, **options):
        super().__init__(params, feedback, supply, **options)
        self.require_supply(True)
        self.require_two_lengths()
        self.stage = 'fresh'

    def on_start(self, view, event):
        return AdversaryDecision(inject_arrivals=self.inject(view, self.params.l_min, self.params.l_max))

    def on_phase_start(self, view, event):
        if self.stage == 'fresh':
            self.stage = 'retry'
            actions, end = self.off_burst(event.time, self.params.l_max)
        elif self.stage == 'retry':
            self.stage = 'refill'
            actions, end = self.off_burst(event.time, self.params.l_min)
        else:
            return AdversaryDecision()
        return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions)

    def on_error(self, view, event):
        if self.stage != 'refill':
            return AdversaryDecision()
        self.stage = 'fresh'
        return AdversaryDecision(inject_arrivals=self.inject(view, self.params.l_min, self.params.l_max))


#>>> Against LL: block until a short packet for OFF and a long one for LL are pending <<<#
class LLKiller(Adversary):
    name = 'll-killer'

    def __init__(self, params, feedback='instantaneous', supply=False, **options):
        super().__init__(params, feedback, supply, **options)
        self.require_two_lengths()
        self.armed = False

    def on_start(self, view, event):
        injected = self.inject(view, self.params.l_min, self.params.l_max) if self.supply else []
        return self._block_or_arm(view, event, injected, online_extra=len(injected) > 0)

    def on_phase_start(self, view, event):
        if not self.armed:
            return AdversaryDecision()
        self.armed = False
        actions, end = self.off_burst(event.time, self.params.l_min)
        return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions)

    def on_error(self, view, event):
        if self.armed:
            return AdversaryDecision()
        injected = []
        if self.supply and self.off.count(self.params.l_min) == 0:
            injected = self.inject(view, self.params.l_min)
        return self._block_or_arm(view, event, injected)

    def _block_or_arm(self, view, event, injected, online_extra=False) -> AdversaryDecision:
        online_long = view.online_pending(self.params.l_max) + (1 if online_extra else 0)
        if self.off.count(self.params.l_min) >= 1 and online_long >= 1:
            self.armed = True
            return AdversaryDecision(inject_arrivals=injected)
        return AdversaryDecision(inject_arrivals=injected, error=self.block_from(event))


#>>> Stochastic arrivals against SL: short and long intervals separated by blocking <<<#
class SLStochasticKiller(Adversary):
    name = 'sl-stochastic-killer'

    def __init__(self, params, feedback='instantaneous', supply=False, **options):
        super().__init__(params, feedback, supply, **options)
        self.require_supply(False)
        self.require_two_lengths()
        self.stage = 'blocking'

    def on_start(self, view, event):
        return self._block_or_arm(view, event)

    def on_phase_start(self, view, event):
        if self.stage != 'armed':
            return AdversaryDecision()
        now, params = event.time, self.params
        if self.off.count(params.l_max) > 0:
            self.stage = 'long'
            actions, end = self.off_burst(now, params.l_max)
            return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions,
                                     phase=PhaseMark('long', now, end + params.l_min, 2))
        self.stage = 'closing'
        actions, end = self.off_burst(now, params.l_min)
        return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions, phase=PhaseMark('short', now, end, 1))

    def on_error(self, view, event):
        if self.stage == 'long':
            self.stage = 'closing'
            actions, end = self.off_burst(event.time, self.params.l_min)
            return AdversaryDecision(error=ErrorEvent(end, Slot.PRE), off_actions=actions)
        if self.stage == 'armed':
            return AdversaryDecision()
        return self._block_or_arm(view, event)

    def _block_or_arm(self, view, event) -> AdversaryDecision:
        if view.online_pending(self.params.l_min) >= 1 and self.off.count(self.params.l_min) >= 1:
            self.stage = 'armed'
            return AdversaryDecision()
        self.stage = 'blocking'
        return AdversaryDecision(error=self.block_from(event))


#>>> Replays a fixed error pattern, one event at a time <<<#
class ScriptedAdversary(Adversary):
    name = 'scripted'
    accepts = ('errors',)

    def __init__(self, params, feedback='instantaneous', supply=False, errors=(), **options):
        super().__init__(params, feedback, supply, **options)
        self.require_supply(False)
        self.pattern = deque(sorted(errors, key=lambda e: e.order_key))

    def on_start(self, view, event):
        return self._next()

    def on_error(self, view, event):
        return self._next()

    def _next(self) -> AdversaryDecision:
        return AdversaryDecision(error=self.pattern.popleft() if self.pattern else None)


ADVERSARY_MAP = {cls.name: cls for cls in (
    AdvArrivalAdversary, StochasticAdversary, DeferredKiller, SLKiller, LLKiller, SLStochasticKiller, ScriptedAdversary,
)}


#>>> Build an adversary by name <<<#
def make_adversary(name: ADVERSARY, params: InstanceParams, feedback: str = 'instantaneous',
                   supply: bool = False, **options) -> Adversary:
    if name not in ADVERSARY_MAP:
        raise ValueError(f"Adversary must be one of {list(ADVERSARY_MAP)}, got {name!r}")
    if unknown := sorted(set(options) - set(ADVERSARY_MAP[name].accepts)):
        raise ValueError(f"Adversary {name} does not take option(s) {unknown}")
    logger.debug(f"Building adversary {name} (supply={supply}, options={options})")
    return ADVERSARY_MAP[name](params, feedback=feedback, supply=supply, **options)
