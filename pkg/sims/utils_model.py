# Link Model - shared types for the lossy link simulator
# Packet lengths, error events, transmission records and the tick-level event order

import math
import json
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Literal, Optional
from dataclasses import dataclass, field, asdict

FEEDBACK = Literal['instantaneous', 'deferred']


#>>> Contract violation raised by the engine, schedulers or adversaries <<<#
class ContractViolation(RuntimeError):
    pass


#>>> Ordering slot of an error inside its tick <<<#
class Slot(str, Enum):
    PRE = 'pre'
    POST = 'post'


#>>> Position of each event kind inside one tick <<<#
class Stage(IntEnum):
    START = -1
    COMPLETION = 0
    PRE_ERROR = 1
    ARRIVAL = 2
    SCHEDULE = 3
    POST_ERROR = 4


SLOT_STAGE = {Slot.PRE: Stage.PRE_ERROR, Slot.POST: Stage.POST_ERROR}


#>>> Packet-length pair and derived quantities <<<#
@dataclass(frozen=True)
class InstanceParams:
    l_min: int
    l_max: int
    rho: Fraction
    gamma_bar: int
    gamma_hat: int

    @property
    def lengths(self) -> tuple[int, ...]:
        return (self.l_min,) if self.l_min == self.l_max else (self.l_min, self.l_max)

    def to_json(self):
        return json.dumps({'l_min': self.l_min, 'l_max': self.l_max})

    @classmethod
    def from_json(cls, json_str: str):
        data = json.loads(json_str)
        return derive_params(data['l_min'], data['l_max'])


#>>> Build InstanceParams with exact rho, floor and ceil-minus-one <<<#
def derive_params(l_min: int, l_max: int) -> InstanceParams:
    if not (isinstance(l_min, int) and isinstance(l_max, int)):
        raise ValueError(f"Packet lengths must be integers, got l_min={l_min!r}, l_max={l_max!r}")
    if l_min <= 0:
        raise ValueError(f"l_min must be positive, got {l_min}")
    if l_min > l_max:
        raise ValueError(f"l_min must not exceed l_max, got l_min={l_min}, l_max={l_max}")
    rho = Fraction(l_max, l_min)
    return InstanceParams(l_min=l_min, l_max=l_max, rho=rho,
                          gamma_bar=math.floor(rho), gamma_hat=math.ceil(rho) - 1)


@dataclass(frozen=True)
class Packet:
    id: int
    length: int
    arrival_time: int


@dataclass(frozen=True, order=True)
class ErrorEvent:
    time: int
    slot: Slot = Slot.PRE

    @property
    def order_key(self) -> tuple[int, int]:
        return (self.time, int(SLOT_STAGE[self.slot]))

    @property
    def window_start(self) -> int:
        """First tick at which a transmission can start after this error."""
        return self.time if self.slot == Slot.PRE else self.time + 1


@dataclass(frozen=True)
class TransmissionRecord:
    packet_id: int
    start: int
    end: int
    success: bool = True
    corrupted_at: Optional[int] = None

    @property
    def outcome(self) -> str:
        return 'success' if self.success else 'corrupted'


#>>> Annotation of one adversary-built phase (or interval) <<<#
@dataclass(frozen=True)
class PhaseMark:
    kind: str
    start: int
    end: int
    off_count: int = 0


@dataclass
class ExecutionTrace:
    params: InstanceParams
    feedback: FEEDBACK
    horizon: int
    arrivals: list[Packet] = field(default_factory=list)
    errors: list[ErrorEvent] = field(default_factory=list)
    transmissions: list[TransmissionRecord] = field(default_factory=list)
    off_transmissions: list[TransmissionRecord] = field(default_factory=list)
    phases: list[PhaseMark] = field(default_factory=list)
    policy: str = ''
    adversary: str = ''

    @property
    def packet_lengths(self) -> dict[int, int]:
        return {p.id: p.length for p in self.arrivals}

    def completed_length(self, records: list[TransmissionRecord], until: Optional[int] = None) -> int:
        lengths = self.packet_lengths
        return sum(lengths[r.packet_id] for r in records
                   if r.success and (until is None or r.end <= until))

    def to_json(self):
        data = asdict(self)
        data['params'] = {'l_min': self.params.l_min, 'l_max': self.params.l_max}
        data['errors'] = [[e.time, e.slot.value] for e in self.errors]
        return json.dumps(data)


#>>> Does an error corrupt a transmission occupying [start, start + length) <<<#
def error_corrupts(start: int, length: int, error: ErrorEvent, scheduled_at: Optional[int] = None) -> bool:
    scheduled_at = start if scheduled_at is None else scheduled_at
    if error.time >= start + length or error.time < start:
        return False
    if error.time > start:
        return True
    # Error on the start tick: a pre-schedule error precedes a decision taken on that tick
    if error.slot == Slot.POST:
        return True
    return scheduled_at < error.time
