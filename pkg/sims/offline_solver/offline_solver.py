# Offline Solver - optimal throughput with the error pattern known in advance
# Two-length forward DP over error-free windows, brute-force oracle, 3-Partition reduction

import bisect
import functools as ft
from typing import Iterable
from dataclasses import dataclass
from loguru import logger

from utils_model import ErrorEvent, ExecutionTrace, InstanceParams, Packet, TransmissionRecord

BRUTE_FORCE_PACKETS = 12
BRUTE_FORCE_ERRORS = 8


class OversizeInstanceError(ValueError):
    pass


@dataclass(frozen=True)
class OfflineInstance:
    packets: tuple[Packet, ...]
    error_times: tuple[ErrorEvent, ...]
    horizon: int

    def __post_init__(self):
        keys = [e.order_key for e in self.error_times]
        if any(k1 >= k2 for k1, k2 in zip(keys, keys[1:])):
            raise ValueError("Error events must be strictly increasing by (time, slot)")
        if len({p.id for p in self.packets}) != len(self.packets):
            raise ValueError("Packet ids must be unique")
        if any(p.length <= 0 or p.arrival_time < 0 for p in self.packets):
            raise ValueError("Packets need a positive length and a non-negative arrival time")
        latest = max([p.arrival_time for p in self.packets] + [e.time for e in self.error_times], default=0)
        if self.horizon < latest:
            raise ValueError(f"Horizon {self.horizon} is before the last event at {latest}")

    @classmethod
    def from_trace(cls, trace: ExecutionTrace) -> 'OfflineInstance':
        return cls(packets=tuple(trace.arrivals), error_times=tuple(trace.errors), horizon=trace.horizon)


@dataclass(frozen=True)
class OptResult:
    max_total_length: int
    schedule: tuple[TransmissionRecord, ...]


#>>> Error-free windows [lo, hi] a transmission must fit into <<<#
def link_windows(errors: Iterable[ErrorEvent], horizon: int) -> list[tuple[int, int]]:
    windows, lo = [], 0
    for error in errors:
        if error.time > horizon:
            break
        if error.time > lo:
            windows.append((lo, error.time))
        lo = max(lo, error.window_start)
    if horizon > lo:
        windows.append((lo, horizon))
    return windows


#>>> Forward DP over windows; state = packets completed per length class <<<#
class TwoLengthSolver:

    def __init__(self, instance: OfflineInstance, params: InstanceParams):
        if bad := sorted({p.length for p in instance.packets} - set(params.lengths)):
            raise ValueError(f"Packet lengths {bad} are outside the classes {params.lengths}")
        self.instance = instance
        self.params = params
        order = sorted(instance.packets, key=lambda p: (p.arrival_time, p.id))
        self.classes = [[p for p in order if p.length == length] for length in (params.l_min, params.l_max)]
        if params.l_min == params.l_max:
            self.classes[1] = []
        self.releases = [[p.arrival_time for p in cls] for cls in self.classes]
        self.windows = link_windows(instance.error_times, instance.horizon)

    #>>> Release-order makespan of the next x short and y long packets from `lo` <<<#
    def fits(self, a: int, b: int, x: int, y: int, lo: int, hi: int) -> bool:
        mins, maxs = self.releases[0][a:a + x], self.releases[1][b:b + y]
        l_min, l_max = self.params.l_min, self.params.l_max
        clock, i, j = lo, 0, 0
        while i < x or j < y:
            if j >= y or (i < x and mins[i] <= maxs[j]):
                clock = max(clock, mins[i]) + l_min
                i += 1
            else:
                clock = max(clock, maxs[j]) + l_max
                j += 1
            if clock > hi:
                return False
        return True

    def _largest(self, fits_count, upper: int) -> int:
        low, high = 0, upper
        while low < high:
            mid = (low + high + 1) // 2
            if fits_count(mid):
                low = mid
            else:
                high = mid - 1
        return low

    #>>> Non-dominated (x, y) moves from state (a, b) inside window [lo, hi] <<<#
    def moves(self, a: int, b: int, lo: int, hi: int) -> list[tuple[int, int]]:
        l_min, l_max = self.params.l_min, self.params.l_max
        n_min = bisect.bisect_right(self.releases[0], hi - l_min) - a
        n_max = bisect.bisect_right(self.releases[1], hi - l_max) - b if self.classes[1] else 0
        n_min = max(0, min(n_min, (hi - lo) // l_min))
        n_max = max(0, min(n_max, (hi - lo) // l_max))
        if self.fits(a, b, n_min, n_max, lo, hi):
            return [(n_min, n_max)]
        if n_max == 0:
            return [(self._largest(lambda x: self.fits(a, b, x, 0, lo, hi), n_min), 0)]
        if n_min == 0:
            return [(0, self._largest(lambda y: self.fits(a, b, 0, y, lo, hi), n_max))]

        result = []
        y = self._largest(lambda y: self.fits(a, b, 0, y, lo, hi), n_max)
        for x in range(n_min + 1):
            while y > 0 and not self.fits(a, b, x, y, lo, hi):
                y -= 1
            if not self.fits(a, b, x, y, lo, hi):
                break
            result.append((x, y))
        return result

    def expand(self, frontier: dict, lo: int, hi: int) -> dict:
        new = {}
        for a, (b, trail) in frontier.items():
            for x, y in self.moves(a, b, lo, hi):
                if b + y > new.get(a + x, (-1, None))[0]:
                    new[a + x] = (b + y, trail if x + y == 0 else (trail, lo, a, b, x, y))
        return pareto(new, self.params.gamma_bar)

    def value(self, a: int, b: int) -> int:
        return a * self.params.l_min + b * self.params.l_max

    def best(self, frontier: dict) -> tuple[int, int, tuple]:
        a, (b, trail) = max(frontier.items(), key=lambda item: (self.value(item[0], item[1][0]), -item[0]))
        return a, b, trail

    #>>> One pass over the windows, answering L_OPT(t) for every requested t <<<#
    def sweep(self, times: Iterable[int] = ()) -> tuple[dict, dict[int, int]]:
        frontier = {0: (0, None)}
        pending, answers, k = sorted(set(times)), {}, 0
        for lo, hi in self.windows:
            while k < len(pending) and pending[k] < hi:
                t = pending[k]
                partial = self.expand(frontier, lo, t) if t > lo else frontier
                answers[t] = self.value(*self.best(partial)[:2])
                k += 1
            frontier = self.expand(frontier, lo, hi)
        final = self.value(*self.best(frontier)[:2])
        for t in pending[k:]:
            answers[t] = final
        return frontier, answers

    #>>> Rebuild the transmissions of one optimal state <<<#
    def witness(self, trail) -> tuple[TransmissionRecord, ...]:
        steps = []
        while trail is not None:
            trail, lo, a, b, x, y = trail
            steps.append((lo, a, b, x, y))
        records = []
        for lo, a, b, x, y in reversed(steps):
            batch = sorted(self.classes[0][a:a + x] + self.classes[1][b:b + y], key=lambda p: (p.arrival_time, p.length))
            clock = lo
            for packet in batch:
                start = max(clock, packet.arrival_time)
                clock = start + packet.length
                records.append(TransmissionRecord(packet.id, start, clock))
        return tuple(records)


#>>> Keep only states no other state beats in every continuation <<<#
def pareto(states: dict, per_long: int) -> dict:
    """
    State (a, b) beats (a + da, b - db) whenever da <= per_long * db: wherever the other
    state runs a long the first one cannot, it runs its spare shorts instead. So walking
    by longs done (descending) a state survives only if a + per_long * b strictly grows.
    """
    kept, best_key = {}, -1
    for a, (b, trail) in sorted(states.items(), key=lambda item: (-item[1][0], -item[0])):
        if a + per_long * b > best_key:
            kept[a] = (b, trail)
            best_key = a + per_long * b
    return kept


def exact_opt_two_lengths(instance: OfflineInstance, params: InstanceParams) -> OptResult:
    solver = TwoLengthSolver(instance, params)
    frontier, _ = solver.sweep()
    a, b, trail = solver.best(frontier)
    logger.debug(f"Exact OPT: {a} short + {b} long packets over {len(solver.windows)} windows")
    return OptResult(max_total_length=solver.value(a, b), schedule=solver.witness(trail))


#>>> L_OPT(t) at each requested time, each t solved as its own horizon <<<#
def opt_values_at(instance: OfflineInstance, params: InstanceParams, times: Iterable[int]) -> dict[int, int]:
    _, answers = TwoLengthSolver(instance, params).sweep(times)
    return answers


#>>> Exhaustive search over orders and earliest starts per window <<<#
def brute_force_schedule(instance: OfflineInstance) -> OptResult:
    if len(instance.packets) > BRUTE_FORCE_PACKETS or len(instance.error_times) > BRUTE_FORCE_ERRORS:
        raise OversizeInstanceError(
            f"Brute force handles at most {BRUTE_FORCE_PACKETS} packets and {BRUTE_FORCE_ERRORS} errors, "
            f"got {len(instance.packets)} and {len(instance.error_times)}")
    packets = list(instance.packets)
    windows = link_windows(instance.error_times, instance.horizon)

    @ft.lru_cache(maxsize=None)
    def search(clock: int, used: int) -> tuple[int, tuple]:
        best = (0, ())
        for i, packet in enumerate(packets):
            if used >> i & 1:
                continue
            for lo, hi in windows:
                start = max(clock, packet.arrival_time, lo)
                if start + packet.length > hi:
                    continue
                value, rest = search(start + packet.length, used | 1 << i)
                if value + packet.length > best[0]:
                    best = (value + packet.length, ((packet.id, start, packet.length),) + rest)
                # for a fixed order the earliest window that fits is never worse
                break
        return best

    value, chosen = search(0, 0)
    search.cache_clear()
    return OptResult(max_total_length=value,
                     schedule=tuple(TransmissionRecord(pid, start, start + length) for pid, start, length in chosen))


def brute_force_opt(instance: OfflineInstance) -> int:
    return brute_force_schedule(instance).max_total_length


#>>> 3-Partition instance -> throughput instance with errors every B ticks <<<#
def reduce_3partition(elements: list[int], B: int, m: int) -> OfflineInstance:
    if m <= 0 or B <= 0:
        raise ValueError(f"B and m must be positive, got B={B}, m={m}")
    if len(elements) != 3 * m:
        raise ValueError(f"Expected {3 * m} elements for m={m}, got {len(elements)}")
    if sum(elements) != m * B:
        raise ValueError(f"Elements sum to {sum(elements)}, expected m*B={m * B}")
    if outside := [s for s in elements if not (B < 4 * s and 2 * s < B)]:
        raise ValueError(f"Elements {outside} are not strictly between B/4 and B/2")
    packets = tuple(Packet(id=i, length=s, arrival_time=0) for i, s in enumerate(elements))
    errors = tuple(ErrorEvent(i * B) for i in range(1, m + 1))
    return OfflineInstance(packets=packets, error_times=errors, horizon=m * B)
