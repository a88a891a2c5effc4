"""Metrics: relative-throughput series, phase census and long-run estimates."""
import bisect
import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Literal, Optional
from dataclasses import dataclass, field
import pandas as pd
from loguru import logger

from utils_model import ExecutionTrace, InstanceParams, TransmissionRecord
from utils_bounds import render_decimal
from offline_solver import OfflineInstance, brute_force_opt, opt_values_at

DENOMINATOR = Literal['opt', 'off']
CENSUS_ADVERSARIES = ('adv-arrival', 'stochastic')
CONVERGENCE_SPREAD = Fraction(1, 100)


#>>> Zero over zero counts as one; OFF may trail the online early on <<<#
def ratio(l_alg: int, l_ref: int) -> Fraction:
    return Fraction(1) if l_ref == 0 else Fraction(l_alg, l_ref)


@dataclass(frozen=True)
class Sample:
    t: int
    l_alg: int
    l_ref: int
    ratio: Fraction


@dataclass
class ThroughputSeries:
    samples: list[Sample]
    denominator: DENOMINATOR

    @property
    def final(self) -> Sample:
        return self.samples[-1]

    def at(self, t: int) -> Sample:
        return next(s for s in self.samples if s.t == t)

    def to_frame(self, seed: Optional[int] = None) -> pd.DataFrame:
        return pd.DataFrame({
            't': [s.t for s in self.samples],
            'L_alg': [s.l_alg for s in self.samples],
            'L_ref': [s.l_ref for s in self.samples],
            'ratio': [render_decimal(s.ratio) for s in self.samples],
            'seed': seed,
        })


#>>> Cumulative successfully transmitted length as a step function of t <<<#
class Cumulative:

    def __init__(self, records: Iterable[TransmissionRecord], lengths: dict[int, int]):
        done = sorted((r.end, lengths[r.packet_id]) for r in records if r.success)
        self.ends = [end for end, _ in done]
        self.totals = [0]
        for _, length in done:
            self.totals.append(self.totals[-1] + length)

    def __call__(self, t: int) -> int:
        return self.totals[bisect.bisect_right(self.ends, t)]


def sample_times(horizon: int, sample_every: int, at: Iterable[int] = ()) -> list[int]:
    times = set(range(sample_every, horizon + 1, sample_every))
    if horizon % sample_every:
        times.add(horizon)
    times.update(t for t in at if 0 <= t <= horizon)
    return sorted(times)


#>>> L_OPT(t) for each t; brute force when lengths leave the two classes <<<#
def opt_reference(trace: ExecutionTrace, times: list[int]) -> dict[int, int]:
    instance = OfflineInstance.from_trace(trace)
    if {p.length for p in instance.packets} <= set(trace.params.lengths):
        return opt_values_at(instance, trace.params, times)
    answers = {}
    for t in times:
        prefix = OfflineInstance(packets=tuple(p for p in instance.packets if p.arrival_time <= t),
                                 error_times=tuple(e for e in instance.error_times if e.time <= t), horizon=t)
        answers[t] = brute_force_opt(prefix)
    return answers


def relative_throughput(trace: ExecutionTrace, denominator: DENOMINATOR, sample_every: int,
                        at: Iterable[int] = ()) -> ThroughputSeries:
    if denominator not in DENOMINATOR.__args__:
        raise ValueError(f"Denominator must be one of {DENOMINATOR.__args__}, got {denominator!r}")
    times = sample_times(trace.horizon, sample_every, at)
    lengths = trace.packet_lengths
    alg = Cumulative(trace.transmissions, lengths)
    if denominator == 'off':
        off = Cumulative(trace.off_transmissions, lengths)
        reference = {t: off(t) for t in times}
    else:
        reference = opt_reference(trace, times)
    return ThroughputSeries(samples=[Sample(t, alg(t), reference[t], ratio(alg(t), reference[t])) for t in times],
                            denominator=denominator)


@dataclass
class PhaseCensus:
    p1: int = 0
    p2: Counter = field(default_factory=Counter)
    r_1a: Counter = field(default_factory=Counter)
    r_2a: Counter = field(default_factory=Counter)
    r_1b: int = 0
    r_2b: int = 0
    open_phases: int = 0

    @property
    def closed_phases(self) -> int:
        return self.p1 + sum(self.p2.values()) + sum(self.r_1a.values()) + sum(self.r_2a.values()) + self.r_1b + self.r_2b


#>>> Count phase types (and short-packet completions) from the trace annotations <<<#
def phase_census(trace: ExecutionTrace, params: InstanceParams, until: Optional[int] = None) -> PhaseCensus:
    if trace.adversary not in CENSUS_ADVERSARIES:
        raise ValueError(f"Phase census needs a trace from {CENSUS_ADVERSARIES}, got {trace.adversary!r}")
    until = trace.horizon if until is None else until
    lengths = trace.packet_lengths
    shorts = sorted((r.start, r.end) for r in trace.transmissions if r.success and lengths[r.packet_id] == params.l_min)
    starts = [start for start, _ in shorts]

    census = PhaseCensus()
    for phase in trace.phases:
        if phase.end > until:
            census.open_phases += 1
            continue
        lo = bisect.bisect_left(starts, phase.start)
        hi = bisect.bisect_right(starts, phase.end)
        j = sum(1 for _, end in shorts[lo:hi] if end <= phase.end)
        match phase.kind:
            case '1':
                census.p1 += 1
            case '2':
                census.p2[j] += 1
            case '1a':
                census.r_1a[phase.off_count] += 1
            case '2a':
                census.r_2a[j] += 1
            case '1b':
                census.r_1b += 1
            case '2b':
                census.r_2b += 1
    if not trace.phases:
        census.open_phases = 1
    return census


def adversarial_census_ratio(census: PhaseCensus, params: InstanceParams) -> Fraction:
    num = params.l_min * sum(j * n for j, n in census.p2.items())
    den = params.l_max * sum(census.p2.values()) + params.l_min * params.gamma_hat * census.p1
    return ratio(num, den)


def stochastic_census_ratio(census: PhaseCensus, params: InstanceParams) -> Fraction:
    num = params.l_min * sum(j * n for j, n in census.r_2a.items())
    den = params.l_max * sum(census.r_2a.values()) + params.l_min * sum(j * n for j, n in census.r_1a.items())
    return ratio(num, den)


@dataclass(frozen=True)
class LongRunEstimate:
    estimate: Fraction
    converged: bool


#>>> Final ratio, flagged converged when the trailing window spreads by at most 0.01 <<<#
def long_run_estimate(series: ThroughputSeries, window_fraction: Fraction) -> LongRunEstimate:
    if not series.samples:
        raise ValueError("Cannot estimate from an empty series")
    if not 0 < window_fraction < 1:
        raise ValueError(f"window_fraction must lie in (0, 1), got {window_fraction}")
    count = max(1, math.ceil(len(series.samples) * Fraction(window_fraction)))
    tail = [s.ratio for s in series.samples[-count:]]
    return LongRunEstimate(estimate=series.final.ratio, converged=max(tail) - min(tail) <= CONVERGENCE_SPREAD)


#>>> Across-seed mean ratio at each common sample time <<<#
def mean_ratio_series(series_list: list[ThroughputSeries]) -> list[tuple[int, Fraction]]:
    if not series_list:
        return []
    times = [s.t for s in series_list[0].samples]
    if any([s.t for s in series.samples] != times for series in series_list):
        raise ValueError("All series must share the same sample times")
    logger.debug(f"Averaging {len(series_list)} series over {len(times)} samples")
    return [(t, sum((series.samples[i].ratio for series in series_list), Fraction(0)) / len(series_list))
            for i, t in enumerate(times)]
