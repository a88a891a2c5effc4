"""Tests for engine (tick-ordered link simulation)."""
import pytest
import numpy as np
from fractions import Fraction
from unittest.mock import patch


def make_config(l_min, l_max, scheduler, adversary, **kwargs):
    from utils_model import derive_params
    from engine import RunConfig

    kwargs.setdefault('horizon', 1000)
    kwargs.setdefault('sample_every', 100)
    return RunConfig(params=derive_params(l_min, l_max), scheduler=scheduler, adversary=adversary, **kwargs)


def ratios(trace, denominator, sample_every, at=()):
    from utils_metrics import relative_throughput

    return [s.ratio for s in relative_throughput(trace, denominator, sample_every, at).samples]


# Test for run() against adversarial constructions
def test_adv_arrival_cycle_at_one_two():
    """Two type-1 phases and one type-2 phase every 4 ticks: ratio exactly 1/2 at each sample."""
    from engine import run

    trace = run(make_config(1, 2, 'sl-preamble', 'adv-arrival'))
    assert set(ratios(trace, 'off', 100)) == {Fraction(1, 2)}
    assert [p.kind for p in trace.phases[:6]] == ['1', '1', '2', '1', '1', '2']


def test_adv_arrival_cycle_at_two_five():
    """At (2,5) each 9-tick cycle gives the online 4 and OFF 9."""
    from engine import run

    trace = run(make_config(2, 5, 'sl-preamble', 'adv-arrival', horizon=900, sample_every=90))
    assert set(ratios(trace, 'off', 90)) == {Fraction(4, 9)}


@pytest.mark.parametrize('l_max, period, expected', [(2, 3, Fraction(1, 3)), (3, 4, Fraction(1, 4))])
def test_sl_killer_cycle(l_max, period, expected):
    """SL completes one short per cycle while OFF completes one long and one short."""
    from engine import run

    trace = run(make_config(1, l_max, 'sl', 'sl-killer', horizon=100 * period, sample_every=10 * period))
    assert set(ratios(trace, 'off', 10 * period)) == {expected}


def test_ll_killer_starves_ll():
    """LL never completes a packet; OFF completes a short every tick."""
    from engine import run

    trace = run(make_config(1, 2, 'll', 'll-killer', horizon=200, sample_every=50))
    assert trace.completed_length(trace.transmissions) == 0
    assert trace.completed_length(trace.off_transmissions) >= 190


@pytest.mark.parametrize('seed', range(3))
def test_ll_killer_starves_ll_under_poisson_arrivals(seed):
    """With Poisson arrivals LL still completes nothing and the final ratio is 0."""
    from engine import run

    trace = run(make_config(1, 2, 'll', 'll-killer', arrivals='stochastic', lam=Fraction(1), p=Fraction(1, 2),
                            horizon=2000, sample_every=200, seed=seed))
    assert trace.completed_length(trace.transmissions) == 0
    assert ratios(trace, 'off', 200)[-1] == 0


def test_deferred_killer_midpoint_errors():
    """Length 4 under deferred feedback: errors at 2, 6, 10 and OFF fills the gaps between them."""
    from utils_model import ErrorEvent, TransmissionRecord
    from engine import run

    trace = run(make_config(4, 4, 'sl', 'deferred-killer', feedback='deferred', horizon=400, sample_every=40))
    assert trace.errors[:3] == [ErrorEvent(2), ErrorEvent(6), ErrorEvent(10)]
    assert trace.off_transmissions[:2] == [TransmissionRecord(0, 2, 6), TransmissionRecord(1, 6, 10)]
    assert trace.completed_length(trace.transmissions) == 0
    # Deferred feedback: corrupted packets still occupy the link for their full length
    assert all(r.end - r.start == 4 for r in trace.transmissions)


@pytest.mark.parametrize('scheduler', ['sl', 'll', 'sl-preamble'])
def test_deferred_killer_collapses_against_opt(scheduler):
    """Every online policy completes nothing while the offline optimum keeps growing."""
    from utils_metrics import relative_throughput
    from engine import run

    trace = run(make_config(4, 4, scheduler, 'deferred-killer', feedback='deferred', horizon=400, sample_every=40))
    samples = relative_throughput(trace, 'opt', 40).samples
    assert all(s.l_alg == 0 and s.l_ref > 0 and s.ratio == 0 for s in samples)


def test_sl_stochastic_killer_annotates_intervals():
    """The stochastic SL killer marks only long and short intervals."""
    from engine import run

    trace = run(make_config(1, 2, 'sl', 'sl-stochastic-killer', arrivals='stochastic',
                            lam=Fraction(1), p=Fraction(1, 2), horizon=1000))
    assert trace.phases
    assert {p.kind for p in trace.phases} <= {'long', 'short'}


@pytest.mark.parametrize('seed', range(3))
def test_sl_stochastic_killer_with_rare_shorts(seed):
    """With p small against q SL stays near 1/(rho+1) and under the ceiling."""
    from utils_bounds import sl_stochastic_ceiling
    from engine import run

    config = make_config(1, 2, 'sl', 'sl-stochastic-killer', arrivals='stochastic', lam=Fraction(2),
                         p=Fraction(1, 50), horizon=5000, sample_every=500, seed=seed)
    final = ratios(run(config), 'off', 500)[-1]
    assert Fraction(3, 10) <= final <= sl_stochastic_ceiling(config.lam, config.p, config.params)


# Test for run() against the stochastic adversary
def test_csl_preamble_meets_floor_at_low_load():
    """Below the threshold CSL-Preamble runs SL-Preamble and its mean ratio against OPT reaches the floor."""
    from utils_bounds import csl_floor
    from utils_metrics import relative_throughput
    from engine import run

    config = make_config(1, 2, 'csl-preamble', 'stochastic', arrivals='stochastic', lam=Fraction(2, 5),
                         p=Fraction(1, 2), horizon=2000, sample_every=200)
    finals = []
    for seed in range(5):
        trace = run(config.with_seed(seed))
        assert trace.policy == 'sl-preamble'
        finals.append(relative_throughput(trace, 'opt', 200).final.ratio)
    assert sum(finals) / len(finals) >= csl_floor(config.lam, config.p, config.params) - Fraction(1, 20)


# Test for run() determinism and history-only decisions
def test_run_is_deterministic():
    """Same configuration and seed give byte-identical traces."""
    from engine import run

    config = make_config(1, 2, 'sl-preamble', 'stochastic', arrivals='stochastic',
                         lam=Fraction(2, 5), p=Fraction(1, 2), horizon=2000, seed=3)
    assert run(config).to_json() == run(config).to_json()


def test_prefix_replay_matches():
    """A shorter run reproduces the errors and arrivals of the longer run up to its horizon."""
    from engine import run

    short = run(make_config(2, 5, 'sl-preamble', 'adv-arrival', horizon=200, sample_every=100))
    long = run(make_config(2, 5, 'sl-preamble', 'adv-arrival', horizon=400, sample_every=100))
    assert short.errors == [e for e in long.errors if e.time <= 200]
    assert short.arrivals == [p for p in long.arrivals if p.arrival_time <= 200]


def test_phase_limit_stops_run():
    """phases=3 at (1,2) stops at the end of the first type-2 phase."""
    from engine import run

    trace = run(make_config(1, 2, 'sl-preamble', 'adv-arrival', max_phases=3))
    assert trace.horizon == 4
    assert ratios(trace, 'off', 1)[-1] == Fraction(1, 2)


# Test for run() with one packet length
@pytest.mark.parametrize('scheduler', ['sl', 'll', 'sl-preamble'])
@pytest.mark.parametrize('seed', range(50))
def test_single_length_online_matches_opt(seed, scheduler):
    """With one length, any policy under instantaneous feedback matches OPT at every sample and error time."""
    from utils_model import ErrorEvent, Packet, Slot
    from offline_solver import OfflineInstance
    from engine import run

    rng = np.random.default_rng(seed)
    packets = tuple(Packet(i, 3, int(t)) for i, t in enumerate(sorted(rng.integers(0, 150, size=30))))
    keys = sorted({(int(t), int(s)) for t, s in zip(rng.integers(0, 200, size=25), rng.integers(0, 2, size=25))})
    errors = tuple(ErrorEvent(t, Slot.POST if s else Slot.PRE) for t, s in keys)
    instance = OfflineInstance(packets=packets, error_times=errors, horizon=200)

    trace = run(make_config(3, 3, scheduler, 'scripted', arrivals='scripted', instance=instance,
                            horizon=200, sample_every=10))
    series = ratios(trace, 'opt', 10, at=[e.time for e in errors])
    assert all(r == 1 for r in series)


# Test for LinkEngine contract checks
def test_idle_scheduler_is_a_contract_violation():
    """A scheduler that idles with pending packets stops the run."""
    from utils_model import ContractViolation
    from engine import run

    with patch('schedulers.Scheduler.choose', return_value=None):
        with pytest.raises(ContractViolation):
            run(make_config(1, 2, 'sl', 'adv-arrival'))


def test_error_in_the_past_is_a_contract_violation():
    """An adversary may not place an error before the current tick stage."""
    from utils_model import ContractViolation, ErrorEvent, Packet, derive_params
    from schedulers import Scheduler
    from adversaries import Adversary, AdversaryDecision
    from engine import LinkEngine

    class Backdating(Adversary):
        name = 'backdating'

        def on_phase_start(self, view, event):
            return AdversaryDecision(error=ErrorEvent(event.time))

    config = make_config(1, 2, 'sl', 'scripted', horizon=100, sample_every=10)
    params = derive_params(1, 2)
    engine = LinkEngine(config, [Packet(0, 1, 0)], Scheduler('sl', params), Backdating(params))
    with pytest.raises(ContractViolation):
        engine.run()


def test_off_sending_unreleased_packet_is_a_contract_violation():
    """OFF may only transmit packets that have arrived."""
    from utils_model import ContractViolation, Packet, derive_params
    from schedulers import Scheduler
    from adversaries import Adversary, AdversaryDecision, OffAction
    from engine import LinkEngine

    class Prescient(Adversary):
        name = 'prescient'

        def on_start(self, view, event):
            return AdversaryDecision(off_actions=[OffAction(1, 0)])

    config = make_config(1, 2, 'sl', 'scripted', horizon=100, sample_every=10)
    params = derive_params(1, 2)
    engine = LinkEngine(config, [Packet(0, 1, 0), Packet(1, 1, 5)], Scheduler('sl', params), Prescient(params))
    with pytest.raises(ContractViolation):
        engine.run()


# Test for RunConfig
def test_run_config_validation_and_json():
    """Bad sources are rejected; configs survive a JSON round trip."""
    from engine import RunConfig

    with pytest.raises(ValueError):
        make_config(1, 2, 'sl', 'stochastic', arrivals='stochastic')
    with pytest.raises(ValueError):
        make_config(1, 2, 'sl', 'adv-arrival', horizon=10, sample_every=100)
    config = make_config(1, 2, 'csl-preamble', 'stochastic', arrivals='stochastic', lam=Fraction(2, 5), p=Fraction(1, 2))
    assert RunConfig.from_json(config.to_json()) == config
