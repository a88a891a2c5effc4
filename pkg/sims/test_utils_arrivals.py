"""Tests for utils_arrivals (stochastic arrival source)."""
import pytest
from fractions import Fraction


# Test for generate_poisson_arrivals()
def test_poisson_arrivals_are_seeded():
    """Same seed gives the same arrivals; a different seed does not."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals

    params = derive_params(1, 2)
    first = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(2, 5), Fraction(1, 2), 7, 500), params)
    again = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(2, 5), Fraction(1, 2), 7, 500), params)
    other = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(2, 5), Fraction(1, 2), 8, 500), params)
    assert first == again
    assert first != other


def test_poisson_arrivals_shape():
    """Arrivals are sorted ticks inside the horizon with ids from first_id and lengths from the pair."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals

    params = derive_params(2, 5)
    packets = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(1), Fraction(1, 3), 1, 2000), params, first_id=10)
    times = [p.arrival_time for p in packets]
    assert times == sorted(times)
    assert 0 <= times[0] and times[-1] <= 2000
    assert [p.id for p in packets] == list(range(10, 10 + len(packets)))
    assert {p.length for p in packets} <= {2, 5}
    # Mean count is lambda * horizon = 2000
    assert 1700 < len(packets) < 2300


def test_poisson_arrivals_all_short_when_p_is_one():
    """p = 1 gives only short packets."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals

    packets = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(1, 2), Fraction(1), 3, 400), derive_params(1, 3))
    assert packets and all(p.length == 1 for p in packets)


@pytest.mark.parametrize('lam, p, horizon', [(0, Fraction(1, 2), 10), (1, Fraction(3, 2), 10), (1, Fraction(1, 2), 0)])
def test_stochastic_config_rejects_bad_values(lam, p, horizon):
    """Rate must be positive, p a probability and the horizon positive."""
    from utils_arrivals import StochasticArrivalConfig

    with pytest.raises(ValueError):
        StochasticArrivalConfig(Fraction(lam), p, 0, horizon)


def test_poisson_arrivals_length_marginal():
    """Over 10^5 packets the short fraction sits within 0.01 of p."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals

    packets = generate_poisson_arrivals(StochasticArrivalConfig(Fraction(1), Fraction(1, 2), 0, 110_000), derive_params(1, 2))
    assert len(packets) >= 100_000
    share = sum(1 for p in packets if p.length == 1) / len(packets)
    assert abs(share - 0.5) <= 0.01


def test_poisson_arrival_count_tracks_rate():
    """Counts stay within 5% of lambda*t on at least 95 of 100 seeds."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, generate_poisson_arrivals

    params = derive_params(1, 2)
    close = sum(abs(len(generate_poisson_arrivals(StochasticArrivalConfig(Fraction(1), Fraction(1, 2), seed, 10_000), params))
                    - 10_000) <= 500 for seed in range(100))
    assert close >= 95


# Test for StochasticArrivalConfig
def test_stochastic_config_json():
    """Configs survive a JSON round trip with exact rationals."""
    from utils_arrivals import StochasticArrivalConfig

    config = StochasticArrivalConfig(Fraction(2, 5), Fraction(1, 3), 7, 500)
    assert StochasticArrivalConfig.from_json(config.to_json()) == config


# Test for empirical_tail_check()
def test_tail_check_frequencies_are_small():
    """Short-packet counts rarely leave [t*eta*p, t*eta_prime*p]."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, empirical_tail_check

    config = StochasticArrivalConfig(Fraction(1), Fraction(1, 2), 0, 1000)
    report = empirical_tail_check(config, derive_params(1, 2), Fraction(1, 2), Fraction(2), 1000, 200)
    assert report.trials == 200
    assert report.freq_below_lower <= 0.05
    assert report.freq_above_upper <= 0.05


def test_tail_frequencies_do_not_grow_with_t():
    """Tails at t=10^4 are no heavier than at t=10^3."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, empirical_tail_check

    config = StochasticArrivalConfig(Fraction(1), Fraction(1, 2), 0, 1000)
    params = derive_params(1, 2)
    early = empirical_tail_check(config, params, Fraction(9, 10), Fraction(11, 10), 1000, 100)
    late = empirical_tail_check(config, params, Fraction(9, 10), Fraction(11, 10), 10_000, 100)
    assert late.freq_below_lower <= early.freq_below_lower
    assert late.freq_above_upper <= early.freq_above_upper


def test_tail_check_rejects_eta_outside_range():
    """eta must sit below lambda and eta_prime above it."""
    from utils_model import derive_params
    from utils_arrivals import StochasticArrivalConfig, empirical_tail_check

    config = StochasticArrivalConfig(Fraction(1), Fraction(1, 2), 0, 100)
    with pytest.raises(ValueError):
        empirical_tail_check(config, derive_params(1, 2), Fraction(2), Fraction(3), 100, 10)
    with pytest.raises(ValueError):
        empirical_tail_check(config, derive_params(1, 2), Fraction(1, 2), Fraction(1), 100, 10)
