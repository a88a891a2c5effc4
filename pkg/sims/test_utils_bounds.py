"""Tests for utils_bounds (exact bound catalogue)."""
import pytest
from fractions import Fraction


# Test for render_decimal()
@pytest.mark.parametrize('value, expected', [
    (Fraction(1, 2), '0.5'),
    (Fraction(4, 9), '0.444444444444'),
    (Fraction(2, 3), '0.666666666667'),
    (Fraction(1), '1'),
    (Fraction(0), '0'),
])
def test_render_decimal(value, expected):
    """Twelve significant digits, half-even rounding, no exponent."""
    from utils_bounds import render_decimal

    assert render_decimal(value) == expected


# Test for the bound functions
def test_adversarial_bounds():
    """SL-Preamble bound and the SL ceiling at (1,2) and (2,5)."""
    from utils_model import derive_params
    from utils_bounds import sl_ceiling, sl_preamble_bound

    assert sl_preamble_bound(derive_params(1, 2)) == Fraction(1, 2)
    assert sl_preamble_bound(derive_params(2, 5)) == Fraction(4, 9)
    assert sl_ceiling(derive_params(1, 2)) == Fraction(1, 3)
    assert sl_ceiling(derive_params(1, 3)) == Fraction(1, 4)


def test_stochastic_bounds():
    """Absolute ceiling, the p<q ceiling and the CSL floor on both sides of its threshold."""
    from utils_model import derive_params
    from utils_bounds import csl_floor, short_minority_ceiling, stochastic_ceiling

    params = derive_params(2, 5)
    assert stochastic_ceiling(params) == Fraction(4, 5)
    assert short_minority_ceiling(Fraction(1), Fraction(1, 4), params) == Fraction(1, 2)
    assert short_minority_ceiling(Fraction(1, 10), Fraction(1, 4), params) == Fraction(4, 9)

    params = derive_params(1, 2)
    assert csl_floor(Fraction(2, 5), Fraction(1, 2), params) == Fraction(1, 2)
    assert csl_floor(Fraction(6, 5), Fraction(1, 2), params) == Fraction(3, 5)
    assert csl_floor(Fraction(4), Fraction(1, 2), params) == 1


# Test for bound_target()
def test_bound_target_picks_by_run():
    """Each run kind maps to its bound; deferred feedback always targets 0."""
    from utils_model import derive_params
    from engine import RunConfig
    from utils_bounds import bound_target

    base = dict(params=derive_params(1, 2), horizon=1000, sample_every=100)
    assert bound_target(RunConfig(scheduler='sl-preamble', adversary='adv-arrival', **base)) == Fraction(1, 2)
    assert bound_target(RunConfig(scheduler='sl', adversary='sl-killer', **base)) == Fraction(1, 3)
    assert bound_target(RunConfig(scheduler='ll', adversary='ll-killer', **base)) == 0
    assert bound_target(RunConfig(scheduler='csl-preamble', adversary='stochastic', arrivals='stochastic',
                                  lam=Fraction(6, 5), p=Fraction(1, 2), **base)) == Fraction(3, 5)
    assert bound_target(RunConfig(scheduler='sl', adversary='stochastic', arrivals='stochastic',
                                  lam=Fraction(1), p=Fraction(3, 4), **base)) == 1
    deferred = RunConfig(params=derive_params(4, 4), scheduler='sl', adversary='deferred-killer', feedback='deferred',
                         horizon=1000, sample_every=100)
    assert bound_target(deferred) == 0


def test_sl_stochastic_killer_target_only_when_shorts_are_rare():
    """The SL ceiling against the stochastic killer applies when p is small against q."""
    from utils_model import derive_params
    from engine import RunConfig
    from utils_bounds import bound_target, sl_stochastic_ceiling

    params = derive_params(1, 2)
    assert sl_stochastic_ceiling(Fraction(1), Fraction(1, 2), params) is None
    rare = sl_stochastic_ceiling(Fraction(2), Fraction(1, 50), params)
    assert Fraction(2, 5) < rare < Fraction(41, 100)

    base = dict(params=params, scheduler='sl', adversary='sl-stochastic-killer', arrivals='stochastic',
                horizon=1000, sample_every=100)
    assert bound_target(RunConfig(lam=Fraction(1), p=Fraction(1, 2), **base)) is None
    assert bound_target(RunConfig(lam=Fraction(2), p=Fraction(1, 50), **base)) == rare


def test_bound_target_eta_prime_form():
    """The eta_prime form applies to stochastic runs with p < q and nothing else."""
    from utils_model import derive_params
    from engine import RunConfig
    from utils_bounds import bound_target, bound_target_eta_prime

    base = dict(params=derive_params(2, 5), adversary='stochastic', arrivals='stochastic', lam=Fraction(1),
                horizon=1000, sample_every=100)
    minority = RunConfig(scheduler='sl', p=Fraction(1, 4), **base)
    assert bound_target(minority) == Fraction(1, 2)
    assert bound_target_eta_prime(minority, Fraction(11, 10)) == Fraction(11, 20)
    assert bound_target_eta_prime(minority, None) is None
    majority = RunConfig(scheduler='sl', p=Fraction(1, 2), **base)
    assert bound_target(majority) == Fraction(4, 5)
    assert bound_target_eta_prime(majority, Fraction(11, 10)) is None
    assert bound_target_eta_prime(RunConfig(scheduler='csl-preamble', p=Fraction(1, 4), **base), Fraction(11, 10)) is None
