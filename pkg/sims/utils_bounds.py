# Bounds - exact relative-throughput bounds and decimal rendering

import math
from fractions import Fraction
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from typing import Optional

from utils_model import InstanceParams

DIGITS = 12


#>>> Exact rational -> decimal string, 12 significant digits, half-even <<<#
def render_decimal(value: Fraction, digits: int = DIGITS) -> str:
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        return format(Decimal(value.numerator) / Decimal(value.denominator), 'f')


def short_load(lam: Fraction, p: Fraction, params: InstanceParams) -> Fraction:
    return Fraction(lam) * Fraction(p) * params.l_min


def sl_preamble_bound(params: InstanceParams) -> Fraction:
    return Fraction(params.gamma_bar) / (params.rho + params.gamma_bar)


def sl_ceiling(params: InstanceParams, eps: Fraction = Fraction(0)) -> Fraction:
    return 1 / ((1 - eps) * params.rho + 1) + eps


def stochastic_ceiling(params: InstanceParams) -> Fraction:
    return Fraction(params.gamma_bar) / params.rho


#>>> Ceiling for p < q; `rate` is lambda for the displayed form, eta_prime for the proof form <<<#
def short_minority_ceiling(rate: Fraction, p: Fraction, params: InstanceParams) -> Fraction:
    return min(max(short_load(rate, p, params), sl_preamble_bound(params)), stochastic_ceiling(params))


#>>> SL against the stochastic SL killer; None when the ceiling is 1 or more (p not small against q) <<<#
def sl_stochastic_ceiling(lam: Fraction, p: Fraction, params: InstanceParams) -> Optional[Fraction]:
    # share of intervals in which OFF holds a long, exp taken at float precision
    long_share = 1 - Fraction(math.exp(-float(Fraction(lam) * (1 - Fraction(p)) * params.l_min)))
    ceiling = 1 / (long_share * params.rho + 1) + short_load(lam, p, params)
    return ceiling if ceiling < 1 else None


def csl_floor(lam: Fraction, p: Fraction, params: InstanceParams) -> Fraction:
    if short_load(lam, p, params) <= Fraction(params.gamma_bar) / (2 * params.rho):
        return sl_preamble_bound(params)
    return min(short_load(lam, p, params), stochastic_ceiling(params))


#>>> The bound a run is expected to meet, or None when no bound applies <<<#
def bound_target(config) -> Optional[Fraction]:
    params = config.params
    if config.feedback == 'deferred' or config.adversary in ('ll-killer', 'deferred-killer'):
        return Fraction(0)
    match config.adversary:
        case 'adv-arrival':
            return sl_preamble_bound(params)
        case 'sl-killer':
            return sl_ceiling(params)
        case 'sl-stochastic-killer':
            return sl_stochastic_ceiling(config.lam, config.p, params)
        case 'stochastic' if config.scheduler == 'csl-preamble':
            return csl_floor(config.lam, config.p, params)
        case 'stochastic' if Fraction(config.p) < Fraction(1, 2):
            return short_minority_ceiling(config.lam, config.p, params)
        case 'stochastic':
            return stochastic_ceiling(params)
        case 'scripted' if params.l_min == params.l_max:
            return Fraction(1)
    return None


#>>> Same p<q ceiling with eta_prime in place of lambda; None for other runs <<<#
def bound_target_eta_prime(config, eta_prime: Optional[Fraction]) -> Optional[Fraction]:
    if eta_prime is None or config.adversary != 'stochastic' or config.scheduler == 'csl-preamble':
        return None
    if config.feedback == 'deferred' or Fraction(config.p) >= Fraction(1, 2):
        return None
    return short_minority_ceiling(eta_prime, config.p, config.params)
