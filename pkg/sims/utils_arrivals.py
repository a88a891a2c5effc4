"""Arrival sources: seeded Poisson arrivals with a two-point length distribution."""
import json
from fractions import Fraction
from dataclasses import dataclass, asdict
import numpy as np
from loguru import logger

from utils_model import InstanceParams, Packet

BATCH = 4096


@dataclass(frozen=True)
class StochasticArrivalConfig:
    lam: Fraction
    p: Fraction
    seed: int
    horizon: int

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"Arrival rate must be positive, got lambda={self.lam}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got p={self.p}")
        if self.horizon <= 0:
            raise ValueError(f"Horizon must be positive, got {self.horizon}")

    @property
    def q(self) -> Fraction:
        return 1 - Fraction(self.p)

    def to_json(self):
        data = asdict(self)
        data.update(lam=str(self.lam), p=str(self.p))
        return json.dumps(data)

    @classmethod
    def from_json(cls, json_str: str):
        data = json.loads(json_str)
        return cls(lam=Fraction(data['lam']), p=Fraction(data['p']), seed=data['seed'], horizon=data['horizon'])


#>>> Poisson arrivals floored to integer ticks <<<#
def generate_poisson_arrivals(config: StochasticArrivalConfig, params: InstanceParams, first_id: int = 0) -> list[Packet]:
    rng = np.random.default_rng(config.seed)
    scale = 1.0 / float(config.lam)

    # Continuous arrival instants, drawn in batches until the horizon is passed
    chunks, clock = [], 0.0
    while clock <= config.horizon:
        instants = clock + np.cumsum(rng.exponential(scale, size=BATCH))
        chunks.append(instants)
        clock = float(instants[-1])
    instants = np.concatenate(chunks)
    instants = instants[instants <= config.horizon]

    short = rng.random(len(instants)) < float(config.p)
    ticks = np.floor(instants).astype(np.int64)
    return [Packet(id=first_id + i, length=params.l_min if is_short else params.l_max, arrival_time=int(t))
            for i, (t, is_short) in enumerate(zip(ticks, short))]


@dataclass(frozen=True)
class TailReport:
    t: int
    trials: int
    freq_below_lower: float
    freq_above_upper: float


#>>> Empirical tails of the short-packet count around t*eta*p and t*eta_prime*p <<<#
def empirical_tail_check(config: StochasticArrivalConfig, params: InstanceParams,
                         eta: Fraction, eta_prime: Fraction, t: int, trials: int) -> TailReport:
    if not 0 < eta < config.lam:
        raise ValueError(f"eta must lie in (0, lambda), got eta={eta}, lambda={config.lam}")
    if eta_prime <= config.lam:
        raise ValueError(f"eta_prime must exceed lambda, got eta_prime={eta_prime}, lambda={config.lam}")
    if t < params.l_min:
        raise ValueError(f"t must be at least l_min={params.l_min}, got {t}")
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")

    lower, upper = t * eta * config.p, t * eta_prime * config.p
    below = above = 0
    for trial in range(trials):
        run = StochasticArrivalConfig(lam=config.lam, p=config.p, seed=config.seed + trial, horizon=t)
        count = sum(1 for pkt in generate_poisson_arrivals(run, params) if pkt.length == params.l_min)
        below += count < lower
        above += count > upper

    report = TailReport(t=t, trials=trials, freq_below_lower=below / trials, freq_above_upper=above / trials)
    logger.info(f"Tail check t={t}: below={report.freq_below_lower:.3f}, above={report.freq_above_upper:.3f}")
    return report
