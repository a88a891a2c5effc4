# Configuration Loader for the lossy link experiments
# key=value experiment files, logger setup and the ExperimentSpec they produce

import os
import sys
import json
from pathlib import Path
from fractions import Fraction
from typing import Optional
from dataclasses import dataclass, asdict, field
from dotenv import dotenv_values
from loguru import logger

from utils_model import derive_params
from utils_metrics import DENOMINATOR
from utils_instance import parse_instance
from engine import RunConfig
from schedulers import POLICY
from adversaries import ADVERSARY_MAP

REQUIRED_KEYS = ('l_min', 'l_max', 'scheduler', 'adversary')
ADVERSARY_PREFIX = 'adversary.'


class ConfigError(ValueError):
    pass


#>>> Setup logger to output folder <<<#
def add_logger(folder, name='events'):
    os.makedirs(folder, exist_ok=True)
    logger.configure(handlers=[{"sink": sys.stderr, "level": "INFO"}])
    if os.path.exists(fpath := os.path.join(folder, f'{name}.log')):
        os.remove(fpath)
    logger.add(fpath, level='INFO', format='{time:YY-MM-DD HH:mm:ss} | {level} | {message}', mode='w')


#>>> Check if value is missing <<<#
def is_missing(x) -> bool:
    null_like = {"", "nan", "none", "null"}
    return x is None or (isinstance(x, str) and x.strip().lower() in null_like)


#>>> Load key=value pairs; lines without '=' are skipped <<<#
def load_env(env_file) -> dict[str, str]:
    if not os.path.exists(env_file):
        raise FileNotFoundError(f"Config file not found: {env_file}")
    return {k.strip(): v.strip() for k, v in dotenv_values(env_file).items() if v is not None}


def parse_int(value: str, key: str, minimum: int = 0) -> int:
    try:
        number = int(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    if number < minimum:
        raise ConfigError(f"{key} must be at least {minimum}, got {number}")
    return number


#>>> Exact rational from '2/5', '0.4' or '1' <<<#
def parse_fraction(value: str, key: str) -> Fraction:
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key} must be a rational number, got {value!r}") from None


def parse_seeds(value: str) -> list[int]:
    seeds = [parse_int(s, 'seeds') for s in str(value).split(',') if s.strip()]
    if not seeds:
        raise ConfigError("seeds must list at least one seed")
    return seeds


def _option(value: str):
    try:
        return int(value)
    except ValueError:
        return value


#>>> RunConfig plus output path, seeds and denominator <<<#
@dataclass
class ExperimentSpec:
    run: RunConfig
    out: str = 'output/run.csv'
    seeds: list[int] = field(default_factory=lambda: [0])
    denominator: DENOMINATOR = 'off'
    workers: int = 1
    window_fraction: Fraction = Fraction(1, 5)
    eta_prime: Optional[Fraction] = None

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("An experiment needs at least one seed")
        if self.denominator not in DENOMINATOR.__args__:
            raise ConfigError(f"denominator must be one of {DENOMINATOR.__args__}, got {self.denominator!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.eta_prime is not None and self.run.lam is not None and self.eta_prime <= self.run.lam:
            raise ConfigError(f"eta_prime must exceed lambda, got eta_prime={self.eta_prime}, lambda={self.run.lam}")

    @property
    def out_folder(self) -> str:
        return str(Path(self.out).parent)

    def to_json(self):
        data = asdict(self)
        data['run'] = json.loads(self.run.to_json())
        data['window_fraction'] = str(self.window_fraction)
        data['eta_prime'] = None if self.eta_prime is None else str(self.eta_prime)
        return json.dumps(data)

    @classmethod
    def from_json(cls, json_str: str):
        data = json.loads(json_str)
        data['run'] = RunConfig.from_json(json.dumps(data['run']))
        data['window_fraction'] = Fraction(data['window_fraction'])
        data['eta_prime'] = None if data['eta_prime'] is None else Fraction(data['eta_prime'])
        return cls(**data)


#>>> Build the ExperimentSpec from a config file and CLI overrides <<<#
def load_spec(config_path=None, **overrides) -> ExperimentSpec:
    values = load_env(config_path) if config_path else {}
    values.update({k: str(v) for k, v in overrides.items() if not is_missing(v)})
    if missing := [k for k in REQUIRED_KEYS if is_missing(values.get(k))]:
        raise ConfigError(f"Missing required config key(s): {', '.join(missing)}")
    if (scheduler := values['scheduler'].strip().lower()) not in POLICY.__args__:
        raise ConfigError(f"scheduler must be one of {POLICY.__args__}, got {scheduler!r}")
    if (adversary := values['adversary'].strip().lower()) not in ADVERSARY_MAP:
        raise ConfigError(f"adversary must be one of {list(ADVERSARY_MAP)}, got {adversary!r}")

    try:
        params = derive_params(parse_int(values['l_min'], 'l_min', 1), parse_int(values['l_max'], 'l_max', 1))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None

    instance = None
    if not is_missing(path := values.get('instance')):
        if not os.path.exists(path):
            raise ConfigError(f"Instance file not found: {path}")
        with open(path) as f:
            instance = parse_instance(f.read())

    options = {k[len(ADVERSARY_PREFIX):]: _option(v) for k, v in values.items() if k.startswith(ADVERSARY_PREFIX)}
    if unknown := sorted(set(options) - set(ADVERSARY_MAP[adversary].accepts)):
        raise ConfigError(f"adversary {adversary} does not take option(s) {unknown}")
    get = lambda key, default=None: default if is_missing(values.get(key)) else values[key]
    try:
        run = RunConfig(
            params=params,
            scheduler=scheduler,
            adversary=adversary,
            arrivals=get('arrivals', 'scripted' if instance is not None else 'adversary'),
            feedback=get('feedback', 'instantaneous'),
            horizon=parse_int(get('horizon', 10_000), 'horizon', 1),
            sample_every=parse_int(get('sample_every', 1_000), 'sample_every', 1),
            lam=None if get('lambda') is None else parse_fraction(get('lambda'), 'lambda'),
            p=None if get('p') is None else parse_fraction(get('p'), 'p'),
            instance=instance,
            max_phases=None if get('phases') is None else parse_int(get('phases'), 'phases', 1),
            adversary_options=options,
        )
        spec = ExperimentSpec(
            run=run,
            out=get('out', 'output/run.csv'),
            seeds=parse_seeds(get('seeds', '0')),
            denominator=get('denominator', 'off'),
            workers=parse_int(get('workers', 1), 'workers', 1),
            window_fraction=parse_fraction(get('window_fraction', '1/5'), 'window_fraction'),
            eta_prime=None if get('eta_prime') is None else parse_fraction(get('eta_prime'), 'eta_prime'),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None
    logger.debug(f"Loaded spec: {spec.to_json()}")
    return spec
