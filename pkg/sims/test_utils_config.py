"""Tests for utils_config (experiment files and logger setup)."""
import os
import tempfile
import pytest
from fractions import Fraction


def write_config(folder, text, name='experiment.cfg'):
    path = os.path.join(folder, name)
    with open(path, 'w') as f:
        f.write(text)
    return path


BASE = """
# adversarial arrivals at (1,2)
l_min=1
l_max=2
scheduler=SL-Preamble
adversary=adv-arrival
horizon=1000
sample_every=100
seeds=0,1
"""


# Test for load_spec()
def test_load_spec_reads_keys():
    """Names are normalised and numeric keys parsed."""
    from utils_config import load_spec

    with tempfile.TemporaryDirectory() as tmp:
        spec = load_spec(write_config(tmp, BASE))
    assert spec.run.scheduler == 'sl-preamble'
    assert spec.run.adversary == 'adv-arrival'
    assert spec.run.params.rho == 2
    assert (spec.run.horizon, spec.run.sample_every) == (1000, 100)
    assert spec.seeds == [0, 1]
    assert spec.denominator == 'off'
    assert spec.run.arrivals == 'adversary'


def test_load_spec_overrides_win():
    """CLI overrides replace file values; None overrides are ignored."""
    from utils_config import load_spec

    with tempfile.TemporaryDirectory() as tmp:
        spec = load_spec(write_config(tmp, BASE), horizon=500, seeds='4', denominator='opt', workers=None)
    assert spec.run.horizon == 500
    assert spec.seeds == [4]
    assert spec.denominator == 'opt'
    assert spec.workers == 1


def test_load_spec_exact_rationals():
    """lambda and p are read as exact fractions from either notation."""
    from utils_config import load_spec

    text = "l_min=1\nl_max=2\nscheduler=csl-preamble\nadversary=stochastic\narrivals=stochastic\nlambda=2/5\np=0.5\neta_prime=3/5\n"
    with tempfile.TemporaryDirectory() as tmp:
        spec = load_spec(write_config(tmp, text))
    assert spec.run.lam == Fraction(2, 5)
    assert spec.run.p == Fraction(1, 2)
    assert spec.eta_prime == Fraction(3, 5)


def test_load_spec_instance_and_adversary_options():
    """An instance file switches arrivals to scripted; adversary.* keys the adversary does not read are refused."""
    from utils_config import ConfigError, load_spec

    with tempfile.TemporaryDirectory() as tmp:
        instance = write_config(tmp, "arrival 0 3\nerror 4\nhorizon 30\n", name='case.txt')
        text = f"l_min=3\nl_max=3\nscheduler=sl\nadversary=scripted\ninstance={instance}\nhorizon=30\nsample_every=10\n"
        spec = load_spec(write_config(tmp, text))
        with pytest.raises(ConfigError, match="label"):
            load_spec(write_config(tmp, text + "adversary.label=demo\n"))
    assert spec.run.arrivals == 'scripted'
    assert len(spec.run.instance.packets) == 1
    assert spec.run.adversary_options == {}


@pytest.mark.parametrize('text', [
    "l_min=1\nl_max=2\nadversary=adv-arrival\n",
    "l_min=1\nl_max=2\nscheduler=fifo\nadversary=adv-arrival\n",
    "l_min=1\nl_max=2\nscheduler=sl\nadversary=adv-arrival\nhorizon=ten\n",
    "l_min=3\nl_max=2\nscheduler=sl\nadversary=adv-arrival\n",
    "l_min=1\nl_max=2\nscheduler=sl\nadversary=adv-arrival\ndenominator=best\n",
    "l_min=1\nl_max=2\nscheduler=sl\nadversary=stochastic\narrivals=stochastic\nlambda=1/0\np=1/2\n",
    "l_min=1\nl_max=2\nscheduler=sl\nadversary=stochastic\narrivals=stochastic\nlambda=1\np=1/4\neta_prime=1/2\n",
])
def test_load_spec_rejects_bad_config(text):
    """Missing keys, unknown names and malformed values raise ConfigError."""
    from utils_config import ConfigError, load_spec

    with tempfile.TemporaryDirectory() as tmp:
        with pytest.raises(ConfigError):
            load_spec(write_config(tmp, text))


def test_load_spec_missing_file():
    """A missing config file is reported as such."""
    from utils_config import load_spec

    with pytest.raises(FileNotFoundError):
        load_spec('/nonexistent/experiment.cfg')


# Test for ExperimentSpec
def test_experiment_spec_json():
    """Specs survive a JSON round trip."""
    from utils_config import ExperimentSpec, load_spec

    with tempfile.TemporaryDirectory() as tmp:
        spec = load_spec(write_config(tmp, BASE), out=os.path.join(tmp, 'out', 'run.csv'))
    assert ExperimentSpec.from_json(spec.to_json()) == spec
    assert spec.out_folder.endswith('out')


# Test for is_missing()
@pytest.mark.parametrize('value, expected', [(None, True), ('', True), (' NaN ', True), ('null', True), ('0', False), (0, False)])
def test_is_missing(value, expected):
    """Null-like strings count as missing."""
    from utils_config import is_missing

    assert is_missing(value) is expected


# Test for add_logger()
def test_add_logger_creates_log_file():
    """The log file sits in the output folder, replacing a stale one."""
    from loguru import logger
    from utils_config import add_logger

    with tempfile.TemporaryDirectory() as tmp:
        folder = os.path.join(tmp, 'logs')
        add_logger(folder, name='events')
        logger.info("first")
        assert os.path.exists(os.path.join(folder, 'events.log'))
        logger.remove()
