"""Command-line front end for the lossy link simulator: run | sweep | oracle | reduce | tails."""
import sys
import argparse
from pathlib import Path
from loguru import logger

sys.path.insert(0, str(Path(__file__).parent / 'sims'))

from utils_model import ContractViolation
from utils_config import load_spec, parse_fraction, parse_int
from experiment_run import cmd_run
from experiment_sweep import SWEEP_AXES, cmd_sweep
from experiment_oracle import cmd_oracle, cmd_reduce
from experiment_tails import cmd_tails

EXIT_INPUT = 2
EXIT_CONTRACT = 3


def add_experiment_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--config', required=True, help='key=value experiment file')
    parser.add_argument('--out', help='output CSV; defaults to the config out key')
    parser.add_argument('--seeds', help='comma-separated seeds, e.g. 0,1,2')
    parser.add_argument('--horizon')
    parser.add_argument('--sample-every', dest='sample_every')
    parser.add_argument('--denominator', choices=['opt', 'off'])
    parser.add_argument('--workers')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='lossy-link-sim', description=__doc__)
    sub = parser.add_subparsers(dest='command', required=True)

    add_experiment_flags(sub.add_parser('run', help='simulate one configuration per seed'))

    sweep = sub.add_parser('sweep', help='one summary row per axis value and seed')
    add_experiment_flags(sweep)
    sweep.add_argument('--axis', required=True, choices=SWEEP_AXES)
    sweep.add_argument('--values', required=True, help='comma-separated axis values')

    oracle = sub.add_parser('oracle', help='offline optimum of an instance file')
    oracle.add_argument('instance')
    oracle.add_argument('--decision', type=int, help='print yes/no for opt_total >= T')
    oracle.add_argument('--check', action='store_true', help='cross-check against brute force')

    reduce = sub.add_parser('reduce', help='3-Partition file -> instance file')
    reduce.add_argument('partition')
    reduce.add_argument('--out', default='output/reduced.txt')

    tails = sub.add_parser('tails', help='empirical tails of the short-packet count')
    tails.add_argument('--lambda', dest='lam', default='1')
    tails.add_argument('--p', default='1/2')
    tails.add_argument('--eta', default='1/2')
    tails.add_argument('--eta-prime', dest='eta_prime', default='2')
    tails.add_argument('--times', default='1000,10000')
    tails.add_argument('--trials', default='200')
    tails.add_argument('--seed', default='0')
    tails.add_argument('--l-min', dest='l_min', default='1')
    tails.add_argument('--l-max', dest='l_max', default='2')
    tails.add_argument('--workers', default='1')
    tails.add_argument('--out', default='output/tails.csv')
    return parser


def overrides(args) -> dict:
    return {key: getattr(args, key) for key in ('out', 'seeds', 'horizon', 'sample_every', 'denominator', 'workers')}


def dispatch(args):
    match args.command:
        case 'run':
            cmd_run(load_spec(args.config, **overrides(args)))
        case 'sweep':
            values = [v.strip() for v in args.values.split(',') if v.strip()]
            cmd_sweep(load_spec(args.config, **overrides(args)), args.axis, values)
        case 'oracle':
            cmd_oracle(args.instance, args.decision, args.check)
        case 'reduce':
            cmd_reduce(args.partition, args.out)
        case 'tails':
            cmd_tails(parse_fraction(args.lam, 'lambda'), parse_fraction(args.p, 'p'),
                      parse_fraction(args.eta, 'eta'), parse_fraction(args.eta_prime, 'eta_prime'),
                      [parse_int(t, 'times', 1) for t in args.times.split(',') if t.strip()],
                      parse_int(args.trials, 'trials', 1), args.out, seed=parse_int(args.seed, 'seed'),
                      l_min=parse_int(args.l_min, 'l_min', 1), l_max=parse_int(args.l_max, 'l_max', 1),
                      workers=parse_int(args.workers, 'workers', 1))


#>>> Main execution <<<#
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dispatch(args)
    except ContractViolation as e:
        logger.error(f"Contract violation: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == '__main__':
    sys.exit(main())
