"""Part 2: Sweep - one summary row per (axis value, seed) against the matching bound."""
import sys
from dataclasses import replace
import pandas as pd
from loguru import logger

from utils_model import derive_params
from utils_config import ConfigError, ExperimentSpec, add_logger, load_spec, parse_fraction, parse_int
from utils_bounds import bound_target, bound_target_eta_prime, render_decimal
from utils_metrics import long_run_estimate, relative_throughput
from utils_pool import run_parallel
from engine import RunConfig, run

SWEEP_AXES = ('rho', 'lambda', 'p')
COLUMNS = ['axis', 'value', 'seed', 'final_ratio', 'converged', 'bound_target', 'policy', 'bound_target_eta_prime']


#>>> Base run with one axis moved; rho moves through l_max <<<#
def sweep_point(base: RunConfig, axis: str, value: str) -> RunConfig:
    match axis:
        case 'rho':
            return replace(base, params=derive_params(base.params.l_min, parse_int(value, 'rho (l_max)', 1)))
        case 'lambda':
            return replace(base, lam=parse_fraction(value, 'lambda'))
        case 'p':
            return replace(base, p=parse_fraction(value, 'p'))
    raise ConfigError(f"Sweep axis must be one of {SWEEP_AXES}, got {axis!r}")


#>>> Run one sweep point for one seed (worker function) <<<#
def sweep_task(args) -> dict:
    spec, axis, value, seed = args
    config = sweep_point(spec.run, axis, value).with_seed(seed)
    trace = run(config)
    estimate = long_run_estimate(relative_throughput(trace, spec.denominator, config.sample_every), spec.window_fraction)
    target, target_eta_prime = bound_target(config), bound_target_eta_prime(config, spec.eta_prime)
    return {
        'axis': axis,
        'value': value,
        'seed': seed,
        'final_ratio': render_decimal(estimate.estimate),
        'converged': estimate.converged,
        'bound_target': '' if target is None else render_decimal(target),
        'policy': trace.policy,
        'bound_target_eta_prime': '' if target_eta_prime is None else render_decimal(target_eta_prime),
    }


def cmd_sweep(spec: ExperimentSpec, axis: str, values: list[str]) -> pd.DataFrame:
    if axis not in SWEEP_AXES:
        raise ConfigError(f"Sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise ConfigError("A sweep needs at least one axis value")
    for value in values:
        sweep_point(spec.run, axis, value)

    add_logger(spec.out_folder, name='sweep')
    logger.info(f"Starting sweep over {axis}={values}, seeds={spec.seeds} (workers={spec.workers})")
    # rows come out ordered by (axis value, seed)
    ordered = sorted(values, key=lambda value: parse_fraction(value, axis))
    tasks = [(spec, axis, value, seed) for value in ordered for seed in sorted(spec.seeds)]
    frame = pd.DataFrame(run_parallel(sweep_task, tasks, spec.workers, desc='Sweep points'), columns=COLUMNS)
    frame.to_csv(spec.out, index=False)
    logger.info(f"Wrote {len(frame)} sweep rows to {spec.out}")
    return frame


#>>> Main execution <<<#
def main(config_path, axis, values, max_workers=1):
    cmd_sweep(load_spec(config_path, workers=max_workers), axis, values.split(','))


if __name__ == '__main__':
    workers = int(sys.argv[4]) if len(sys.argv) > 4 else 1
    main(sys.argv[1], sys.argv[2], sys.argv[3], workers)
