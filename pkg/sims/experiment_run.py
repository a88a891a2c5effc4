"""Part 1: Run - simulate one configuration per seed and write the relative-throughput series."""
import sys
from pathlib import Path
import pandas as pd
from loguru import logger

from utils_config import ExperimentSpec, add_logger, load_spec
from utils_bounds import render_decimal
from utils_metrics import ThroughputSeries, mean_ratio_series, relative_throughput
from utils_pool import run_parallel
from engine import run

COLUMNS = ['t', 'L_alg', 'L_ref', 'ratio', 'seed']


#>>> Simulate and sample a single seed (worker function) <<<#
def run_seed(args) -> ThroughputSeries:
    spec, seed = args
    config = spec.run.with_seed(seed)
    return relative_throughput(run(config), spec.denominator, config.sample_every)


def mean_path(out: str) -> str:
    path = Path(out)
    return str(path.with_name(f"{path.stem}_mean{path.suffix or '.csv'}"))


#>>> Write one row per sample per seed, plus the across-seed mean for stochastic runs <<<#
def cmd_run(spec: ExperimentSpec) -> pd.DataFrame:
    add_logger(spec.out_folder, name=Path(spec.out).stem)
    logger.info(f"Starting run: {spec.run.scheduler} vs {spec.run.adversary}, seeds={spec.seeds}, "
                f"denominator={spec.denominator} (workers={spec.workers})")

    series_list = run_parallel(run_seed, [(spec, seed) for seed in spec.seeds], spec.workers, desc='Seeds')
    frame = pd.concat([s.to_frame(seed) for s, seed in zip(series_list, spec.seeds)], ignore_index=True)[COLUMNS]
    frame.to_csv(spec.out, index=False)
    logger.info(f"Wrote {len(frame)} rows to {spec.out}")

    if spec.run.arrivals == 'stochastic':
        mean = pd.DataFrame([(t, render_decimal(r)) for t, r in mean_ratio_series(series_list)], columns=['t', 'mean_ratio'])
        mean.to_csv(mean_path(spec.out), index=False)
        logger.info(f"Across-seed mean ratio at t={mean['t'].iloc[-1]}: {mean['mean_ratio'].iloc[-1]}")
    return frame


#>>> Main execution <<<#
def main(config_path, max_workers=1):
    cmd_run(load_spec(config_path, workers=max_workers))


if __name__ == '__main__':
    workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1
    main(sys.argv[1], workers)
