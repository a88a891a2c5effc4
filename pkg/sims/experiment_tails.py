"""Part 4: Tails - empirical tail frequencies of the short-packet arrival count."""
import sys
from fractions import Fraction
from pathlib import Path
import pandas as pd
from loguru import logger

from utils_model import derive_params
from utils_arrivals import StochasticArrivalConfig, empirical_tail_check
from utils_config import add_logger
from utils_pool import run_parallel

COLUMNS = ['t', 'freq_below_lower', 'freq_above_upper']


def tail_task(args) -> dict:
    config, params, eta, eta_prime, t, trials = args
    report = empirical_tail_check(config, params, eta, eta_prime, t, trials)
    return {'t': report.t, 'freq_below_lower': report.freq_below_lower, 'freq_above_upper': report.freq_above_upper}


#>>> One row per horizon t <<<#
def cmd_tails(lam: Fraction, p: Fraction, eta: Fraction, eta_prime: Fraction, times: list[int], trials: int,
              out: str, seed: int = 0, l_min: int = 1, l_max: int = 2, workers: int = 1) -> pd.DataFrame:
    params = derive_params(l_min, l_max)
    if not times:
        raise ValueError("tails needs at least one horizon t")
    add_logger(str(Path(out).parent), name='tails')
    logger.info(f"Tail check lambda={lam}, p={p}, eta={eta}, eta_prime={eta_prime}, times={times}, trials={trials}")

    tasks = [(StochasticArrivalConfig(lam=lam, p=p, seed=seed, horizon=t), params, eta, eta_prime, t, trials)
             for t in times]
    frame = pd.DataFrame(run_parallel(tail_task, tasks, workers, desc='Tail horizons'), columns=COLUMNS)
    frame.to_csv(out, index=False)
    logger.info(f"Wrote {len(frame)} tail rows to {out}")
    return frame


#>>> Main execution <<<#
def main(out='output/tails.csv'):
    cmd_tails(Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(2), [1_000, 10_000], 200, out)


if __name__ == '__main__':
    main(*sys.argv[1:2])
