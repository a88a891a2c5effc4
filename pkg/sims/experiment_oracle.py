"""Part 3: Oracle - offline optimum of an instance file, and the 3-Partition reduction."""
import os
import sys
from pathlib import Path
from typing import Optional
from loguru import logger

from utils_model import derive_params
from utils_config import add_logger
from utils_instance import parse_instance, parse_partition, render_instance
from offline_solver import (
    OfflineInstance, OptResult, brute_force_opt, brute_force_schedule, exact_opt_two_lengths, reduce_3partition,
)


def read_text(path) -> str:
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path) as f:
        return f.read()


def is_two_length(instance: OfflineInstance) -> bool:
    return len({p.length for p in instance.packets}) <= 2


#>>> Forward DP for up to two lengths, brute force otherwise <<<#
def solve_instance(instance: OfflineInstance) -> OptResult:
    lengths = sorted({p.length for p in instance.packets})
    if not lengths:
        return OptResult(max_total_length=0, schedule=())
    if len(lengths) <= 2:
        return exact_opt_two_lengths(instance, derive_params(lengths[0], lengths[-1]))
    return brute_force_schedule(instance)


#>>> Report lines: total, witness, optional cross-check and decision <<<#
def oracle_report(instance: OfflineInstance, decision: Optional[int] = None, check: bool = False) -> list[str]:
    result = solve_instance(instance)
    lines = [f"opt_total={result.max_total_length}"]
    lines += [f"transmit {r.packet_id} {r.start} {r.end}" for r in result.schedule]
    if check:
        if is_two_length(instance):
            lines.append(f"exact_opt={result.max_total_length}")
        lines.append(f"brute_force={brute_force_opt(instance)}")
    if decision is not None:
        lines.append('yes' if result.max_total_length >= decision else 'no')
    return lines


def cmd_oracle(instance_path, decision: Optional[int] = None, check: bool = False) -> list[str]:
    instance = parse_instance(read_text(instance_path))
    logger.info(f"Oracle on {instance_path}: {len(instance.packets)} packets, {len(instance.error_times)} errors, "
                f"horizon {instance.horizon}")
    lines = oracle_report(instance, decision, check)
    for line in lines:
        print(line)
    return lines


#>>> 3-Partition file -> throughput instance file <<<#
def cmd_reduce(partition_path, out_path) -> OfflineInstance:
    elements, bound, sets = parse_partition(read_text(partition_path))
    instance = reduce_3partition(elements, bound, sets)
    add_logger(str(Path(out_path).parent), name='reduce')
    with open(out_path, 'w') as f:
        f.write(render_instance(instance))
    logger.info(f"Reduced {len(elements)} elements (B={bound}, m={sets}) to {out_path}; "
                f"yes-instance iff opt_total={bound * sets}")
    return instance


#>>> Main execution <<<#
def main(instance_path, decision=None):
    cmd_oracle(instance_path, None if decision is None else int(decision))


if __name__ == '__main__':
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else None)
