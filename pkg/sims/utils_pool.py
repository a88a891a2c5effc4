# Parallel Runner - seeds and sweep points across worker processes, merged in task order

import functools as ft
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor, as_completed
from loguru import logger
from tqdm import tqdm


#>>> Run worker(task) for every task; results come back in task order <<<#
def run_parallel(worker, tasks: list, max_workers: int = 1, desc: str = 'Running') -> list:
    if max_workers == 1:
        return [worker(task) for task in tqdm(tasks, total=len(tasks), desc=desc)]

    results = [None] * len(tasks)
    executor_class = ft.partial(ProcessPoolExecutor, mp_context=mp.get_context('spawn'))
    with executor_class(max_workers=max_workers) as executor:
        futures = {executor.submit(worker, task): i for i, task in enumerate(tasks)}
        for future in tqdm(as_completed(futures), total=len(futures), desc=desc):
            index = futures[future]
            try:
                results[index] = future.result()
            except Exception as e:
                logger.error(f"Task {index} failed: {e}")
                raise
    return results
