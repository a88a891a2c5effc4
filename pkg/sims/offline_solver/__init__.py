# Offline Solver Package
from .offline_solver import (
    OfflineInstance, OptResult, OversizeInstanceError, TwoLengthSolver,
    brute_force_opt, brute_force_schedule, exact_opt_two_lengths, link_windows, opt_values_at, pareto,
    reduce_3partition,
)

__all__ = [
    'OfflineInstance', 'OptResult', 'OversizeInstanceError', 'TwoLengthSolver',
    'brute_force_opt', 'brute_force_schedule', 'exact_opt_two_lengths', 'link_windows', 'opt_values_at', 'pareto',
    'reduce_3partition',
]
