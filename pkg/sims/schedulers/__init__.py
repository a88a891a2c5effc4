# Schedulers Package
from .schedulers import (
    POLICY, Scheduler, SchedulerState, SchedulerDecision,
    sl_choose, ll_choose, sl_preamble_choose, csl_select_policy,
)

__all__ = [
    'POLICY', 'Scheduler', 'SchedulerState', 'SchedulerDecision',
    'sl_choose', 'll_choose', 'sl_preamble_choose', 'csl_select_policy',
]
