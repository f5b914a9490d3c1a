from .generate import GeneratorParams, generate_instance
from .model import (
    CostBreakdown,
    InfeasibleAdjacency,
    SchedInstance,
    SchedTask,
    Schedule,
    earliest_start_timing,
    instance_from_dict,
    instance_to_dict,
    line_cost,
    load_instance,
    make_schedule,
    save_instance,
    schedule_cost,
    task_costs,
    write_schedule_csv,
)
from .solver import (
    LineState,
    SchedDomain,
    analyze_schedule,
    construct_schedule,
    improve_line,
    initial_sequence_sched,
    min_possible_cost,
)
from .toy import WalkthroughDomain, toy_ids, toy_instance

__all__ = [
    "CostBreakdown",
    "GeneratorParams",
    "InfeasibleAdjacency",
    "LineState",
    "SchedDomain",
    "SchedInstance",
    "SchedTask",
    "Schedule",
    "WalkthroughDomain",
    "analyze_schedule",
    "construct_schedule",
    "earliest_start_timing",
    "generate_instance",
    "instance_from_dict",
    "instance_to_dict",
    "improve_line",
    "initial_sequence_sched",
    "line_cost",
    "load_instance",
    "make_schedule",
    "min_possible_cost",
    "save_instance",
    "schedule_cost",
    "task_costs",
    "toy_ids",
    "toy_instance",
    "write_schedule_csv",
]
