"""The three-task, one-line walkthrough problem.

Tasks run in sequence order at the earliest possible time; the objective is
the number of late tasks and each late task is blamed one point per unit of
lateness.
"""

from __future__ import annotations

import random
from typing import Sequence

from .model import SchedInstance, SchedTask, Schedule, earliest_start_timing, make_schedule

TOY_NAMES = ("A", "B", "C")


def toy_instance() -> SchedInstance:
    """A: 10 long, due 20; B: 30 long, due 40; C: 30 long, due 60. All released at 0."""
    spec = [(10, 20), (30, 40), (30, 60)]
    tasks = tuple(
        SchedTask(id=i, cable_type=0, release=0, due=due, durations={0: dur})
        for i, (dur, due) in enumerate(spec)
    )
    return SchedInstance(tasks=tasks, line_count=1, setup=((0,),))


def toy_ids(names: str) -> list[int]:
    return [TOY_NAMES.index(c) for c in names]


class WalkthroughDomain:
    """Single-line, append-only construction scored by late-task count."""

    def __init__(self, instance: SchedInstance | None = None):
        self.instance = instance or toy_instance()
        if self.instance.line_count != 1:
            raise ValueError("the walkthrough domain schedules a single line")

    def element_count(self) -> int:
        return self.instance.n

    def initial_sequence(self, rng: random.Random) -> list[int]:
        return list(range(self.instance.n))

    def construct(self, sequence: Sequence[int], rng: random.Random) -> Schedule:
        earliest_start_timing(sequence, 0, self.instance)
        return make_schedule([list(sequence)], self.instance)

    def lateness(self, schedule: Schedule) -> list[float]:
        return [max(0, schedule.completion[t.id] - t.due) for t in self.instance.tasks]

    def score(self, schedule: Schedule) -> float:
        return sum(1 for x in self.lateness(schedule) if x > 0)

    def analyze(self, schedule: Schedule) -> list[float]:
        return self.lateness(schedule)
