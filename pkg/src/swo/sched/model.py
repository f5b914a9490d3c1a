"""Parallel-line scheduling with sequence-dependent setups: data model and costs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

P_INF_DEFAULT = 1e6


class InfeasibleAdjacency(ValueError):
    """Two consecutive tasks on a line whose cable types cannot follow each other."""

    def __init__(self, line: int, pred: int, succ: int):
        super().__init__(f"infeasible setup on line {line}: task {pred} -> task {succ}")
        self.line, self.pred, self.succ = line, pred, succ


@dataclass(frozen=True)
class SchedTask:
    id: int
    cable_type: int
    release: float
    due: float
    durations: Mapping[int, float]  # line -> processing time; absent line = incompatible

    def __post_init__(self):
        if not self.durations:
            raise ValueError(f"task {self.id} has no compatible line")
        if any(d <= 0 for d in self.durations.values()):
            raise ValueError(f"task {self.id} has a non-positive duration")
        if self.release < 0 or self.due < 0:
            raise ValueError(f"task {self.id} has a negative release or due time")


@dataclass(frozen=True)
class SchedInstance:
    tasks: tuple[SchedTask, ...]
    line_count: int
    setup: tuple[tuple[Optional[float], ...], ...]  # [pred_type][succ_type], None = infeasible
    w_late: float = 1
    w_setup: float = 1
    p_inf: float = P_INF_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "setup", tuple(tuple(row) for row in self.setup))
        if self.line_count < 1:
            raise ValueError("line_count must be positive")
        if self.w_late < 0 or self.w_setup < 0 or self.p_inf < 0:
            raise ValueError("weights must be non-negative")
        n_types = len(self.setup)
        if any(len(row) != n_types for row in self.setup):
            raise ValueError("setup matrix must be square")
        if any(s is not None and s < 0 for row in self.setup for s in row):
            raise ValueError("setup times must be non-negative")
        for i, t in enumerate(self.tasks):
            if t.id != i:
                raise ValueError(f"task ids must be 0..n-1 in order; position {i} holds id {t.id}")
            if not 0 <= t.cable_type < n_types:
                raise ValueError(f"task {t.id} has unknown cable type {t.cable_type}")
            if any(not 0 <= line < self.line_count for line in t.durations):
                raise ValueError(f"task {t.id} names a line outside 0..{self.line_count - 1}")

    @property
    def n(self) -> int:
        return len(self.tasks)

    def setup_between(self, pred: int, succ: int) -> Optional[float]:
        """Setup time from task ``pred`` to task ``succ`` (None when infeasible)."""
        return self.setup[self.tasks[pred].cable_type][self.tasks[succ].cable_type]

    def compatible_lines(self, task: int) -> list[int]:
        return sorted(self.tasks[task].durations)


@dataclass(frozen=True)
class CostBreakdown:
    lateness_cost: float
    setup_cost: float
    infeasibility_penalty: float

    @property
    def total(self) -> float:
        return self.lateness_cost + self.setup_cost + self.infeasibility_penalty


@dataclass
class Schedule:
    """Per-line task orders with earliest-start times.

    ``start``/``completion`` are indexed by task id. Build one with
    :func:`make_schedule` so the timing law always holds.
    """

    lines: list[list[int]]
    start: list[float]
    completion: list[float]
    infeasible_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.infeasible_pairs

    def line_of(self) -> dict[int, int]:
        return {t: line for line, order in enumerate(self.lines) for t in order}


def earliest_start_timing(
    order: Sequence[int], line: int, instance: SchedInstance, strict: bool = True
) -> tuple[list[float], list[float]]:
    """Start and completion times for ``order`` run back to back on ``line``.

    Each task starts at the later of its release and the previous completion plus
    the setup between their types. With ``strict`` an infeasible setup raises
    :class:`InfeasibleAdjacency`; otherwise it is timed as a zero-length setup.
    """
    tasks = instance.tasks
    starts: list[float] = []
    completions: list[float] = []
    prev = None
    for t in order:
        task = tasks[t]
        if line not in task.durations:
            raise ValueError(f"task {t} is not compatible with line {line}")
        ready = task.release
        if prev is not None:
            s = instance.setup[tasks[prev].cable_type][task.cable_type]
            if s is None:
                if strict:
                    raise InfeasibleAdjacency(line, prev, t)
                s = 0
            ready = max(ready, completions[-1] + s)
        starts.append(ready)
        completions.append(ready + task.durations[line])
        prev = t
    return starts, completions


def make_schedule(lines: Sequence[Sequence[int]], instance: SchedInstance) -> Schedule:
    n = instance.n
    start = [0.0] * n
    completion = [0.0] * n
    infeasible: list[tuple[int, int]] = []
    seen = 0
    for line, order in enumerate(lines):
        s, c = earliest_start_timing(order, line, instance, strict=False)
        for t, st, ct in zip(order, s, c):
            start[t] = st
            completion[t] = ct
        for a, b in zip(order, order[1:]):
            if instance.setup_between(a, b) is None:
                infeasible.append((a, b))
        seen += len(order)
    if seen != n or len({t for order in lines for t in order}) != n:
        raise ValueError("schedule must hold every task exactly once")
    return Schedule([list(o) for o in lines], start, completion, infeasible)


def line_cost(order: Sequence[int], line: int, instance: SchedInstance) -> float:
    """Total cost contributed by one line (lateness + setups + infeasibility)."""
    _, completions = earliest_start_timing(order, line, instance, strict=False)
    tasks = instance.tasks
    late = 0.0
    for t, c in zip(order, completions):
        if c > tasks[t].due:
            late += c - tasks[t].due
    setup = 0.0
    bad = 0
    for a, b in zip(order, order[1:]):
        s = instance.setup_between(a, b)
        if s is None:
            bad += 1
        else:
            setup += s
    return instance.w_late * late + instance.w_setup * setup + instance.p_inf * bad


def schedule_cost(schedule: Schedule, instance: SchedInstance) -> CostBreakdown:
    tasks = instance.tasks
    late = 0.0
    setup = 0.0
    bad = 0
    for order in schedule.lines:
        for t in order:
            over = schedule.completion[t] - tasks[t].due
            if over > 0:
                late += over
        for a, b in zip(order, order[1:]):
            s = instance.setup_between(a, b)
            if s is None:
                bad += 1
            else:
                setup += s
    return CostBreakdown(instance.w_late * late, instance.w_setup * setup, instance.p_inf * bad)


def task_costs(schedule: Schedule, instance: SchedInstance) -> list[float]:
    """Each task's share of the schedule cost; the shares sum to the total.

    A task carries its own lateness penalty and half of every setup (or
    infeasibility penalty) it takes part in.
    """
    tasks = instance.tasks
    share = [0.0] * instance.n
    for order in schedule.lines:
        for t in order:
            over = schedule.completion[t] - tasks[t].due
            if over > 0:
                share[t] += instance.w_late * over
        for a, b in zip(order, order[1:]):
            s = instance.setup_between(a, b)
            pen = instance.p_inf if s is None else instance.w_setup * s
            share[a] += pen / 2
            share[b] += pen / 2
    return share


# --- instance / schedule files -------------------------------------------------


def instance_to_dict(instance: SchedInstance) -> dict:
    return {
        "lines": instance.line_count,
        "w_late": instance.w_late,
        "w_setup": instance.w_setup,
        "p_inf": instance.p_inf,
        "tasks": [
            {
                "id": t.id,
                "type": t.cable_type,
                "release": t.release,
                "due": t.due,
                "durations": {str(line): d for line, d in sorted(t.durations.items())},
            }
            for t in instance.tasks
        ],
        "setups": [list(row) for row in instance.setup],
    }


def instance_from_dict(data: dict) -> SchedInstance:
    try:
        tasks = sorted(
            (
                SchedTask(
                    id=int(t["id"]),
                    cable_type=int(t["type"]),
                    release=t["release"],
                    due=t["due"],
                    durations={int(k): v for k, v in t["durations"].items()},
                )
                for t in data["tasks"]
            ),
            key=lambda t: t.id,
        )
        return SchedInstance(
            tasks=tuple(tasks),
            line_count=int(data["lines"]),
            setup=tuple(tuple(row) for row in data["setups"]),
            w_late=data.get("w_late", 1),
            w_setup=data.get("w_setup", 1),
            p_inf=data.get("p_inf", P_INF_DEFAULT),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed instance file: {exc!r}") from exc


def save_instance(instance: SchedInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def load_instance(path) -> SchedInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def write_schedule_csv(schedule: Schedule, instance: SchedInstance, path) -> None:
    from ..engine import fmt_num

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line", "position", "task", "start", "completion", "late_by"])
        for line, order in enumerate(schedule.lines):
            for pos, t in enumerate(order):
                c = schedule.completion[t]
                writer.writerow(
                    [line, pos, t, fmt_num(schedule.start[t]), fmt_num(c),
                     fmt_num(max(0, c - instance.tasks[t].due))]
                )
