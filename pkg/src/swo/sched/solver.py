"""Greedy insertion constructor, excess-cost analyzer and the scheduling domain."""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from .. import engine
from .model import (
    SchedInstance,
    Schedule,
    earliest_start_timing,
    line_cost,
    make_schedule,
    schedule_cost,
    task_costs,
)

INNER_ITERS_DEFAULT = 10


class LineState:
    """One line's order with cached earliest-start times, for fast insertion deltas."""

    __slots__ = ("line", "inst", "order", "starts", "comps")

    def __init__(self, line: int, inst: SchedInstance, order: Sequence[int] = ()):
        self.line = line
        self.inst = inst
        self.order = list(order)
        self.starts: list[float] = []
        self.comps: list[float] = []
        self._retime(0)

    def _retime(self, frm: int) -> None:
        tasks, setup, line = self.inst.tasks, self.inst.setup, self.line
        del self.starts[frm:], self.comps[frm:]
        for j in range(frm, len(self.order)):
            task = tasks[self.order[j]]
            ready = task.release
            if j > 0:
                s = setup[tasks[self.order[j - 1]].cable_type][task.cable_type]
                ready = max(ready, self.comps[j - 1] + (s or 0))
            self.starts.append(ready)
            self.comps.append(ready + task.durations[line])

    def insert(self, task: int, pos: int) -> None:
        self.order.insert(pos, task)
        self._retime(pos)

    def deltas(self, t: int) -> list[tuple[float, bool]]:
        """Cost change and "creates an infeasible adjacency" for every insertion point.

        Entry ``p`` describes inserting ``t`` before ``order[p]`` (``p == len`` is the
        end). Only the suffix whose timing actually moves is re-evaluated.
        """
        inst = self.inst
        tasks, setup = inst.tasks, inst.setup
        w_late, w_setup, p_inf = inst.w_late, inst.w_setup, inst.p_inf
        order, starts, comps = self.order, self.starts, self.comps
        task = tasks[t]
        rel_t, due_t, typ_t = task.release, task.due, task.cable_type
        line = self.line
        dur_t = task.durations[line]
        m = len(order)
        out = []
        for p in range(m + 1):
            delta = 0.0
            bad = False
            start = rel_t
            if p > 0:
                typ_a = tasks[order[p - 1]].cable_type
                s = setup[typ_a][typ_t]
                if s is None:
                    bad = True
                    delta += p_inf
                    s = 0
                else:
                    delta += w_setup * s
                ready = comps[p - 1] + s
                start = ready if ready > rel_t else rel_t
            comp = start + dur_t
            if comp > due_t:
                delta += w_late * (comp - due_t)
            if p < m:
                typ_b = tasks[order[p]].cable_type
                s = setup[typ_t][typ_b]
                if s is None:
                    bad = True
                    delta += p_inf
                else:
                    delta += w_setup * s
                if p > 0:
                    old = setup[typ_a][typ_b]
                    delta -= p_inf if old is None else w_setup * old
                prev_c, prev_typ = comp, typ_t
                for j in range(p, m):
                    u = tasks[order[j]]
                    s = setup[prev_typ][u.cable_type]
                    ns = prev_c + (s or 0)
                    if ns < u.release:
                        ns = u.release
                    if ns == starts[j]:
                        break
                    nc = ns + u.durations[line]
                    due = u.due
                    if nc > due:
                        oc = comps[j]
                        delta += w_late * (nc - (oc if oc > due else due))
                    elif comps[j] > due:
                        delta -= w_late * (comps[j] - due)
                    prev_c, prev_typ = nc, u.cable_type
            out.append((delta, bad))
        return out


def _place(t: int, states: Sequence[LineState], rng: random.Random) -> None:
    """Insert ``t`` at its cheapest feasible point across ``states``; ties at random."""
    best = math.inf
    cands: list[tuple[LineState, int]] = []
    fb_best = math.inf
    fallback: list[tuple[LineState, int]] = []
    for st in states:
        ds = st.deltas(t)
        for p, (delta, bad) in enumerate(ds):
            if not bad:
                if delta < best:
                    best, cands = delta, [(st, p)]
                elif delta == best:
                    cands.append((st, p))
        end_delta = ds[-1][0]
        if end_delta < fb_best:
            fb_best, fallback = end_delta, [(st, len(ds) - 1)]
        elif end_delta == fb_best:
            fallback.append((st, len(ds) - 1))
    pool = cands or fallback
    st, p = pool[0] if len(pool) == 1 else rng.choice(pool)
    st.insert(t, p)


def construct_schedule(
    sequence: Sequence[int],
    instance: SchedInstance,
    rng: random.Random,
    inner_iters: int = INNER_ITERS_DEFAULT,
    floors: Optional[Sequence[float]] = None,
) -> Schedule:
    """Insert tasks one at a time in ``sequence`` order, then polish each line.

    Every task goes to the line/position with the smallest increase in total
    cost; relative order of already placed tasks is never changed. With
    ``inner_iters > 0`` each line is then re-sequenced by a small nested run
    over that line's tasks, and the better of the two line orders is kept.
    """
    states = [LineState(line, instance) for line in range(instance.line_count)]
    tasks = instance.tasks
    for t in sequence:
        _place(t, [states[line] for line in sorted(tasks[t].durations)], rng)
    lines = [st.order for st in states]
    if inner_iters > 0:
        if floors is None:
            floors = [min_possible_cost(t, instance) for t in range(instance.n)]
        lines = [
            improve_line(order, line, instance, rng, inner_iters, floors) if len(order) > 1 else order
            for line, order in enumerate(lines)
        ]
    return make_schedule(lines, instance)


class LineDomain:
    """One line's tasks as a standalone problem for the nested per-line search."""

    def __init__(self, order: Sequence[int], line: int, instance: SchedInstance, floors: Sequence[float]):
        self.tasks = list(order)
        self.line = line
        self.instance = instance
        self.floors = floors

    def element_count(self) -> int:
        return len(self.tasks)

    def initial_sequence(self, rng: random.Random) -> list[int]:
        return list(range(len(self.tasks)))

    def construct(self, sequence: Sequence[int], rng: random.Random) -> list[int]:
        st = LineState(self.line, self.instance)
        for i in sequence:
            _place(self.tasks[i], [st], rng)
        return st.order

    def score(self, order: Sequence[int]) -> float:
        return line_cost(order, self.line, self.instance)

    def analyze(self, order: Sequence[int]) -> list[float]:
        share = _line_shares(order, self.line, self.instance)
        pos = {t: i for i, t in enumerate(self.tasks)}
        blame = [0.0] * len(self.tasks)
        for t, c in share.items():
            blame[pos[t]] = max(0.0, c - self.floors[t])
        return blame


def _line_shares(order: Sequence[int], line: int, instance: SchedInstance) -> dict[int, float]:
    _, comps = earliest_start_timing(order, line, instance, strict=False)
    tasks = instance.tasks
    share = {t: instance.w_late * max(0.0, c - tasks[t].due) for t, c in zip(order, comps)}
    for a, b in zip(order, order[1:]):
        s = instance.setup_between(a, b)
        pen = instance.p_inf if s is None else instance.w_setup * s
        share[a] += pen / 2
        share[b] += pen / 2
    return share


def improve_line(
    order: Sequence[int],
    line: int,
    instance: SchedInstance,
    rng: random.Random,
    iterations: int,
    floors: Sequence[float],
) -> list[int]:
    """Re-sequence one line with a nested blame-sort run; never returns a worse order."""
    dom = LineDomain(order, line, instance, floors)
    cfg = engine.EngineConfig(
        max_iterations=iterations,
        restart_cutoff=0,
        prioritizer="blame_sort",
        noise=0.0,
        seed=rng.getrandbits(64),
    )
    res = engine.run(dom, cfg)
    if res.best_score < line_cost(order, line, instance):
        return list(res.best_solution)
    return list(order)


def min_possible_cost(task: int, instance: SchedInstance) -> float:
    """Lower bound on a task's cost share in any schedule.

    Only forced lateness counts: the task may always sit alone at either end of
    a line, so no setup is unavoidable.
    """
    t = instance.tasks[task]
    earliest = min(t.release + d for d in t.durations.values())
    return instance.w_late * max(0.0, earliest - t.due)


def analyze_schedule(
    schedule: Schedule, instance: SchedInstance, floors: Optional[Sequence[float]] = None
) -> list[float]:
    """Excess cost per task: its cost share minus its lower bound, clamped at 0."""
    if floors is None:
        floors = [min_possible_cost(t, instance) for t in range(instance.n)]
    return [max(0.0, c - f) for c, f in zip(task_costs(schedule, instance), floors)]


def initial_sequence_sched(instance: SchedInstance, rng: Optional[random.Random], noise: float) -> list[int]:
    """Tasks with fewer compatible lines first; ``noise`` jitters the line counts."""
    keys = []
    for t in instance.tasks:
        k = float(len(t.durations))
        if noise > 0:
            k += rng.uniform(-noise, noise)
        keys.append((k, t.id))
    return [tid for _, tid in sorted(keys)]


class SchedDomain:
    """The full scheduling problem behind the engine's domain protocol."""

    def __init__(self, instance: SchedInstance, inner_iters: int = INNER_ITERS_DEFAULT, init_noise: float = 1.0):
        if instance.n == 0:
            raise ValueError("instance has no tasks")
        self.instance = instance
        self.inner_iters = inner_iters
        self.init_noise = init_noise
        self.floors = [min_possible_cost(t, instance) for t in range(instance.n)]

    def element_count(self) -> int:
        return self.instance.n

    def initial_sequence(self, rng: random.Random) -> list[int]:
        return initial_sequence_sched(self.instance, rng, self.init_noise)

    def construct(self, sequence: Sequence[int], rng: random.Random) -> Schedule:
        return construct_schedule(sequence, self.instance, rng, self.inner_iters, self.floors)

    def score(self, schedule: Schedule) -> float:
        return schedule_cost(schedule, self.instance).total

    def analyze(self, schedule: Schedule) -> list[float]:
        return analyze_schedule(schedule, self.instance, self.floors)
