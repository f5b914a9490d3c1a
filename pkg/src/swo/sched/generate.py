"""Seeded synthetic instances in the shape of the cable-plant data (13 lines, typed tasks)."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import SchedInstance, SchedTask


@dataclass(frozen=True)
class GeneratorParams:
    n_types: int = 10
    compat_density: float = 0.35  # chance a line can run a given cable type
    duration: tuple[int, int] = (10, 60)
    line_spread: float = 0.25  # per-line duration factor is drawn from 1 +/- this
    setup: tuple[int, int] = (2, 20)
    infeasible_prob: float = 0.15
    release_spread: float = 0.6  # releases span this fraction of the estimated makespan
    due_slack: float = 2.5  # due = release + min duration + U(0, due_slack * min duration)

    def validate(self) -> None:
        if not 0 < self.compat_density <= 1:
            raise ValueError(
                f"compat_density must be in (0, 1] so every type can reach a line, got {self.compat_density}"
            )
        if self.n_types < 1:
            raise ValueError("n_types must be >= 1")
        lo, hi = self.duration
        if not 1 <= lo <= hi:
            raise ValueError("duration range must satisfy 1 <= lo <= hi")
        slo, shi = self.setup
        if not 0 <= slo <= shi:
            raise ValueError("setup range must satisfy 0 <= lo <= hi")
        if not 0 <= self.infeasible_prob < 1:
            raise ValueError("infeasible_prob must be in [0, 1)")
        if not 0 <= self.line_spread < 1:
            raise ValueError("line_spread must be in [0, 1)")
        if self.release_spread < 0 or self.due_slack < 0:
            raise ValueError("release_spread and due_slack must be non-negative")


def generate_instance(n_tasks: int, n_lines: int, params: GeneratorParams | None = None, seed: int = 0) -> SchedInstance:
    params = params or GeneratorParams()
    params.validate()
    if n_tasks < 1 or n_lines < 1:
        raise ValueError("need at least one task and one line")
    rng = random.Random(seed)

    compat = []
    for _ in range(params.n_types):
        lines = [line for line in range(n_lines) if rng.random() < params.compat_density]
        compat.append(lines or [rng.randrange(n_lines)])
    line_factor = [1 + rng.uniform(-params.line_spread, params.line_spread) for _ in range(n_lines)]

    setup = []
    for a in range(params.n_types):
        row = []
        for b in range(params.n_types):
            if a == b:
                row.append(0)
            elif rng.random() < params.infeasible_prob:
                row.append(None)
            else:
                row.append(rng.randint(*params.setup))
        setup.append(row)

    lo, hi = params.duration
    horizon = int(params.release_spread * n_tasks * (lo + hi) / 2 / n_lines)
    tasks = []
    for i in range(n_tasks):
        typ = rng.randrange(params.n_types)
        base = rng.randint(lo, hi)
        durations = {line: max(1, round(base * line_factor[line])) for line in compat[typ]}
        release = rng.randint(0, max(0, horizon))
        shortest = min(durations.values())
        due = release + shortest + rng.randint(0, int(params.due_slack * shortest))
        tasks.append(SchedTask(id=i, cable_type=typ, release=release, due=due, durations=durations))
    return SchedInstance(tasks=tuple(tasks), line_count=n_lines, setup=tuple(tuple(r) for r in setup))
