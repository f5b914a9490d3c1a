"""Construct/analyze/prioritize loop over a priority sequence.

The engine knows nothing about the problem. A domain plugs in through the
:class:`Domain` protocol: it builds a solution greedily from a sequence of
element ids, scores it (lower is better) and hands back per-element blame.
The engine turns blame into the next sequence, keeps the incumbent and
restarts from the domain's noisy heuristic on a fixed cadence.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Optional, Protocol, Sequence

Prioritizer = Literal["sticky", "blame_sort"]


class Domain(Protocol):
    def element_count(self) -> int: ...

    def initial_sequence(self, rng: random.Random) -> list[int]: ...

    def construct(self, sequence: Sequence[int], rng: random.Random) -> Any: ...

    def score(self, solution: Any) -> float: ...

    def analyze(self, solution: Any) -> Sequence[float]: ...


@dataclass(frozen=True)
class EngineConfig:
    """Run parameters.

    ``restart_cutoff`` and ``movement_limit`` default to values derived from the
    element count (``ceil(n/2)`` and ``n``); ``restart_cutoff=0`` disables restarts.
    """

    max_iterations: int = 1000
    restart_cutoff: Optional[int] = None
    prioritizer: Prioritizer = "sticky"
    movement_limit: Optional[int] = None
    noise: float = 0.5
    seed: int = 0
    target_score: Optional[float] = None
    trace: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.restart_cutoff is not None and self.restart_cutoff < 0:
            raise ValueError(f"restart_cutoff must be >= 1 or 0 (off), got {self.restart_cutoff}")
        if self.movement_limit is not None and self.movement_limit < 1:
            raise ValueError(f"movement_limit must be >= 1, got {self.movement_limit}")
        if self.noise < 0 or math.isnan(self.noise):
            raise ValueError(f"noise must be non-negative, got {self.noise}")
        if self.prioritizer not in ("sticky", "blame_sort"):
            raise ValueError(f"unknown prioritizer {self.prioritizer!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def cutoff_for(self, n: int) -> Optional[int]:
        if self.restart_cutoff is None:
            return max(1, math.ceil(n / 2))
        return self.restart_cutoff or None

    def limit_for(self, n: int) -> int:
        return self.movement_limit if self.movement_limit is not None else n


@dataclass(frozen=True)
class TrajectoryRecord:
    iteration: int
    score: float
    positions: tuple[int, ...]  # positions[element] = index in that iteration's sequence
    total_blame: float
    restarted: bool = False


@dataclass(frozen=True)
class RunResult:
    best_score: float
    best_solution: Any
    iteration_found: int
    iterations_run: int
    restarts_performed: int
    trajectory: tuple[TrajectoryRecord, ...] = field(default_factory=tuple)
    initial_sequence: tuple[int, ...] = ()


def blame_sort(sequence: Sequence[int], blame: Sequence[float]) -> list[int]:
    """Order elements by descending blame; equal blame keeps the incoming order."""
    return sorted(sequence, key=lambda e: -blame[e])


def sticky_sort(
    sequence: Sequence[int],
    blame: Sequence[float],
    limit: int,
    noise: float,
    rng: Optional[random.Random] = None,
) -> list[int]:
    """Move blamed elements forward by at most ``limit`` places.

    Element at index ``i`` gets the key ``i - ceil(limit * b / b_max)`` plus uniform
    jitter in ``[-noise, noise]``; elements are then sorted by key, equal keys
    going to the element that moved further (then to the earlier one). Zero
    blame means zero displacement, so unblamed elements only sink as others pass
    them.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    if noise > 0 and rng is None:
        raise ValueError("noise > 0 needs an rng")
    b_max = max((blame[e] for e in sequence), default=0.0)
    keys = []
    for i, e in enumerate(sequence):
        move = 0
        if b_max > 0:
            b = blame[e]
            if b > 0:
                move = min(limit, math.ceil(limit * b / b_max))
        key = float(i - move)
        if noise > 0:
            key += rng.uniform(-noise, noise)
        keys.append((key, -move))
    order = sorted(range(len(sequence)), key=keys.__getitem__)
    return [sequence[i] for i in order]


def check_permutation(sequence: Sequence[int], n: int) -> None:
    if len(sequence) != n or set(sequence) != set(range(n)):
        raise ValueError(f"sequence is not a permutation of range({n})")


def run(
    domain: Domain,
    config: EngineConfig,
    start: Optional[Sequence[int]] = None,
    on_iteration: Optional[Callable[[int, float, Any], bool]] = None,
) -> RunResult:
    """Run the loop for up to ``config.max_iterations`` constructions.

    ``start`` overrides the domain's heuristic for the first sequence only;
    restarts always draw from ``domain.initial_sequence``. ``on_iteration`` is
    called as ``(iteration, score, solution)`` after each construction and may
    return True to stop the run.
    """
    n = domain.element_count()
    if n < 1:
        raise ValueError("domain has no elements")
    rng = random.Random(config.seed)
    cutoff = config.cutoff_for(n)
    limit = config.limit_for(n)

    if start is not None:
        sequence = list(start)
        check_permutation(sequence, n)
    else:
        sequence = list(domain.initial_sequence(rng))
    initial = tuple(sequence)

    best_score = math.inf
    best_solution = None
    found = 0
    restarts = 0
    since_restart = 0
    restarted = False
    trajectory: list[TrajectoryRecord] = []
    iteration = 0

    for iteration in range(1, config.max_iterations + 1):
        if cutoff is not None and since_restart == cutoff:
            sequence = list(domain.initial_sequence(rng))
            restarts += 1
            since_restart = 0
            restarted = True

        solution = domain.construct(sequence, rng)
        score = domain.score(solution)
        if score < best_score:
            best_score, best_solution, found = score, solution, iteration
        blame = domain.analyze(solution)

        if config.trace:
            positions = [0] * n
            for pos, e in enumerate(sequence):
                positions[e] = pos
            trajectory.append(
                TrajectoryRecord(iteration, score, tuple(positions), float(sum(blame)), restarted)
            )
        restarted = False

        stop = on_iteration is not None and on_iteration(iteration, score, solution)
        if stop or (config.target_score is not None and best_score <= config.target_score):
            break

        if config.prioritizer == "blame_sort":
            sequence = blame_sort(sequence, blame)
        else:
            sequence = sticky_sort(sequence, blame, limit, config.noise, rng)
        since_restart += 1

    return RunResult(
        best_score=best_score,
        best_solution=best_solution,
        iteration_found=found,
        iterations_run=iteration,
        restarts_performed=restarts,
        trajectory=tuple(trajectory),
        initial_sequence=initial,
    )


def write_trajectory_csv(path, trajectory: Sequence[TrajectoryRecord], positions: bool = True) -> None:
    """Write ``iteration,score,total_blame`` rows, plus ``pos_<id>`` columns if asked."""
    n = len(trajectory[0].positions) if trajectory else 0
    header = ["iteration", "score", "total_blame"]
    if positions:
        header += [f"pos_{e}" for e in range(n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for rec in trajectory:
            row = [rec.iteration, fmt_num(rec.score), fmt_num(rec.total_blame)]
            if positions:
                row += list(rec.positions)
            writer.writerow(row)


def fmt_num(x: float) -> str:
    """Locale-independent, round-trippable number text (integers without '.0')."""
    if isinstance(x, int) or (isinstance(x, float) and x.is_integer() and abs(x) < 2**53):
        return str(int(x))
    return repr(float(x))
