"""Seeded batches, the restart-cutoff study and the coloring ablation grid."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, Optional, Sequence

from . import engine
from .engine import EngineConfig, fmt_num


@dataclass(frozen=True)
class RunRow:
    seed: int
    score: float
    iteration_found: int
    iterations_run: int
    restarts: int
    seconds: Optional[float] = None


def _one_run(make_domain: Callable, config: EngineConfig, seed: int, start=None) -> tuple[RunRow, object]:
    cfg = replace(config, seed=seed)
    t0 = time.perf_counter()
    res = engine.run(make_domain(), cfg, start=start)
    dt = time.perf_counter() - t0
    row = RunRow(seed, res.best_score, res.iteration_found, res.iterations_run, res.restarts_performed, dt)
    return row, res.best_solution


def run_batch(
    make_domain: Callable,
    config: EngineConfig,
    runs: int,
    base_seed: int = 0,
    workers: int = 1,
    start=None,
) -> list[tuple[RunRow, object]]:
    """``runs`` independent runs with seeds ``base_seed .. base_seed + runs - 1``, sorted by seed.

    ``make_domain`` must be picklable when ``workers > 1``.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seeds = [base_seed + i for i in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_one_run, [make_domain] * runs, [config] * runs, seeds, [start] * runs))
    else:
        out = [_one_run(make_domain, config, s, start) for s in seeds]
    return sorted(out, key=lambda r: r[0].seed)


def aggregate(rows: Sequence[RunRow]) -> dict[str, dict[str, float]]:
    out = {}
    for stat, fn in (("mean", statistics.fmean), ("min", min), ("max", max)):
        out[stat] = {
            "score": fn([r.score for r in rows]),
            "iteration_found": fn([r.iteration_found for r in rows]),
            "iterations_run": fn([r.iterations_run for r in rows]),
            "restarts": fn([r.restarts for r in rows]),
        }
        if all(r.seconds is not None for r in rows):
            out[stat]["seconds"] = fn([r.seconds for r in rows])
    return out


RUN_FIELDS = ["seed", "score", "iteration_found", "iterations_run", "restarts"]


def batch_to_csv(rows: Sequence[RunRow], timing: bool = False) -> str:
    fields = RUN_FIELDS + (["seconds"] if timing else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        d = asdict(r)
        w.writerow([fmt_num(d[f]) for f in fields])
    agg = aggregate(rows)
    for stat in ("mean", "min", "max"):
        w.writerow([stat] + [fmt_num(agg[stat][f]) for f in fields[1:]])
    return buf.getvalue()


def batch_to_json(rows: Sequence[RunRow], timing: bool = False, **extra) -> str:
    def clean(d):
        if not timing:
            d.pop("seconds", None)
        return d

    agg = aggregate(rows)
    doc = dict(extra)
    doc["runs"] = [clean(asdict(r)) for r in rows]
    doc["aggregate"] = {k: clean(dict(v)) for k, v in agg.items()}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


# --- restart-cutoff study ---------------------------------------------------------


@dataclass(frozen=True)
class StudyRow:
    restart_cutoff: int
    threshold: float
    success_rate: float
    mean_cost: Optional[float]  # iterations spent per success; None when nothing succeeded
    sample_size: int
    successes: int


def _first_hits(make_domain, config: EngineConfig, seed: int, length: int, thresholds: Sequence[float]):
    """Iteration at which each threshold is first met in one restart-free run (None if never)."""
    hits: list[Optional[int]] = [None] * len(thresholds)
    best = [math.inf]

    def watch(it, score, _sol):
        best[0] = min(best[0], score)
        for i, th in enumerate(thresholds):
            if hits[i] is None and best[0] <= th:
                hits[i] = it
        return all(h is not None for h in hits)

    cfg = replace(config, seed=seed, max_iterations=length, restart_cutoff=0, trace=False, target_score=None)
    engine.run(make_domain(), cfg, on_iteration=watch)
    return hits


def restart_study(
    make_domain: Callable,
    config: EngineConfig,
    cutoffs: Sequence[int],
    thresholds: Sequence[float],
    budget: int,
    base_seed: int = 0,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[StudyRow]:
    """Success rate and mean cost per (cutoff, threshold) under a fixed iteration budget.

    For cutoff ``c`` the budget is split into ``budget // c`` passes; each pass is
    a fresh restart-free run of ``c`` iterations. A pass consumes the iterations
    up to the first one meeting the threshold, or all ``c`` if it never does;
    mean cost is total consumption over the number of successful passes.

    Pass ``j`` uses seed ``base_seed + j`` at every cutoff, so a pass at a
    longer cutoff extends the same run; each seed is simulated once, to the
    longest cutoff that uses it.
    """
    if not cutoffs:
        raise ValueError("need at least one restart cutoff")
    if any(c < 1 for c in cutoffs):
        raise ValueError("restart cutoffs must be >= 1")
    if budget < max(cutoffs):
        raise ValueError("budget must cover at least one pass at the largest cutoff")
    cutoffs = sorted(set(cutoffs))
    thresholds = list(thresholds)
    n_passes = {c: budget // c for c in cutoffs}
    total = max(n_passes.values())
    hits = []
    for j in range(total):
        length = max(c for c in cutoffs if j < n_passes[c])
        hits.append(_first_hits(make_domain, config, base_seed + j, length, thresholds))
        if progress:
            progress(j + 1, total)

    rows = []
    for c in cutoffs:
        passes = hits[: n_passes[c]]
        for i, th in enumerate(thresholds):
            succ = 0
            consumed = 0
            for h in passes:
                if h[i] is not None and h[i] <= c:
                    succ += 1
                    consumed += h[i]
                else:
                    consumed += c
            rows.append(
                StudyRow(c, th, succ / len(passes), consumed / succ if succ else None, len(passes), succ)
            )
    return rows


def study_to_csv(rows: Sequence[StudyRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["restart_cutoff", "threshold", "success_rate", "mean_cost", "sample_size", "successes"])
    for r in rows:
        w.writerow([
            r.restart_cutoff,
            fmt_num(r.threshold),
            f"{r.success_rate:.4f}",
            "" if r.mean_cost is None else f"{r.mean_cost:.1f}",
            r.sample_size,
            r.successes,
        ])
    return buf.getvalue()


# --- coloring ablation ------------------------------------------------------------------


@dataclass(frozen=True)
class AblationCell:
    grab: bool
    blame: str
    prioritizer: str


@dataclass(frozen=True)
class AblationRow:
    instance: str
    cell: AblationCell
    mean_colors: float
    min_colors: int
    max_colors: int
    mean_seconds: float
    runs: int


def ablation_grid() -> list[AblationCell]:
    return [
        AblationCell(grab, blame, prio)
        for prio in ("sticky", "blame_sort")
        for grab in (True, False)
        for blame in ("all_outside", "first_only")
    ]


def _color_domain(graph, cell: AblationCell):
    from .coloring import ColoringConfig, ColoringDomain

    return ColoringDomain(graph, ColoringConfig(grab=cell.grab, blame=cell.blame))


class _ColorFactory:
    def __init__(self, graph, cell):
        self.graph, self.cell = graph, cell

    def __call__(self):
        return _color_domain(self.graph, self.cell)


def ablation(
    graphs: dict,
    config: EngineConfig,
    runs: int,
    base_seed: int = 0,
    cells: Optional[Sequence[AblationCell]] = None,
    workers: int = 1,
) -> list[AblationRow]:
    """Every grab x blame x prioritizer cell on every graph, same seeds in each cell."""
    rows = []
    for name, graph in graphs.items():
        for cell in cells or ablation_grid():
            cfg = replace(config, prioritizer=cell.prioritizer)
            batch = run_batch(_ColorFactory(graph, cell), cfg, runs, base_seed, workers)
            scores = [r.score for r, _ in batch]
            rows.append(
                AblationRow(
                    name,
                    cell,
                    statistics.fmean(scores),
                    int(min(scores)),
                    int(max(scores)),
                    statistics.fmean(r.seconds for r, _ in batch),
                    runs,
                )
            )
    return rows


def spread(rows: Sequence[AblationRow]) -> float:
    """(worst mean - best mean) / best mean over the given cells."""
    means = [r.mean_colors for r in rows]
    return (max(means) - min(means)) / min(means)


def _cell_label(cell: AblationCell) -> str:
    return f"grab={'on' if cell.grab else 'off'}/{cell.blame}/{cell.prioritizer}"


def ablation_to_csv(rows: Sequence[AblationRow], timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["instance", "grab", "blame", "prioritizer", "mean_colors", "min_colors", "max_colors", "runs"]
    w.writerow(head + (["mean_seconds"] if timing else []))
    for r in rows:
        line = [r.instance, "on" if r.cell.grab else "off", r.cell.blame, r.cell.prioritizer,
                f"{r.mean_colors:.2f}", r.min_colors, r.max_colors, r.runs]
        w.writerow(line + ([f"{r.mean_seconds:.3f}"] if timing else []))
    return buf.getvalue()


def spread_table(rows: Sequence[AblationRow]) -> list[dict]:
    """Best and worst cell per instance, plus an ``ALL`` row over per-cell means summed across instances."""
    groups: dict[str, list[AblationRow]] = {}
    for r in rows:
        groups.setdefault(r.instance, []).append(r)
    out = []
    for name, group in groups.items():
        best = min(group, key=lambda r: r.mean_colors)
        worst = max(group, key=lambda r: r.mean_colors)
        out.append({"instance": name, "best_cell": _cell_label(best.cell), "best_mean": best.mean_colors,
                    "worst_cell": _cell_label(worst.cell), "worst_mean": worst.mean_colors,
                    "spread": spread(group)})
    if len(groups) > 1:
        totals: dict[AblationCell, float] = {}
        for r in rows:
            totals[r.cell] = totals.get(r.cell, 0.0) + r.mean_colors
        best = min(totals, key=totals.get)
        worst = max(totals, key=totals.get)
        out.append({"instance": "ALL", "best_cell": _cell_label(best), "best_mean": totals[best],
                    "worst_cell": _cell_label(worst), "worst_mean": totals[worst],
                    "spread": (totals[worst] - totals[best]) / totals[best]})
    return out


def spread_to_csv(table: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "best_cell", "best_mean", "worst_cell", "worst_mean", "spread"])
    for d in table:
        w.writerow([d["instance"], d["best_cell"], f"{d['best_mean']:.2f}", d["worst_cell"],
                    f"{d['worst_mean']:.2f}", f"{d['spread']:.4f}"])
    return buf.getvalue()
