"""Command-line entry point: ``swo <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from . import bench, engine
from .coloring import ColoringConfig, ColoringDomain, DimacsError, load_dimacs
from .coloring.graph import write_assignment
from .engine import EngineConfig, fmt_num
from .sched import (
    GeneratorParams,
    SchedDomain,
    WalkthroughDomain,
    generate_instance,
    instance_to_dict,
    load_instance,
    save_instance,
    toy_ids,
    toy_instance,
    write_schedule_csv,
)

log = logging.getLogger("swo")

EXIT_USAGE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentSpec:
    """Everything a command needs; loaded from ``--config`` JSON and overridden by flags."""

    instances: list[str] = field(default_factory=list)
    domain: Optional[str] = None
    iterations: int = 1000
    restart_cutoff: Optional[int] = None  # None = ceil(n/2), 0 = never
    noise: float = 0.5
    init_noise: float = 1.0
    prioritizer: str = "sticky"
    movement_limit: Optional[int] = None
    grab: bool = True
    blame: str = "all_outside"
    inner_iters: int = 10
    runs: int = 1
    seed: int = 0
    thresholds: list[float] = field(default_factory=list)
    cutoffs: list[int] = field(default_factory=list)
    budget: int = 10000
    out: Optional[str] = None
    format: str = "csv"
    timing: bool = False
    workers: int = 1
    toy: bool = False

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            max_iterations=self.iterations,
            restart_cutoff=self.restart_cutoff,
            prioritizer=self.prioritizer,
            movement_limit=self.movement_limit,
            noise=self.noise,
            seed=self.seed,
        )

    def validate(self) -> None:
        if self.runs < 1:
            raise UsageError("--runs must be >= 1")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        numeric = [t for t in self.thresholds if t != "feasible"]
        if numeric != sorted(numeric):
            raise UsageError("thresholds must be sorted ascending")
        try:
            self.engine_config()
            ColoringConfig(grab=self.grab, blame=self.blame)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


_PRIORITIZERS = {"sticky": "sticky", "sort": "blame_sort", "blame_sort": "blame_sort"}
_BLAME = {"all": "all_outside", "first": "first_only", "all_outside": "all_outside", "first_only": "first_only"}


def _onoff(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _thresholds(text: str) -> list:
    """Comma list of numbers, ``inf`` or ``feasible`` (resolved once the instance is loaded)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if part == "feasible":
            out.append(part)
        elif part in ("inf", "+inf"):
            out.append(math.inf)
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad threshold {part!r}") from None
    return out


def _resolve_thresholds(raw, p_inf: float) -> list[float]:
    # any schedule scoring below the infeasibility penalty has no infeasible adjacency
    out = [math.nextafter(p_inf, 0.0) if t == "feasible" else float(t) for t in raw]
    if out != sorted(out):
        raise UsageError("thresholds must be sorted ascending")
    return out


def _ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentSpec fields; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--restart-cutoff", type=lambda s: 0 if s == "none" else int(s),
                   help="iterations between restarts; 'none' disables (default ceil(n/2))")
    p.add_argument("--noise", type=float, help="prioritizer jitter in sequence positions")
    p.add_argument("--init-noise", type=float, help="jitter on the initial heuristic's keys")
    p.add_argument("--prioritizer", choices=sorted(_PRIORITIZERS))
    p.add_argument("--movement-limit", type=int)
    p.add_argument("--grab", type=_onoff, metavar="{on,off}")
    p.add_argument("--blame", choices=sorted(_BLAME))
    p.add_argument("--inner-iters", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--timing", action="store_true", default=None,
                   help="include wall-clock columns (makes output non-reproducible)")
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve-sched", help="solve a scheduling instance file")
    p.add_argument("instances", nargs="*")
    p.add_argument("--toy", action="store_true", default=None, help="run the built-in three-task walkthrough")
    p.add_argument("--schedule-out", help="write the best schedule as CSV")
    _common(p)

    p = sub.add_parser("solve-color", help="color a DIMACS graph")
    p.add_argument("instances", nargs="*")
    p.add_argument("--assignment-out", help="write the best coloring, one 'node color' per line")
    _common(p)

    p = sub.add_parser("restart-study", help="success rate / mean cost per restart cutoff")
    p.add_argument("instances", nargs="*")
    p.add_argument("--cutoffs", type=_ints)
    p.add_argument("--thresholds", type=_thresholds, help="comma list; 'feasible' maps to the infeasibility penalty")
    p.add_argument("--budget", type=int, help="total iterations per cutoff")
    _common(p)

    p = sub.add_parser("trace", help="per-iteration priority positions and scores")
    p.add_argument("domain", choices=["sched", "color"])
    p.add_argument("instances", nargs="*")
    p.add_argument("--toy", action="store_true", default=None)
    _common(p)

    p = sub.add_parser("ablation", help="grab x blame x prioritizer grid on coloring instances")
    p.add_argument("instances", nargs="*")
    _common(p)

    p = sub.add_parser("gen-sched", help="write a synthetic scheduling instance")
    p.add_argument("--tasks", type=int, default=100)
    p.add_argument("--lines", type=int, default=13)
    p.add_argument("--params", help="JSON object of GeneratorParams fields")
    _common(p)
    return parser


def _spec_from(args: argparse.Namespace) -> ExperimentSpec:
    spec = ExperimentSpec()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        known = {f.name for f in fields(ExperimentSpec)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            setattr(spec, k, v)
        if isinstance(spec.thresholds, list):
            spec.thresholds = [math.inf if t in ("inf", None) else t for t in spec.thresholds]
        if isinstance(spec.instances, str):
            spec.instances = [spec.instances]
    for f in fields(ExperimentSpec):
        v = getattr(args, f.name, None)
        if v is not None and not (f.name == "instances" and v == []):
            setattr(spec, f.name, v)
    spec.prioritizer = _PRIORITIZERS.get(spec.prioritizer, spec.prioritizer)
    spec.blame = _BLAME.get(spec.blame, spec.blame)
    spec.validate()
    return spec


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_sched(path: str):
    try:
        return load_instance(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_graph(path: str):
    try:
        return load_dimacs(path)
    except (OSError, DimacsError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _one_instance(spec: ExperimentSpec) -> str:
    if len(spec.instances) != 1:
        raise UsageError("exactly one instance path is required")
    return spec.instances[0]


class SchedFactory:
    def __init__(self, instance, inner_iters, init_noise):
        self.instance, self.inner_iters, self.init_noise = instance, inner_iters, init_noise

    def __call__(self):
        return SchedDomain(self.instance, self.inner_iters, self.init_noise)


class ColorFactory:
    def __init__(self, graph, cfg, init_noise):
        self.graph, self.cfg, self.init_noise = graph, cfg, init_noise

    def __call__(self):
        return ColoringDomain(self.graph, self.cfg, self.init_noise)


def cmd_solve_sched(spec: ExperimentSpec, args) -> int:
    start = None
    if spec.toy:
        name = "toy"
        make = WalkthroughDomain
        start = toy_ids("CAB")
        inst = toy_instance()
    else:
        name = _one_instance(spec)
        inst = _load_sched(name)
        make = SchedFactory(inst, spec.inner_iters, spec.init_noise)
    batch = bench.run_batch(make, spec.engine_config(), spec.runs, spec.seed, spec.workers, start=start)
    rows = [r for r, _ in batch]
    if spec.format == "json":
        _emit(bench.batch_to_json(rows, spec.timing, instance=name), spec.out)
    else:
        _emit(bench.batch_to_csv(rows, spec.timing), spec.out)
    if getattr(args, "schedule_out", None):
        best_row, best_sched = min(batch, key=lambda b: (b[0].score, b[0].seed))
        write_schedule_csv(best_sched, inst, args.schedule_out)
    return 0


def cmd_solve_color(spec: ExperimentSpec, args) -> int:
    name = _one_instance(spec)
    graph = _load_graph(name)
    make = ColorFactory(graph, ColoringConfig(grab=spec.grab, blame=spec.blame), spec.init_noise)
    batch = bench.run_batch(make, spec.engine_config(), spec.runs, spec.seed, spec.workers)
    rows = [r for r, _ in batch]
    if spec.format == "json":
        runs = [
            {"instance": name, "seed": r.seed, "colors": int(r.score), "iterations": r.iterations_run,
             "iteration_found": r.iteration_found, "seconds": r.seconds if spec.timing else None}
            for r in rows
        ]
        doc = runs[0] if len(runs) == 1 else {"runs": runs, "aggregate": bench.aggregate(rows)}
        if len(runs) > 1 and not spec.timing:
            for v in doc["aggregate"].values():
                v.pop("seconds", None)
        _emit(json.dumps(doc, indent=1) + "\n", spec.out)
    else:
        _emit(bench.batch_to_csv(rows, spec.timing), spec.out)
    if getattr(args, "assignment_out", None):
        _, best = min(batch, key=lambda b: (b[0].score, b[0].seed))
        write_assignment(best.colors, args.assignment_out)
    return 0


def _log_progress(done: int, total: int) -> None:
    if done % 100 == 0 or done == total:
        log.info("restart study: %d/%d passes simulated", done, total)


def cmd_restart_study(spec: ExperimentSpec, args) -> int:
    name = _one_instance(spec)
    if not spec.cutoffs:
        raise UsageError("--cutoffs is required and must be non-empty")
    if not spec.thresholds:
        raise UsageError("--thresholds is required")
    inst = _load_sched(name)
    make = SchedFactory(inst, spec.inner_iters, spec.init_noise)
    thresholds = _resolve_thresholds(spec.thresholds, inst.p_inf)
    try:
        rows = bench.restart_study(make, spec.engine_config(), spec.cutoffs, thresholds, spec.budget, spec.seed,
                                   progress=_log_progress)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if spec.format == "json":
        doc = [r.__dict__ for r in rows]
        _emit(json.dumps(doc, indent=1) + "\n", spec.out)
    else:
        _emit(bench.study_to_csv(rows), spec.out)
    return 0


def cmd_trace(spec: ExperimentSpec, args) -> int:
    """Writes <out>_trajectory.csv, <out>_positions.csv and <out>_initial.csv."""
    start = None
    if args.domain == "sched":
        if spec.toy:
            domain = WalkthroughDomain()
            start = toy_ids("CAB")
            keys = None
        else:
            inst = _load_sched(_one_instance(spec))
            domain = SchedDomain(inst, spec.inner_iters, spec.init_noise)
            keys = [len(t.durations) for t in inst.tasks]
    else:
        graph = _load_graph(_one_instance(spec))
        domain = ColoringDomain(graph, ColoringConfig(grab=spec.grab, blame=spec.blame), spec.init_noise)
        keys = [graph.degree(v) for v in range(graph.n)]
    cfg = engine.EngineConfig(**{**spec.engine_config().__dict__, "trace": True})
    res = engine.run(domain, cfg, start=start)
    prefix = spec.out or "trace"
    engine.write_trajectory_csv(f"{prefix}_trajectory.csv", res.trajectory)
    with open(f"{prefix}_positions.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "element", "position", "score"])
        for rec in res.trajectory:
            for e, pos in enumerate(rec.positions):
                w.writerow([rec.iteration, e, pos, fmt_num(rec.score)])
    with open(f"{prefix}_initial.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["position", "element", "heuristic_key"])
        for pos, e in enumerate(res.initial_sequence):
            w.writerow([pos, e, "" if keys is None else keys[e]])
    return 0


def cmd_ablation(spec: ExperimentSpec, args) -> int:
    if not spec.instances:
        raise UsageError("at least one DIMACS instance is required")
    graphs = {Path(p).stem: _load_graph(p) for p in spec.instances}
    rows = bench.ablation(graphs, spec.engine_config(), spec.runs, spec.seed, workers=spec.workers)
    table = bench.spread_table(rows)
    if spec.format == "json":
        doc = {
            "cells": [
                {"instance": r.instance, "grab": r.cell.grab, "blame": r.cell.blame,
                 "prioritizer": r.cell.prioritizer, "mean_colors": r.mean_colors, "min_colors": r.min_colors,
                 "max_colors": r.max_colors, "runs": r.runs, **({"mean_seconds": r.mean_seconds} if spec.timing else {})}
                for r in rows
            ],
            "spread": table,
        }
        _emit(json.dumps(doc, indent=1) + "\n", spec.out)
    else:
        _emit(bench.ablation_to_csv(rows, spec.timing), spec.out)
        spread_csv = bench.spread_to_csv(table)
        if spec.out:
            Path(spec.out).with_suffix(".spread.csv").write_text(spread_csv)
        else:
            sys.stdout.write("\n" + spread_csv)
    return 0


def cmd_gen_sched(spec: ExperimentSpec, args) -> int:
    params = GeneratorParams()
    if args.params:
        try:
            raw = json.loads(args.params)
            for k in ("duration", "setup"):
                if k in raw:
                    raw[k] = tuple(raw[k])
            params = GeneratorParams(**raw)
        except (json.JSONDecodeError, TypeError) as exc:
            raise UsageError(f"bad --params: {exc}") from exc
    try:
        inst = generate_instance(args.tasks, args.lines, params, spec.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if spec.out:
        save_instance(inst, spec.out)
    else:
        sys.stdout.write(json.dumps(instance_to_dict(inst), indent=1) + "\n")
    return 0


COMMANDS = {
    "solve-sched": cmd_solve_sched,
    "solve-color": cmd_solve_color,
    "restart-study": cmd_restart_study,
    "trace": cmd_trace,
    "ablation": cmd_ablation,
    "gen-sched": cmd_gen_sched,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        spec = _spec_from(args)
        return COMMANDS[args.command](spec, args)
    except UsageError as exc:
        print(f"swo {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"swo {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
