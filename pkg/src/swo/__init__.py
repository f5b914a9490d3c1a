"""Squeaky-wheel optimization: greedy construction steered by per-element blame."""

from .engine import EngineConfig, RunResult, TrajectoryRecord, blame_sort, run, sticky_sort

__version__ = "0.1.0"

__all__ = ["EngineConfig", "RunResult", "TrajectoryRecord", "blame_sort", "run", "sticky_sort"]
