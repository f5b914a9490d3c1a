import csv
import io
import math
import statistics

import pytest

from swo import EngineConfig
from swo.bench import (
    AblationCell,
    RunRow,
    ablation,
    ablation_grid,
    ablation_to_csv,
    aggregate,
    batch_to_csv,
    restart_study,
    run_batch,
    spread,
    spread_table,
    study_to_csv,
)
from swo.cli import ColorFactory, SchedFactory
from swo.coloring import ColoringConfig, Graph
from swo.sched import generate_instance

CFG = EngineConfig(max_iterations=10)


def small_sched():
    return SchedFactory(generate_instance(12, 3, seed=2), inner_iters=2, init_noise=1.0)


def test_batch_rows_sorted_and_seeded():
    batch = run_batch(small_sched(), CFG, runs=3, base_seed=5)
    assert [r.seed for r, _ in batch] == [5, 6, 7]
    again = run_batch(small_sched(), CFG, runs=3, base_seed=5)
    assert [r.score for r, _ in batch] == [r.score for r, _ in again]


def test_batch_rejects_zero_runs():
    with pytest.raises(ValueError):
        run_batch(small_sched(), CFG, runs=0)


def test_aggregate_rows_match_recomputation():
    rows = [RunRow(0, 3, 2, 10, 1), RunRow(1, 5, 7, 10, 1), RunRow(2, 4, 1, 10, 1)]
    text = batch_to_csv(rows)
    table = list(csv.DictReader(io.StringIO(text)))
    agg = {r["seed"]: r for r in table if r["seed"] in ("mean", "min", "max")}
    assert float(agg["mean"]["score"]) == statistics.fmean([3, 5, 4])
    assert float(agg["min"]["iteration_found"]) == 1
    assert float(agg["max"]["score"]) == 5
    assert "seconds" not in table[0]


def test_batch_csv_with_timing_has_seconds():
    rows = [RunRow(0, 3, 2, 10, 1, 0.25)]
    assert batch_to_csv(rows, timing=True).splitlines()[0].endswith(",seconds")
    assert aggregate(rows)["mean"]["seconds"] == 0.25


def test_study_infinite_threshold_always_succeeds():
    rows = restart_study(small_sched(), CFG, [1, 2, 4], [math.inf], budget=8)
    assert [r.success_rate for r in rows] == [1.0, 1.0, 1.0]
    assert [r.sample_size for r in rows] == [8, 4, 2]
    assert all(r.mean_cost == 1 for r in rows)


def test_study_unreachable_threshold_never_succeeds():
    rows = restart_study(small_sched(), CFG, [2, 4], [-1.0], budget=8)
    assert all(r.success_rate == 0 and r.mean_cost is None for r in rows)
    assert study_to_csv(rows).splitlines()[1] == "2,-1,0.0000,,4,0"


def test_study_counts_only_completed_passes():
    rows = restart_study(small_sched(), CFG, [3], [math.inf], budget=10)
    assert rows[0].sample_size == 3


@pytest.mark.parametrize("cutoffs", [[], [0, 2], [20]])
def test_study_rejects_bad_cutoffs(cutoffs):
    with pytest.raises(ValueError):
        restart_study(small_sched(), CFG, cutoffs, [1.0], budget=10)


def test_study_success_rate_is_ratio():
    rows = restart_study(small_sched(), CFG, [1, 3], [1e9, 0.0], budget=9)
    for r in rows:
        assert r.success_rate == r.successes / r.sample_size


def test_ablation_grid_shape():
    cells = ablation_grid()
    assert len(cells) == 8 and len(set(cells)) == 8


def test_ablation_identical_on_edgeless_graph():
    rows = ablation({"empty": Graph.from_edges(6, [])}, EngineConfig(max_iterations=5), runs=2)
    assert {r.mean_colors for r in rows} == {1.0}
    assert spread(rows) == 0


def test_ablation_is_repeatable():
    g = Graph.from_edges(8, [(i, (i + 1) % 8) for i in range(8)] + [(0, 4), (2, 6)])
    a = ablation_to_csv(ablation({"g": g}, EngineConfig(max_iterations=15), runs=2))
    b = ablation_to_csv(ablation({"g": g}, EngineConfig(max_iterations=15), runs=2))
    assert a == b


def test_spread_table_all_row():
    g1 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    g2 = Graph.from_edges(4, [])
    rows = ablation({"k3": g1, "empty": g2}, EngineConfig(max_iterations=5), runs=1,
                    cells=[AblationCell(True, "all_outside", "sticky"), AblationCell(False, "first_only", "sticky")])
    table = spread_table(rows)
    assert [d["instance"] for d in table] == ["k3", "empty", "ALL"]
    assert table[-1]["best_mean"] == 4.0 and table[-1]["spread"] == 0


def test_factories_pickle():
    import pickle

    pickle.loads(pickle.dumps(small_sched()))()
    pickle.loads(pickle.dumps(ColorFactory(Graph.from_edges(2, [(0, 1)]), ColoringConfig(), 1.0)))()
