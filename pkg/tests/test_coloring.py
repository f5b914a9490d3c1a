import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chromatic_number, random_connected_graph
from swo import EngineConfig, run
from swo.coloring import (
    Coloring,
    ColoringConfig,
    ColoringDomain,
    DimacsError,
    Graph,
    MalformedEdgeError,
    MalformedHeaderError,
    MissingHeaderError,
    NodeOutOfRangeError,
    analyze_coloring,
    construct_coloring,
    initial_sequence_color,
    is_proper,
    load_dimacs,
    parse_dimacs,
    solve_coloring,
    to_dimacs,
    try_grab,
    write_assignment,
)

DATA = Path(__file__).parent / "data"


def graphs(max_n=14):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        return Graph.from_edges(n, edges)

    return build()


# --- parsing -------------------------------------------------------------------------------


def test_parse_basic():
    g = parse_dimacs("c tiny\np edge 3 2\ne 1 2\ne 2 3\n")
    assert g.n == 3 and g.edges() == [(0, 1), (1, 2)]


def test_parse_collapses_reversed_duplicates():
    g = parse_dimacs("p edge 2 2\ne 1 2\ne 2 1\n")
    assert g.m == 1


def test_parse_drops_self_loops_and_accepts_col_header():
    g = parse_dimacs("p col 2 2\ne 1 1\ne 1 2\n")
    assert g.edges() == [(0, 1)]


@pytest.mark.parametrize(
    "text,err",
    [
        ("e 1 2\n", MissingHeaderError),
        ("c nothing\n", MissingHeaderError),
        ("p edge x 1\n", MalformedHeaderError),
        ("p graph 3 1\n", MalformedHeaderError),
        ("p edge 3\n", MalformedHeaderError),
        ("p edge 2 0\np edge 2 0\n", MalformedHeaderError),
        ("p edge 3 1\ne 1 4\n", NodeOutOfRangeError),
        ("p edge 3 1\ne 0 1\n", NodeOutOfRangeError),
        ("p edge 3 1\ne 1\n", MalformedEdgeError),
        ("p edge 3 1\ne 1 b\n", MalformedEdgeError),
        ("p edge 3 1\nx 1 2\n", DimacsError),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_dimacs(text)


def test_parse_error_reports_line():
    with pytest.raises(NodeOutOfRangeError) as info:
        parse_dimacs("c a\np edge 3 1\ne 1 9\n")
    assert info.value.lineno == 3


def test_real_dimacs_file():
    g = load_dimacs(DATA / "fpsol2.i.1.col")
    assert (g.n, g.m) == (496, 11654)


@given(graphs())
def test_dimacs_round_trip(g):
    assert parse_dimacs(to_dimacs(g, "x")) == g


def test_assignment_file(tmp_path):
    path = tmp_path / "a.txt"
    write_assignment((2, 0, 1), path)
    assert path.read_text() == "1 2\n2 0\n3 1\n"


# --- constructor ---------------------------------------------------------------------------------


def test_triangle_needs_one_outside_color():
    k3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    for seq in ([0, 1, 2], [2, 0, 1], [1, 2, 0]):
        col = construct_coloring(seq, k3, None, 2)
        assert sum(c >= 2 for c in col.colors) == 1 and col.colors_used == 3


def test_grab_example():
    # x=0, y=1, z=2; edges x-z and y-z only
    g = Graph.from_edges(3, [(0, 2), (1, 2)])
    col = construct_coloring([0, 1, 2], g, prev=(0, 1, 5), target=2)
    assert col.colors == (1, 1, 0)


def test_no_grab_falls_outside():
    g = Graph.from_edges(3, [(0, 2), (1, 2)])
    col = construct_coloring([0, 1, 2], g, prev=(0, 1, 5), target=2, cfg=ColoringConfig(grab=False))
    assert col.colors == (0, 1, 2)


def test_grab_refused_when_neighbor_stuck():
    # path a-b-c, a holds 1 and b holds 0 with k=2: taking 0 for c would force b
    # onto 1, which a already uses
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert try_grab(2, g, [1, 0, -1], 2) is None


def test_grab_returns_moves():
    g = Graph.from_edges(3, [(0, 2), (1, 2)])
    grab = try_grab(2, g, [0, 1, -1], 2)
    assert grab is not None and grab.color == 0 and grab.moves == [(0, 1)]


def test_least_constraining_choice():
    # node 0 is colored first with k=2; neighbor 1 already has neighbor 2 colored 0,
    # so giving node 0 color 1 would leave node 1 with nothing: pick 0
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    col = construct_coloring([2, 0, 1], g, None, 2)
    assert col.colors[0] == col.colors[2] == 0 and col.colors[1] == 1


def test_reuse_keeps_previous_colors():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    col = construct_coloring([0, 1, 2], g, prev=(1, 0, 1), target=2)
    assert col.colors == (1, 0, 1)


def test_reuse_can_be_disabled():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    col = construct_coloring([0, 1, 2], g, prev=(1, 0, 1), target=2, cfg=ColoringConfig(reuse=False))
    assert col.colors == (0, 1, 0)


def test_outside_colors_start_at_k():
    k4 = Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    col = construct_coloring([0, 1, 2, 3], k4, None, 1)
    assert sorted(col.colors) == [0, 1, 2, 3]


def test_target_must_be_positive():
    with pytest.raises(ValueError):
        construct_coloring([0], Graph.from_edges(1, []), None, 0)


@settings(max_examples=150)
@given(graphs(), st.integers(1, 6), st.booleans(), st.booleans(), st.integers(0, 10**6))
def test_always_proper(g, k, grab, reuse, seed):
    rng = random.Random(seed)
    seq = rng.sample(range(g.n), g.n)
    prev = tuple(rng.randrange(-1, k + 2) for _ in range(g.n))
    cfg = ColoringConfig(grab=grab, reuse=reuse, random_ties=bool(seed % 2))
    col = construct_coloring(seq, g, prev, k, cfg, rng)
    assert is_proper(g, col.colors)
    assert all(c >= 0 for c in col.colors)


@settings(max_examples=150)
@given(graphs(), st.integers(1, 5), st.integers(0, 10**6))
def test_grab_soundness(g, k, seed):
    """Applying a grab leaves a proper partial coloring within the target for the movers."""
    rng = random.Random(seed)
    colors = [-1] * g.n
    for v in rng.sample(range(g.n), g.n):
        used = {colors[u] for u in g.adj[v]}
        free = [c for c in range(g.n + 1) if c not in used]
        if rng.random() < 0.7:
            colors[v] = free[0]
    for node in range(g.n):
        if colors[node] >= 0:
            continue
        grab = try_grab(node, g, colors, k)
        if grab is None:
            continue
        new = list(colors)
        for w, a in grab.moves:
            assert 0 <= a < k and a != grab.color
            new[w] = a
        new[node] = grab.color
        assert all(new[u] != new[v] for u, v in g.edges() if new[u] >= 0 and new[v] >= 0)
        assert all(new[w] != grab.color for w in g.adj[node])


@given(graphs(), st.integers(0, 10**6))
def test_greedy_bound(g, seed):
    rng = random.Random(seed)
    col = construct_coloring(rng.sample(range(g.n), g.n), g, None, g.max_degree + 1)
    assert max(col.colors) <= g.max_degree


@settings(max_examples=100)
@given(graphs(), st.integers(0, 10**6))
def test_reuse_fixed_point(g, seed):
    """Feeding a proper coloring inside the target back as ``prev`` reproduces it, any order."""
    rng = random.Random(seed)
    first = construct_coloring(rng.sample(range(g.n), g.n), g, None, g.max_degree + 1)
    again = construct_coloring(rng.sample(range(g.n), g.n), g, first.colors, g.max_degree + 1)
    assert again.colors == first.colors


# --- blame ---------------------------------------------------------------------------------------


def test_blame_all_outside():
    col = Coloring((0, 1, 2, 3, 3), target=2, sequence=(4, 0, 1, 2, 3))
    assert analyze_coloring(col, 2) == [0, 0, 1, 2, 2]


def test_blame_first_only():
    col = Coloring((0, 1, 2, 3, 3), target=2, sequence=(4, 0, 1, 2, 3))
    assert analyze_coloring(col, 2, "first_only") == [0, 0, 1, 0, 2]


def test_blame_rejects_unknown_variant():
    with pytest.raises(ValueError):
        ColoringConfig(blame="everyone")
    with pytest.raises(ValueError):
        analyze_coloring(Coloring((0,), 1, (0,)), 1, "everyone")


# --- initial order and domain --------------------------------------------------------------------


def test_initial_order_by_degree():
    star = Graph.from_edges(4, [(3, 0), (3, 1), (3, 2), (0, 1)])
    assert initial_sequence_color(star, None, 0) == [3, 0, 1, 2]


@given(graphs(), st.floats(0, 5), st.integers(0, 10**6))
def test_initial_order_is_permutation(g, noise, seed):
    assert sorted(initial_sequence_color(g, random.Random(seed), noise)) == list(range(g.n))


def test_edgeless_graph_uses_one_color():
    res = solve_coloring(Graph.from_edges(10, []), EngineConfig(max_iterations=5))
    assert res.best_score == 1


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        ColoringDomain(Graph.from_edges(0, []))


def test_target_shrinks_after_improvement():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    dom = ColoringDomain(g)
    assert dom.target == 3
    col = dom.construct([0, 1, 2, 3, 4], random.Random(0))
    assert col.colors_used == 3 and dom.target == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_target_never_increases(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, 12, 0.4)
    dom = ColoringDomain(g)
    targets = []

    def watch(it, score, col):
        targets.append(dom.target)
        assert is_proper(g, col.colors)
        assert dom.target == max(1, dom.best - 1)

    run(dom, EngineConfig(max_iterations=40, seed=seed), on_iteration=watch)
    assert targets == sorted(targets, reverse=True)


def test_real_instance_reaches_its_chromatic_number():
    g = load_dimacs(DATA / "fpsol2.i.1.col")
    res = solve_coloring(g, EngineConfig(max_iterations=5, seed=0))
    assert res.best_score == 65 and is_proper(g, res.best_solution.colors)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["sticky", "blame_sort"]), st.booleans())
def test_coloring_runs_are_reproducible(seed, prio, grab):
    g = random_connected_graph(random.Random(3), 20, 0.3)
    cfg = EngineConfig(max_iterations=20, seed=seed, prioritizer=prio)
    a = run(ColoringDomain(g, ColoringConfig(grab=grab)), cfg)
    b = run(ColoringDomain(g, ColoringConfig(grab=grab)), cfg)
    assert (a.best_score, a.iteration_found, a.best_solution) == (b.best_score, b.iteration_found, b.best_solution)


def test_oracle_sanity():
    assert chromatic_number(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]) == 3
    assert chromatic_number(4, [(u, v) for u in range(4) for v in range(u + 1, 4)]) == 4
    assert chromatic_number(3, []) == 1
