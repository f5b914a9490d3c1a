"""Target-set graph coloring: constructor with reuse and color grabbing, blame, domain."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional, Sequence

from .. import engine
from .graph import Graph

BlameVariant = Literal["all_outside", "first_only"]


@dataclass(frozen=True)
class ColoringConfig:
    grab: bool = True
    blame: BlameVariant = "all_outside"
    reuse: bool = True
    random_ties: bool = False  # break least-constraining ties at random instead of lowest index

    def __post_init__(self):
        if self.blame not in ("all_outside", "first_only"):
            raise ValueError(f"unknown blame variant {self.blame!r}")


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    target: int  # size of the target set the coloring was built against
    sequence: tuple[int, ...]

    @property
    def colors_used(self) -> int:
        return len(set(self.colors))


class Grab(NamedTuple):
    color: int
    moves: list[tuple[int, int]]  # (neighbor, its new target color)


def _neighbor_counts(graph: Graph, colors: Sequence[int], width: int) -> list[list[int]]:
    cnt = [[0] * width for _ in range(graph.n)]
    for v, c in enumerate(colors):
        if c >= 0:
            for u in graph.adj[v]:
                cnt[u][c] += 1
    return cnt


def _pick(options: list[tuple[int, int]], rng: Optional[random.Random], random_ties: bool) -> int:
    """Lowest score wins; ties go to the lowest color, or a random one."""
    best = min(s for s, _ in options)
    tied = [c for s, c in options if s == best]
    if random_ties and len(tied) > 1 and rng is not None:
        return rng.choice(tied)
    return min(tied)


def try_grab(
    node: int,
    graph: Graph,
    colors: Sequence[int],
    target: int,
    rng: Optional[random.Random] = None,
    cnt: Optional[list[list[int]]] = None,
    random_ties: bool = False,
) -> Optional[Grab]:
    """Find a target color ``node`` can take from its colored neighbors.

    ``colors`` is the partial coloring (``-1`` = uncolored). Color ``c`` is
    grabbable when every neighbor holding ``c`` has another target color free
    among its own colored neighbors; those neighbors then move to their lowest
    such color. Among grabbable colors the least constraining for ``node``'s
    uncolored neighbors wins. Returns None when nothing can be grabbed.
    """
    adj = graph.adj
    if cnt is None:
        cnt = _neighbor_counts(graph, colors, max(target, graph.max_degree + 1) + 1)
    holders: dict[int, list[int]] = {}
    for w in adj[node]:
        c = colors[w]
        if 0 <= c < target:
            holders.setdefault(c, []).append(w)
    uncolored = [u for u in adj[node] if colors[u] < 0]
    adjset = graph.adjsets
    options = []
    moves_for = {}
    for c in range(target):
        blockers = holders.get(c)
        if not blockers:
            continue
        moves = []
        for w in blockers:
            cw = cnt[w]
            alt = next((a for a in range(target) if a != c and cw[a] == 0), -1)
            if alt < 0:
                break
            moves.append((w, alt))
        else:
            bset = set(blockers)
            lost = 0
            for u in uncolored:
                k = cnt[u][c]
                if k == 0 or (k <= len(bset) and len(adjset[u] & bset) == k):
                    lost += 1
            options.append((lost, c))
            moves_for[c] = moves
    if not options:
        return None
    c = _pick(options, rng, random_ties)
    return Grab(c, moves_for[c])


def construct_coloring(
    sequence: Sequence[int],
    graph: Graph,
    prev: Optional[Sequence[int]],
    target: int,
    cfg: ColoringConfig = ColoringConfig(),
    rng: Optional[random.Random] = None,
) -> Coloring:
    """Color nodes in ``sequence`` order, trying to stay within colors ``0..target-1``.

    Per node: keep its previous color if legal and in the target set; else the
    least constraining free target color; else grab a target color from
    neighbors; else the lowest free color at or above ``target``.
    """
    if target < 1:
        raise ValueError("target must be >= 1")
    n, adj = graph.n, graph.adj
    width = max(target, graph.max_degree + 1) + 1
    colors = [-1] * n
    cnt = [[0] * width for _ in range(n)]
    reuse = cfg.reuse and prev is not None

    for v in sequence:
        cv = cnt[v]
        c = -1
        if reuse:
            p = prev[v]
            if 0 <= p < target and cv[p] == 0:
                c = p
        if c < 0:
            free = [x for x in range(target) if cv[x] == 0]
            if free:
                if len(free) == 1:
                    c = free[0]
                else:
                    uncolored = [u for u in adj[v] if colors[u] < 0]
                    options = []
                    for x in free:
                        lost = 0
                        for u in uncolored:
                            if cnt[u][x] == 0:
                                lost += 1
                        options.append((lost, x))
                    c = _pick(options, rng, cfg.random_ties)
            elif cfg.grab:
                g = try_grab(v, graph, colors, target, rng, cnt, cfg.random_ties)
                if g is not None:
                    c = g.color
                    for w, a in g.moves:
                        colors[w] = a
                        for x in adj[w]:
                            cnt[x][c] -= 1
                            cnt[x][a] += 1
        if c < 0:
            c = target
            while cv[c]:
                c += 1
        colors[v] = c
        for u in adj[v]:
            cnt[u][c] += 1
    return Coloring(tuple(colors), target, tuple(sequence))


def analyze_coloring(coloring: Coloring, target: int, variant: BlameVariant = "all_outside") -> list[float]:
    """Blame ``color - target + 1`` for nodes outside the target set.

    ``first_only`` keeps that blame only on the earliest node in the build
    order holding each outside color.
    """
    colors = coloring.colors
    blame = [0.0] * len(colors)
    if variant == "all_outside":
        for v, c in enumerate(colors):
            if c >= target:
                blame[v] = float(c - target + 1)
    elif variant == "first_only":
        seen = set()
        for v in coloring.sequence:
            c = colors[v]
            if c >= target and c not in seen:
                seen.add(c)
                blame[v] = float(c - target + 1)
    else:
        raise ValueError(f"unknown blame variant {variant!r}")
    return blame


def initial_sequence_color(graph: Graph, rng: Optional[random.Random], noise: float) -> list[int]:
    """Nodes by decreasing degree, degrees jittered by up to ``noise``."""
    keys = []
    for v in range(graph.n):
        k = -float(graph.degree(v))
        if noise > 0:
            k += rng.uniform(-noise, noise)
        keys.append((k, v))
    return [v for _, v in sorted(keys)]


def is_proper(graph: Graph, colors: Sequence[int]) -> bool:
    return all(colors[u] != colors[v] for u, v in graph.edges())


class ColoringDomain:
    """Graph coloring behind the engine protocol; score is the number of colors.

    The target set shrinks to one below the best color count after every strict
    improvement, and each construction reuses the previous iteration's colors.
    """

    def __init__(self, graph: Graph, cfg: ColoringConfig = ColoringConfig(), init_noise: float = 1.0):
        if graph.n == 0:
            raise ValueError("graph has no nodes")
        self.graph = graph
        self.cfg = cfg
        self.init_noise = init_noise
        self.target = graph.max_degree + 1
        self.best = None
        self.prev: Optional[tuple[int, ...]] = None

    def element_count(self) -> int:
        return self.graph.n

    def initial_sequence(self, rng: random.Random) -> list[int]:
        return initial_sequence_color(self.graph, rng, self.init_noise)

    def construct(self, sequence: Sequence[int], rng: random.Random) -> Coloring:
        col = construct_coloring(sequence, self.graph, self.prev, self.target, self.cfg, rng)
        self.prev = col.colors
        used = col.colors_used
        if self.best is None or used < self.best:
            self.best = used
            self.target = max(1, used - 1)
        return col

    def score(self, coloring: Coloring) -> float:
        return coloring.colors_used

    def analyze(self, coloring: Coloring) -> list[float]:
        return analyze_coloring(coloring, self.target, self.cfg.blame)


def solve_coloring(
    graph: Graph,
    config: engine.EngineConfig = engine.EngineConfig(),
    cfg: ColoringConfig = ColoringConfig(),
    init_noise: float = 1.0,
) -> engine.RunResult:
    return engine.run(ColoringDomain(graph, cfg, init_noise), config)
