"""Undirected graphs and the DIMACS ``.col`` reader/writers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence


class DimacsError(ValueError):
    """Base class for ``.col`` parse failures; carries the 1-based line number."""

    def __init__(self, msg: str, lineno: int | None = None):
        super().__init__(msg if lineno is None else f"line {lineno}: {msg}")
        self.lineno = lineno


class MissingHeaderError(DimacsError):
    pass


class MalformedHeaderError(DimacsError):
    pass


class NodeOutOfRangeError(DimacsError):
    pass


class MalformedEdgeError(DimacsError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u != v:
                nbrs[u].add(v)
                nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @cached_property
    def adjsets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adj)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]


def parse_dimacs(text: str) -> Graph:
    """Read DIMACS ``.col`` text (``c`` comments, ``p edge n m``, ``e u v`` with 1-based ids).

    Reversed and repeated edges collapse; self-loops are dropped. The edge
    count on the ``p`` line is not trusted, since several public files count
    each edge twice.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise MalformedHeaderError("second 'p' line", lineno)
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise MalformedHeaderError(f"expected 'p edge <n> <m>', got {raw.strip()!r}", lineno)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise MalformedHeaderError(f"non-integer size in {raw.strip()!r}", lineno) from None
            if n < 0:
                raise MalformedHeaderError("negative node count", lineno)
        elif tag == "e":
            if n is None:
                raise MissingHeaderError("edge before 'p' line", lineno)
            if len(parts) != 3:
                raise MalformedEdgeError(f"expected 'e <u> <v>', got {raw.strip()!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise MalformedEdgeError(f"non-integer node in {raw.strip()!r}", lineno) from None
            for x in (u, v):
                if not 1 <= x <= n:
                    raise NodeOutOfRangeError(f"node {x} outside 1..{n}", lineno)
            edges.append((u - 1, v - 1))
        elif tag == "n":
            continue  # node-weight lines in some files; not used
        else:
            raise DimacsError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise MissingHeaderError("no 'p edge' line")
    return Graph.from_edges(n, edges)


def load_dimacs(path) -> Graph:
    return parse_dimacs(Path(path).read_text())


def to_dimacs(graph: Graph, comment: str | None = None) -> str:
    lines = [f"c {comment}"] if comment else []
    lines.append(f"p edge {graph.n} {graph.m}")
    lines += [f"e {u + 1} {v + 1}" for u, v in graph.edges()]
    return "\n".join(lines) + "\n"


def write_assignment(colors: Sequence[int], path) -> None:
    """One ``node color`` pair per line, nodes 1-based."""
    Path(path).write_text("".join(f"{v + 1} {c}\n" for v, c in enumerate(colors)))


def write_summary(path, instance: str, seed: int, colors: int, iterations: int, seconds: float) -> None:
    data = {"instance": instance, "seed": seed, "colors": colors, "iterations": iterations, "seconds": round(seconds, 6)}
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
