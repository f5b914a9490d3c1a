from .graph import (
    DimacsError,
    Graph,
    MalformedEdgeError,
    MalformedHeaderError,
    MissingHeaderError,
    NodeOutOfRangeError,
    load_dimacs,
    parse_dimacs,
    to_dimacs,
    write_assignment,
    write_summary,
)
from .solver import (
    Coloring,
    ColoringConfig,
    ColoringDomain,
    Grab,
    analyze_coloring,
    construct_coloring,
    initial_sequence_color,
    is_proper,
    solve_coloring,
    try_grab,
)

__all__ = [
    "Coloring",
    "ColoringConfig",
    "ColoringDomain",
    "DimacsError",
    "Grab",
    "Graph",
    "MalformedEdgeError",
    "MalformedHeaderError",
    "MissingHeaderError",
    "NodeOutOfRangeError",
    "analyze_coloring",
    "construct_coloring",
    "initial_sequence_color",
    "is_proper",
    "load_dimacs",
    "parse_dimacs",
    "solve_coloring",
    "to_dimacs",
    "try_grab",
    "write_assignment",
    "write_summary",
]
