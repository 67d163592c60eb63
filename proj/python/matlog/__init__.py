from ._core import (
    SGEN,
    TRCL,
    EpsilonError,
    ParseError,
    SolveError,
    classify,
    compare,
    random_adjacency,
    solve,
    solve_matrix,
    validate,
)

__all__ = [
    "SGEN",
    "TRCL",
    "EpsilonError",
    "ParseError",
    "SolveError",
    "classify",
    "compare",
    "random_adjacency",
    "solve",
    "solve_matrix",
    "validate",
]
