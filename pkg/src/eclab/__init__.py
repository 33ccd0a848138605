"""Equilibrium cycles: finite games, response graphs, curb sets and discretized continuous families."""

__version__ = "0.1.0"

from .analysis import (
    BudgetExceeded,
    Condition,
    ECVerdict,
    MixedProfile,
    Witness,
    brute_force_ecs,
    curb_closure,
    enumerate_ecs,
    is_curb,
    is_dominant_ec,
    is_mixed_ne,
    is_non_trivial,
    minimal_curb_sets,
    mixed_ne_in_support,
    verify_ec,
)
from .audit import TheoremReport, check_theorems
from .game import (
    FiniteGame,
    GameError,
    ProductSet,
    bimatrix,
    enumerate_pure_ne,
    is_very_weakly_dominant_ne,
    load_game,
    random_corpus,
    random_game,
)
from .graphs import GraphKind, build_graph, export_dot, is_rectangular, scc_decompose, sink_sccs

__all__ = [
    "BudgetExceeded",
    "Condition",
    "ECVerdict",
    "FiniteGame",
    "GameError",
    "GraphKind",
    "MixedProfile",
    "ProductSet",
    "TheoremReport",
    "Witness",
    "bimatrix",
    "brute_force_ecs",
    "build_graph",
    "check_theorems",
    "curb_closure",
    "enumerate_ecs",
    "enumerate_pure_ne",
    "export_dot",
    "is_curb",
    "is_dominant_ec",
    "is_mixed_ne",
    "is_non_trivial",
    "is_rectangular",
    "is_very_weakly_dominant_ne",
    "load_game",
    "minimal_curb_sets",
    "mixed_ne_in_support",
    "random_corpus",
    "random_game",
    "scc_decompose",
    "sink_sccs",
    "verify_ec",
]
