from .genetic import Population, genetic_search
from .nelder_mead import NMResult, nelder_mead
from .objectives import Objective, Target, Weights, objective_cnot_class, objective_exact_cnot
from .search import SearchConfig, SearchResult, hybrid_search, rationalize, residuals

__all__ = [
    "NMResult",
    "Objective",
    "Population",
    "SearchConfig",
    "SearchResult",
    "Target",
    "Weights",
    "genetic_search",
    "hybrid_search",
    "nelder_mead",
    "objective_cnot_class",
    "objective_exact_cnot",
    "rationalize",
    "residuals",
]
