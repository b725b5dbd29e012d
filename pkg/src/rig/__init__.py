"""Random intersection graphs: generation, HAM rotation-extension search,
structural property checks, threshold solving and Monte Carlo experiments."""

__version__ = "0.1.0"

from .errors import CapacityError, ContractViolation, InfeasibleError, ParameterError, RegimeError
from .model import (BipartiteIncidence, IntersectionGraph, ModelParams, derived_params,
                    intersection_of, sample_bipartite, sparsify)
from .ham import run_ham, rotate, validate_cycle, end_sets
from .thresholds import solve_p, a_n, limit_min_degree_prob, poisson_degree1_mean
from .oracle import is_hamiltonian_bruteforce, edges_bruteforce

__all__ = [
    "CapacityError", "ContractViolation", "InfeasibleError", "ParameterError", "RegimeError",
    "BipartiteIncidence", "IntersectionGraph", "ModelParams", "derived_params", "intersection_of",
    "sample_bipartite", "sparsify", "run_ham", "rotate", "validate_cycle", "end_sets", "solve_p",
    "a_n", "limit_min_degree_prob", "poisson_degree1_mean", "is_hamiltonian_bruteforce",
    "edges_bruteforce",
]
