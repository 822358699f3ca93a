"""Personalized PageRank with node-dependent restart probabilities."""

from .errors import InputError, RestartRankError, SolverError
from .graph import (
    Graph,
    augmented_matrix,
    build_graph,
    check_weak_connectivity,
    read_edge_list,
    transition_matrix,
)
from .identities import (
    LaurentTerms,
    SymmetryReport,
    check_location_symmetry,
    check_occupation_symmetry,
    degree_power_asymptotics,
    laurent_terms,
    rho_pi_relation_check,
)
from .montecarlo import WalkStats, empirical_pi, empirical_rho, restart_fraction, simulate
from .restart import (
    ModelKind,
    RestartModel,
    constant_model,
    custom_model,
    degree_power_model,
    load_restart_config,
    rwj_model,
    rwj_transition_check,
)
from .solvers import (
    ScoreVector,
    SolverConfig,
    expected_restart_time,
    expected_visits_matrix,
    location_ppr,
    occupation_ppr,
    occupation_ppr_power,
    path_sum_oracle,
    resolvent_row,
)

__version__ = "0.1.0"

__all__ = [
    "WalkStats",
    "empirical_pi",
    "empirical_rho",
    "restart_fraction",
    "simulate",
    "Graph",
    "InputError",
    "LaurentTerms",
    "ModelKind",
    "RestartModel",
    "RestartRankError",
    "ScoreVector",
    "SolverConfig",
    "SolverError",
    "SymmetryReport",
    "augmented_matrix",
    "build_graph",
    "check_location_symmetry",
    "check_occupation_symmetry",
    "check_weak_connectivity",
    "constant_model",
    "custom_model",
    "degree_power_asymptotics",
    "degree_power_model",
    "expected_restart_time",
    "expected_visits_matrix",
    "laurent_terms",
    "load_restart_config",
    "location_ppr",
    "occupation_ppr",
    "occupation_ppr_power",
    "path_sum_oracle",
    "read_edge_list",
    "resolvent_row",
    "rho_pi_relation_check",
    "rwj_model",
    "rwj_transition_check",
    "transition_matrix",
]
