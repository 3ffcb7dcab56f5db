"""Configuration-model laboratory.

Uniform random multigraphs with prescribed degrees, component censuses,
closed-form connectivity limits, an exact enumeration oracle, and a
reproducible Monte Carlo harness tying them together.
"""

from .census import (
    ComponentCensus,
    ExplorationTrace,
    component_census,
    is_connected,
    is_simple,
    run_exploration,
)
from .degseq import (
    DegreeSequence,
    LimitParams,
    WindowParams,
    build_sequence,
    to_limit_params,
    validate,
    window_params,
)
from .generator import Multigraph, Seed, half_edge_count, sample
from .montecarlo import (
    BuildTargets,
    EstimateReport,
    ExperimentConfig,
    run_experiment,
    sweep,
)
from .oracle import ExactLaw, enumerate_matchings, exact_factorial_moment, exact_law
from .theory import (
    Prediction,
    boundary_p_connected,
    complement_pmf,
    expected_complement,
    lambda_cycle,
    lambda_line,
    log_count_connected_simple,
    p_connected,
    p_connected_given_simple,
    p_no_line2_exact,
    p_simple,
    predict,
)

__all__ = [
    "BuildTargets",
    "ComponentCensus",
    "DegreeSequence",
    "EstimateReport",
    "ExactLaw",
    "ExperimentConfig",
    "ExplorationTrace",
    "LimitParams",
    "Multigraph",
    "Prediction",
    "Seed",
    "WindowParams",
    "boundary_p_connected",
    "build_sequence",
    "complement_pmf",
    "component_census",
    "enumerate_matchings",
    "exact_factorial_moment",
    "exact_law",
    "expected_complement",
    "half_edge_count",
    "is_connected",
    "is_simple",
    "lambda_cycle",
    "lambda_line",
    "log_count_connected_simple",
    "p_connected",
    "p_connected_given_simple",
    "p_no_line2_exact",
    "p_simple",
    "predict",
    "run_experiment",
    "run_exploration",
    "sample",
    "sweep",
    "to_limit_params",
    "validate",
    "window_params",
]

__version__ = "0.1.0"
