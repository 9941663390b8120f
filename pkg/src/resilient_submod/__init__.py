"""Resilient monotone submodular maximization.

Select ``alpha`` elements so that the objective stays high after an adversary
removes the worst ``beta`` of them.
"""
from ._accel import NUMBA_ENABLED
from .adversary import RemovalResult, exact_removal, greedy_removal, worst_removal
from .analysis import (
    BoundReport,
    CurvatureReport,
    check_lemma1,
    check_lemma2,
    compute_curvature,
    g_curve,
    greedy_factor,
    run_property_checks,
    theorem1_bound,
)
from .core import GroundSet, MemoizedOracle, ObjectiveOracle, SetFunction, Subset, marginal_gain
from .errors import (
    CapacityError,
    DegenerateElementError,
    InstanceParseError,
    InvalidInputError,
    NotPositiveDefiniteError,
    NotSubmodularError,
    ResilientSubmodError,
)
from .experiments import ExperimentConfig, ExperimentReport, run_experiment, summarize
from .functions import (
    LogDetFunction,
    ModularFunction,
    TabularFunction,
    WeightedCoverageFunction,
    cholesky_logdet,
    load_instance,
    save_instance,
    make_example1_function,
    random_psd_instance,
)
from .solvers import (
    ProblemInstance,
    SolveResult,
    baseline_random,
    baseline_top_alpha,
    exact_maxmin,
    plain_greedy,
    resilient_greedy,
    solve,
)

__version__ = "0.1.0"
