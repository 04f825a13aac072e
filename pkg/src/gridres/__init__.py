"""gridres: wind-resilience Monte-Carlo assessment of distribution feeders.

Pipeline: fragility-driven line-failure sampling over a discretized wind
distribution, phased outage/restoration trials yielding five resilience
parameters, CVaR tail summaries per parameter, and aggregation into a
single score through lambda-fuzzy measures, Shapley weights and the
discrete Choquet integral.
"""

__version__ = "0.1.0"

from .engine import (
    PARAMETER_NAMES,
    ParameterVector,
    ScenarioStats,
    TimelineConfig,
    TrialResult,
    run_all_scenarios,
    run_scenario,
    run_trial,
)
from .hazard import (
    FragilityCurve,
    WindScenario,
    WindScenarioSet,
    event_severity,
    failure_probability,
    sample_line_failures,
)
from .mcdm import (
    FuzzyDensities,
    LambdaMeasure,
    ResilienceScore,
    ShapleyWeights,
    build_measure,
    choquet,
    resilience_metric,
    shapley,
    solve_lambda,
    subset_measure,
)
from .network import (
    Bus,
    Line,
    Network,
    NetworkFormatError,
    NetworkValidationError,
    PathCount,
    Source,
    count_simple_paths,
    energized_critical_loads,
    islands,
    load_network,
)
from .risk import (
    ParamDistribution,
    RiskSummary,
    cvar_alpha,
    normalize_minmax,
    summarize,
    var_alpha,
)

__all__ = [
    "__version__",
    "PARAMETER_NAMES",
    "ParameterVector",
    "ScenarioStats",
    "TimelineConfig",
    "TrialResult",
    "run_all_scenarios",
    "run_scenario",
    "run_trial",
    "FragilityCurve",
    "WindScenario",
    "WindScenarioSet",
    "event_severity",
    "failure_probability",
    "sample_line_failures",
    "FuzzyDensities",
    "LambdaMeasure",
    "ResilienceScore",
    "ShapleyWeights",
    "build_measure",
    "choquet",
    "resilience_metric",
    "shapley",
    "solve_lambda",
    "subset_measure",
    "Bus",
    "Line",
    "Network",
    "NetworkFormatError",
    "NetworkValidationError",
    "PathCount",
    "Source",
    "count_simple_paths",
    "energized_critical_loads",
    "islands",
    "load_network",
    "ParamDistribution",
    "RiskSummary",
    "cvar_alpha",
    "normalize_minmax",
    "summarize",
    "var_alpha",
]
