"""Fairness without regret.

Pick the fairest selection among those that are exactly optimal for some
admissible weighting of the primary objective, so fairness improves without
sacrificing optimality. Includes the quota-constrained baseline and its
regret, Pareto-front analysis for linear mixtures, an implicit-gradient
ascent scheme for continuous problems, and a diagnostic for (mis)using the
same idea on uncertain data.
"""

__version__ = "0.1.0"

from .errors import (
    ComplexityError,
    ConfigError,
    ConsistencyError,
    InfeasibleError,
    IngestionError,
    NoRegretError,
    ParameterError,
    SchemaError,
    SingularHessian,
)
from .model import (
    FairnessSpec,
    ItemRecord,
    ObjectiveSpec,
    Population,
    Schema,
    Selection,
    ThetaDomain,
    fairness_score,
    is_fair,
    score_item,
    score_selection,
)
from .discrete import (
    FairestResult,
    OptimalSetEntry,
    RegretReport,
    all_selections,
    crossing_points,
    enumerate_optimal_set,
    fairest_optimal,
    quota_constrained_optimum,
    regret,
    sample_optimal_set,
    top_k,
    utility_gap,
)
from .pareto import (
    FrontReport,
    UtilityPoint,
    convex_pareto_front,
    front_report,
    pareto_front,
    utility_points,
    weak_pareto_front,
)
from .io import load_interval_records, load_population, student_intervals, students
