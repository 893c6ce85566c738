"""GSN safety-case engine.

Parse textual safety cases, validate their argument structure, aggregate
claim probabilities into catastrophe-risk estimates, judge them against
severity/likelihood risk matrices, lint them against hard standards, and
explore what-ifs over a CLI or HTTP service.
"""

from .aggregation import (
    OutcomeRisk,
    RiskEstimate,
    Verdict,
    conjoin,
    disjoin,
    evaluate_case,
    sensitivity,
)
from .casefile import (
    CellVerdict,
    Challenge,
    ChallengeSet,
    ChallengeStatus,
    RiskMatrix,
    parse_case,
    parse_challenges,
    parse_matrix,
    serialize_case,
    serialize_challenges,
    serialize_matrix,
)
from .catalog import (
    ArgumentCategory,
    ArgumentTemplate,
    LintFinding,
    Rating,
    apply_invalidation,
    builtin_catalog,
    check_challenges,
    check_collective_coverage,
    check_correlation_coverage,
    check_prerequisites,
    check_step_coverage,
    run_all_lints,
)
from .errors import (
    EvaluationError,
    GraphError,
    LintError,
    MatrixError,
    ModelError,
    ParseError,
    ScaseError,
)
from .matrix import Assessment, assess, classify_likelihood, default_matrix, validate_matrix
from .model import (
    FindingSeverity,
    GsnNode,
    Mode,
    NodeKind,
    NodeStatus,
    SafetyCase,
    SourceSpan,
    ValidationFinding,
    nodes_for_step,
    topological_order,
    validate_graph,
)
from .render import render_dot
from .riskmodels import (
    AttemptModel,
    Deterrence,
    PopulationModel,
    RedundancyModel,
    ResponsePolicy,
    SimulationParams,
    UtilityModel,
    caught_threshold,
    incentive_deterred,
    joint_infraction_probability,
    naive_population_risk,
    practiced_race,
    race_success_probability,
    simulate_deployment,
    unilateral_risk,
)

__version__ = "0.1.0"
