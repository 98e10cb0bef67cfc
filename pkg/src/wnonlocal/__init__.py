"""Single-photon W-state nonlocality: quantum predictions, classical bounds, simulation."""

__version__ = "0.1.0"

from .events import (
    AllEqual,
    ExactlyOneNegative,
    Fixed,
    Predicate,
    UndefinedConditional,
    conditional_probability,
    event_probability,
    signs_equal,
)
from .inequality import (
    BellExpression,
    BellTerm,
    build_omega,
    evaluate_on_state,
    omega_closed_form,
    violation_probability,
)
from .lhv import (
    BoundCertificate,
    DeterministicStrategy,
    EnumerationInfeasible,
    enumerate_bound,
    evaluate_strategy,
    hardy_implication_check,
    mixture_bound_check,
)
from .noise import (
    NoiseModel,
    NoisyW,
    critical_parameter,
    estimate_omega,
    noisy_omega,
    noisy_term_probability,
    sample_setting,
)
from .states import (
    AnalyticW,
    MeasurementSetting,
    OutcomeAssignment,
    PureState,
    analytic_w_probability,
    build_vacuum,
    build_w_state,
    outcome_distribution,
    outcome_probability,
)
