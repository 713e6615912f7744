"""
Analytics Module

Budget-balance decompositions, stabiliser taxonomy, the GDP volatility
function and stabiliser effectiveness dynamics. All operations are pure
functions over immutable inputs.
"""

from .balance_core import (
    BalanceDecomposition,
    ComplianceVerdict,
    Elasticities,
    FiscalObservation,
    conventional_balance,
    cyclical_balance,
    cyclical_closed_forms,
    cyclically_adjusted_expenditure,
    cyclically_adjusted_revenue,
    decompose,
    fp_compliance,
    output_gap,
    sfa_from_deltas,
    structural_balance_aggregate,
)
from .disaggregate import (
    REVENUE_CATEGORIES,
    DisaggregateBreakdown,
    DisaggregateInputs,
    RevenueCategory,
    adjust_expenditure_unemployment,
    adjust_revenue_category,
    disaggregate_breakdown,
    structural_balance_disaggregate,
)
from .effectiveness import (
    MIN_OPTIMUM_SAMPLES,
    EffectivenessPath,
    LogisticSolution,
    LogisticTrajectory,
    OptimalityReport,
    Optimum,
    OptimumSearch,
    base_logistic_analytic,
    base_logistic_numeric,
    coupled_rate_samples,
    effectiveness,
    effectiveness_logistic_rhs,
    effectiveness_trajectory,
    integral_rate_condition,
    marginal_rate_substitution,
    optimality_condition_check,
    optimum_search,
    rate_from_base,
    sampling_grid,
)
from .taxonomy import (
    ActionContinuity,
    ActionMode,
    ControlShape,
    StabiliserClass,
    StabiliserDescriptor,
    Target,
    class_lineage,
    class_profile,
    classify_stabiliser,
    holds,
)
from .volatility import (
    StationaryReport,
    VolParams,
    automatic_type_conditions,
    classify_stationary,
    equilibrium_residual,
    gradient_check,
    stabilisers_required,
    vol_gradient,
    vol_gradient_chain_rule,
    vol_gradient_printed_form,
    vol_hessian,
    vol_value,
)

__all__ = [
    # Aggregate method
    "FiscalObservation",
    "Elasticities",
    "BalanceDecomposition",
    "ComplianceVerdict",
    "output_gap",
    "conventional_balance",
    "cyclically_adjusted_revenue",
    "cyclically_adjusted_expenditure",
    "structural_balance_aggregate",
    "cyclical_balance",
    "cyclical_closed_forms",
    "decompose",
    "sfa_from_deltas",
    "fp_compliance",
    # Disaggregate method
    "REVENUE_CATEGORIES",
    "RevenueCategory",
    "DisaggregateInputs",
    "DisaggregateBreakdown",
    "adjust_revenue_category",
    "adjust_expenditure_unemployment",
    "disaggregate_breakdown",
    "structural_balance_disaggregate",
    # Taxonomy
    "ActionMode",
    "ControlShape",
    "ActionContinuity",
    "Target",
    "StabiliserClass",
    "StabiliserDescriptor",
    "classify_stabiliser",
    "class_lineage",
    "class_profile",
    "holds",
    # Volatility
    "VolParams",
    "StationaryReport",
    "vol_value",
    "equilibrium_residual",
    "stabilisers_required",
    "vol_gradient",
    "vol_hessian",
    "vol_gradient_chain_rule",
    "vol_gradient_printed_form",
    "classify_stationary",
    "automatic_type_conditions",
    "gradient_check",
    # Effectiveness
    "MIN_OPTIMUM_SAMPLES",
    "LogisticSolution",
    "LogisticTrajectory",
    "EffectivenessPath",
    "Optimum",
    "OptimumSearch",
    "OptimalityReport",
    "effectiveness",
    "marginal_rate_substitution",
    "rate_from_base",
    "coupled_rate_samples",
    "effectiveness_logistic_rhs",
    "base_logistic_analytic",
    "base_logistic_numeric",
    "sampling_grid",
    "effectiveness_trajectory",
    "optimum_search",
    "integral_rate_condition",
    "optimality_condition_check",
]
