"""
Budget Balance Module

Output gap, conventional balance and the aggregate (IMF) decomposition of the
conventional balance into structural and cyclical parts, plus checks against
the deficit and structural-balance ceilings of the fiscal rules.

Balances are signed: a deficit is negative.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.errors import FiscalDomainError, NumericError
from ..utils.logging_config import get_logger

logger = get_logger("analytics.balance_core")

ADDITIVITY_RTOL = 1e-12

DEFAULT_DEFICIT_LIMIT = 0.03
DEFAULT_STRUCTURAL_LIMIT = 0.005
DEFAULT_RELAXED_STRUCTURAL_LIMIT = 0.01
DEFAULT_RELAXATION_THRESHOLD = 0.60


class FiscalObservation(BaseModel):
    """One period's national-accounts snapshot, all amounts in the same currency unit."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    period: int
    y_current: float = Field(gt=0)
    y_potential: float = Field(gt=0)
    revenue: float = Field(ge=0)
    expenditure: float = Field(ge=0)


class Elasticities(BaseModel):
    """Revenue and expenditure elasticities with respect to the output gap."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    epsilon_v: float = 1.0
    epsilon_c: float = 0.0


class BalanceDecomposition(BaseModel):
    """Conventional balance split into structural and cyclical components."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    sbc: float
    sbs: float
    sbc_cyclical: float

    @model_validator(mode="after")
    def _check_additivity(self) -> "BalanceDecomposition":
        scale = max(abs(self.sbc), abs(self.sbs), abs(self.sbc_cyclical), 1e-300)
        if abs(self.sbs + self.sbc_cyclical - self.sbc) > ADDITIVITY_RTOL * scale:
            raise ValueError("sbc must equal sbs + sbc_cyclical")
        return self


class ComplianceVerdict(BaseModel):
    """Outcome of checking a decomposition against the fiscal rule ceilings."""

    model_config = ConfigDict(frozen=True)

    deficit_ratio: float
    structural_ratio: float
    debt_ratio: float
    structural_limit: float
    deficit_ok: bool
    structural_ok: bool

    @property
    def compliant(self) -> bool:
        return self.deficit_ok and self.structural_ok


def _require_positive(value: float, field: str) -> None:
    if not value > 0:
        raise FiscalDomainError(f"{field} must be positive, got {value}", field=field)


def _cycle_factor(obs: FiscalObservation, elasticity: float) -> float:
    """(Yp/Y)^elasticity, the adjustment applied to a cycle-sensitive amount."""
    _require_positive(obs.y_current, "y_current")
    _require_positive(obs.y_potential, "y_potential")

    try:
        factor = (obs.y_potential / obs.y_current) ** elasticity
    except OverflowError as e:
        raise NumericError(f"cycle adjustment overflowed for elasticity {elasticity}") from e

    if not math.isfinite(factor):
        raise NumericError(f"cycle adjustment is not finite for elasticity {elasticity}")
    return factor


def output_gap(obs: FiscalObservation) -> float:
    """Relative deviation of current from potential GDP, (Y - Yp) / Yp."""
    _require_positive(obs.y_potential, "y_potential")
    return (obs.y_current - obs.y_potential) / obs.y_potential


def conventional_balance(obs: FiscalObservation) -> float:
    """Revenue minus expenditure at actual activity levels."""
    return obs.revenue - obs.expenditure


def cyclically_adjusted_revenue(obs: FiscalObservation, el: Elasticities) -> float:
    """Revenue scaled to potential output: V * (Yp/Y)^epsilon_v."""
    return obs.revenue * _cycle_factor(obs, el.epsilon_v)


def cyclically_adjusted_expenditure(obs: FiscalObservation, el: Elasticities) -> float:
    """Expenditure scaled to potential output: C * (Yp/Y)^epsilon_c."""
    return obs.expenditure * _cycle_factor(obs, el.epsilon_c)


def structural_balance_aggregate(obs: FiscalObservation, el: Elasticities) -> float:
    """
    Structural balance by the aggregate method.

    Args:
        obs: Observation for one period.
        el: Elasticities of revenue and expenditure.

    Returns:
        V * (Yp/Y)^epsilon_v - C * (Yp/Y)^epsilon_c in currency units.

    Raises:
        FiscalDomainError: Non-positive GDP level.
        NumericError: Adjustment factor is not finite.
    """
    sbs = cyclically_adjusted_revenue(obs, el) - cyclically_adjusted_expenditure(obs, el)
    if not math.isfinite(sbs):
        raise NumericError("structural balance is not finite")
    return sbs


def cyclical_balance(obs: FiscalObservation, el: Elasticities) -> float:
    """Cycle-driven component, always the residual SBC - SBS."""
    return conventional_balance(obs) - structural_balance_aggregate(obs, el)


def cyclical_closed_forms(obs: FiscalObservation) -> tuple[float, float]:
    """
    Closed forms of the cyclical balance under epsilon_v = 1, epsilon_c = 0.

    Returns:
        (V * (1 - Yp/Y), (V/Y) * Yp * gap). Both equal the residual once the
        stray "- C" of the published closed form is dropped.
    """
    _require_positive(obs.y_current, "y_current")
    first = obs.revenue * (1.0 - obs.y_potential / obs.y_current)
    second = (obs.revenue / obs.y_current) * obs.y_potential * output_gap(obs)
    return first, second


def decompose(obs: FiscalObservation, el: Elasticities) -> BalanceDecomposition:
    """Conventional, structural and cyclical balance for one observation."""
    sbc = conventional_balance(obs)
    sbs = structural_balance_aggregate(obs, el)
    decomposition = BalanceDecomposition(sbc=sbc, sbs=sbs, sbc_cyclical=sbc - sbs)

    logger.debug(
        f"Decomposed period {obs.period}: sbc={sbc!r}, sbs={sbs!r}, "
        f"cyclical={decomposition.sbc_cyclical!r}"
    )
    return decomposition


def sfa_from_deltas(delta_sbc: float, delta_sbs: float) -> float:
    """Automatic stabiliser contribution: the part of the balance change not explained by policy."""
    return delta_sbc - delta_sbs


def fp_compliance(
    decomp: BalanceDecomposition,
    y_current: float,
    debt_ratio: float,
    relaxation_threshold: float = DEFAULT_RELAXATION_THRESHOLD,
    deficit_limit: float = DEFAULT_DEFICIT_LIMIT,
    structural_limit: float = DEFAULT_STRUCTURAL_LIMIT,
    relaxed_structural_limit: float = DEFAULT_RELAXED_STRUCTURAL_LIMIT,
) -> ComplianceVerdict:
    """
    Check a decomposition against the deficit and structural-balance ceilings.

    Limits are closed: a ratio exactly at the ceiling complies. The relaxed
    structural ceiling applies only when debt_ratio is strictly below
    relaxation_threshold.

    Args:
        decomp: Balance decomposition for the period.
        y_current: Current GDP used as denominator.
        debt_ratio: Public debt over GDP.
        relaxation_threshold: Debt ratio below which the relaxed ceiling applies.
        deficit_limit: Maximum deficit as a share of GDP.
        structural_limit: Maximum structural balance magnitude as a share of GDP.
        relaxed_structural_limit: Structural ceiling under low debt.

    Returns:
        ComplianceVerdict with both ratios and rule outcomes.

    Raises:
        FiscalDomainError: Non-positive GDP or negative debt ratio.
    """
    _require_positive(y_current, "y_current")
    if debt_ratio < 0 or not math.isfinite(debt_ratio):
        raise FiscalDomainError(
            f"debt_ratio must be a finite non-negative number, got {debt_ratio}",
            field="debt_ratio",
        )

    deficit_ratio = decomp.sbc / y_current
    structural_ratio = decomp.sbs / y_current
    limit = relaxed_structural_limit if debt_ratio < relaxation_threshold else structural_limit

    return ComplianceVerdict(
        deficit_ratio=deficit_ratio,
        structural_ratio=structural_ratio,
        debt_ratio=debt_ratio,
        structural_limit=limit,
        deficit_ok=deficit_ratio >= -deficit_limit,
        structural_ok=abs(structural_ratio) <= limit,
    )
