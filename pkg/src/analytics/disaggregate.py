"""
Disaggregate Structural Balance Module

OECD-style structural balance built from four cyclically adjusted revenue
categories and one unemployment-sensitive expenditure item, expressed as a
share of potential GDP.

Revenue categories are always given in this order:
    t1  personal income tax
    t2  corporate income tax
    t3  social-assistance contributions
    t4  parafiscal levies

Unemployment may be a rate or a head count; only U*/U enters the formula,
so the two levels just need the same unit.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.errors import FiscalDomainError, NumericError
from ..utils.logging_config import get_logger

logger = get_logger("analytics.disaggregate")

REVENUE_CATEGORIES = (
    "personal_income_tax",
    "corporate_income_tax",
    "social_contributions",
    "parafiscal_levies",
)


class RevenueCategory(BaseModel):
    """Current revenue of one category and its output-gap elasticity."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    amount: float = Field(ge=0)
    elasticity: float = 0.0


class DisaggregateInputs(BaseModel):
    """Inputs for one period of the disaggregate method."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    revenues: tuple[RevenueCategory, ...]
    expenditure: float = Field(ge=0)
    expenditure_elasticity: float = 0.0
    x_term: float = 0.0
    y_current: float = Field(gt=0)
    y_potential: float = Field(gt=0)
    u_current: float = Field(gt=0)
    u_structural: float = Field(gt=0)

    @field_validator("revenues")
    @classmethod
    def _four_categories(cls, value: tuple[RevenueCategory, ...]) -> tuple[RevenueCategory, ...]:
        if len(value) != len(REVENUE_CATEGORIES):
            raise ValueError(
                f"exactly {len(REVENUE_CATEGORIES)} revenue categories required, got {len(value)}"
            )
        return value


class DisaggregateBreakdown(BaseModel):
    """Adjusted components, the currency-level numerator and the ratio to potential GDP."""

    model_config = ConfigDict(frozen=True)

    adjusted_revenues: tuple[float, ...]
    adjusted_expenditure: float
    x_term: float
    level: float
    ratio: float


def _finite_power(base: float, exponent: float, what: str) -> float:
    try:
        value = base**exponent
    except OverflowError as e:
        raise NumericError(f"{what} overflowed") from e
    if not math.isfinite(value):
        raise NumericError(f"{what} is not finite")
    return value


def adjust_revenue_category(
    t_i: float,
    elasticity: float,
    y_current: float,
    y_potential: float,
) -> float:
    """
    Cyclically adjust one revenue category: T_i * (Yp/Y)^elasticity.

    Raises:
        FiscalDomainError: Non-positive GDP level or negative revenue.
    """
    if not y_current > 0:
        raise FiscalDomainError(f"y_current must be positive, got {y_current}", field="y_current")
    if not y_potential > 0:
        raise FiscalDomainError(
            f"y_potential must be positive, got {y_potential}", field="y_potential"
        )
    if t_i < 0:
        raise FiscalDomainError(f"revenue amount must be non-negative, got {t_i}", field="t_i")

    return t_i * _finite_power(y_potential / y_current, elasticity, "revenue adjustment")


def adjust_expenditure_unemployment(
    c: float,
    elasticity: float,
    u_structural: float,
    u_current: float,
) -> float:
    """
    Adjust unemployment-sensitive expenditure: C * (U*/U)^elasticity.

    Raises:
        FiscalDomainError: Non-positive unemployment level or negative expenditure.
    """
    if not u_current > 0:
        raise FiscalDomainError(f"u_current must be positive, got {u_current}", field="u_current")
    if not u_structural > 0:
        raise FiscalDomainError(
            f"u_structural must be positive, got {u_structural}", field="u_structural"
        )
    if c < 0:
        raise FiscalDomainError(f"expenditure must be non-negative, got {c}", field="expenditure")

    return c * _finite_power(u_structural / u_current, elasticity, "expenditure adjustment")


def disaggregate_breakdown(inputs: DisaggregateInputs) -> DisaggregateBreakdown:
    """Evaluate every adjusted component and the resulting structural balance."""
    adjusted = tuple(
        adjust_revenue_category(
            category.amount, category.elasticity, inputs.y_current, inputs.y_potential
        )
        for category in inputs.revenues
    )
    adjusted_expenditure = adjust_expenditure_unemployment(
        inputs.expenditure,
        inputs.expenditure_elasticity,
        inputs.u_structural,
        inputs.u_current,
    )

    level = math.fsum(adjusted) - adjusted_expenditure + inputs.x_term
    ratio = level / inputs.y_potential
    if not math.isfinite(ratio):
        raise NumericError("disaggregate structural balance is not finite")

    logger.debug(f"Disaggregate structural balance: level={level!r}, ratio={ratio!r}")

    return DisaggregateBreakdown(
        adjusted_revenues=adjusted,
        adjusted_expenditure=adjusted_expenditure,
        x_term=inputs.x_term,
        level=level,
        ratio=ratio,
    )


def structural_balance_disaggregate(inputs: DisaggregateInputs) -> float:
    """Structural balance as a share of potential GDP."""
    return disaggregate_breakdown(inputs).ratio
