"""
GDP Volatility Module

Quantitative equilibrium between the output deviation and automatic
stabiliser action:

    |Y - Yp| = K * B * ||N| - |M||,   N = |Va - Vp|,  M = |Ca - Cp|

The right-hand side is the volatility function Vol = K*^3 * b^3 * |N - M|
written in the cube-root coordinates K* = K^(1/3), b = B^(1/3). Derivatives
are taken in (K*, b). At N = M the function vanishes identically and the
absolute value has a kink, so derivatives there are reported as
non-differentiable instead of picking a subgradient.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.errors import FiscalDomainError, NonDifferentiableError
from ..utils.logging_config import get_logger
from .numerics import central_gradient, relative_error

logger = get_logger("analytics.volatility")

DEFAULT_STATIONARITY_TOL = 1e-9

SecondDifferentialSign = Literal["positive", "zero", "negative", "indefinite"]


class VolParams(BaseModel):
    """Rate K and base B of stabiliser action with the revenue/expenditure gaps N and M."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    k_rate: float = Field(ge=0)
    b_base: float = Field(ge=0)
    n_term: float = Field(ge=0)
    m_term: float = Field(ge=0)

    @classmethod
    def from_components(
        cls,
        k_rate: float,
        b_base: float,
        va: float,
        vp: float,
        ca: float,
        cp: float,
    ) -> "VolParams":
        """Build from revenue and expenditure at current (a) and potential (p) GDP."""
        return cls(k_rate=k_rate, b_base=b_base, n_term=abs(va - vp), m_term=abs(ca - cp))

    @classmethod
    def from_cube_roots(cls, k_star: float, b: float, n_term: float, m_term: float) -> "VolParams":
        """Build from the cube-root coordinates K* and b."""
        return cls(k_rate=k_star**3, b_base=b**3, n_term=n_term, m_term=m_term)

    @property
    def k_star(self) -> float:
        return float(np.cbrt(self.k_rate))

    @property
    def b_root(self) -> float:
        return float(np.cbrt(self.b_base))

    @property
    def spread(self) -> float:
        """|N - M|."""
        return abs(self.n_term - self.m_term)


@dataclass
class StationaryReport:
    """First- and second-order information of Vol at one point."""

    gradient: tuple[float, float]
    hessian: tuple[tuple[float, float], tuple[float, float]]
    is_stationary: bool
    second_differential_sign: SecondDifferentialSign
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "gradient": list(self.gradient),
            "hessian": [list(row) for row in self.hessian],
            "is_stationary": self.is_stationary,
            "second_differential_sign": self.second_differential_sign,
            "degenerate": self.degenerate,
        }


def vol_value(p: VolParams) -> float:
    """Volatility function K * B * |N - M|."""
    return p.k_rate * p.b_base * p.spread


def vol_value_cube_roots(k_star: float, b: float, n_term: float, m_term: float) -> float:
    """Volatility function evaluated directly in (K*, b) coordinates."""
    return k_star**3 * b**3 * abs(n_term - m_term)


def stabilisers_required(p: VolParams) -> bool:
    """Automatic stabilisers are only needed when the revenue and expenditure gaps differ."""
    return p.n_term != p.m_term


def equilibrium_residual(y_current: float, y_potential: float, p: VolParams) -> float:
    """
    |Y - Yp| - K * B * ||N| - |M||; zero when the equilibrium identity holds.
    """
    return abs(y_current - y_potential) - p.k_rate * p.b_base * abs(
        abs(p.n_term) - abs(p.m_term)
    )


def _require_differentiable(p: VolParams) -> None:
    if p.n_term == p.m_term:
        raise NonDifferentiableError(
            "Vol is not differentiable at N = M (it is identically zero there); "
            "use vol_value instead",
            field="m_term",
        )


def vol_gradient(p: VolParams) -> tuple[float, float]:
    """
    Partial derivatives of Vol with respect to (K*, b).

    Returns:
        (3 K*^2 b^3 |N-M|, 3 K*^3 b^2 |N-M|)

    Raises:
        NonDifferentiableError: N = M.
    """
    _require_differentiable(p)
    k, b, d = p.k_star, p.b_root, p.spread
    return 3.0 * k * k * b**3 * d, 3.0 * k**3 * b * b * d


def vol_hessian(p: VolParams) -> np.ndarray:
    """Analytic Hessian of Vol in (K*, b); the mixed partials are the same expression."""
    _require_differentiable(p)
    k, b, d = p.k_star, p.b_root, p.spread
    mixed = 9.0 * k * k * b * b * d
    return np.array(
        [
            [6.0 * k * b**3 * d, mixed],
            [mixed, 6.0 * k**3 * b * d],
        ]
    )


def vol_gradient_chain_rule(
    p: VolParams,
    dvol_dt: float,
    dk_dt: float,
    db_dt: float,
) -> tuple[float, float]:
    """
    Chain-rule reading of the published gradient system.

    dVol/dK* = dVol/dt * (dK*/dt)^-1 and likewise for b. This agrees with
    vol_gradient only along trajectories where the other coordinate is held
    fixed; it is kept next to the direct form for comparison.

    Raises:
        FiscalDomainError: A time derivative of K* or b is zero.
    """
    if dk_dt == 0:
        raise FiscalDomainError("dk_dt must be non-zero", field="dk_dt")
    if db_dt == 0:
        raise FiscalDomainError("db_dt must be non-zero", field="db_dt")

    logger.warning(
        "Chain-rule gradient form used; it differs from direct differentiation of Vol"
    )
    return dvol_dt / dk_dt, dvol_dt / db_dt


def vol_gradient_printed_form(p: VolParams, dvol_dt: float) -> tuple[float, float]:
    """
    The printed multiplier reading: dVol/dt * 3K*^2 and dVol/dt * 3b^2.

    Conflicts with both the inverse-derivative reading and direct differentiation.
    """
    k, b = p.k_star, p.b_root
    return dvol_dt * 3.0 * k * k, dvol_dt * 3.0 * b * b


def _definiteness(hessian: np.ndarray, tol: float) -> SecondDifferentialSign:
    eigenvalues = np.linalg.eigvalsh(hessian)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    cutoff = tol * scale

    if np.all(np.abs(eigenvalues) <= cutoff):
        return "zero"
    if np.all(eigenvalues >= -cutoff):
        return "positive"
    if np.all(eigenvalues <= cutoff):
        return "negative"
    return "indefinite"


def classify_stationary(
    p: VolParams,
    tol: float = DEFAULT_STATIONARITY_TOL,
) -> StationaryReport:
    """
    Gradient, Hessian and stationarity classification of Vol at p.

    A point is stationary when both partials are within tol of zero. The
    sign of the second differential follows the Hessian's eigenvalues;
    semidefinite non-zero Hessians report their non-zero sign. The origin
    K* = b = 0 is stationary with a vanishing Hessian, so it reports "zero".
    At N = M the report is flagged degenerate (Vol is identically zero).
    """
    if p.n_term == p.m_term:
        logger.debug("Vol is identically zero at N = M; degenerate report")
        return StationaryReport(
            gradient=(0.0, 0.0),
            hessian=((0.0, 0.0), (0.0, 0.0)),
            is_stationary=True,
            second_differential_sign="zero",
            degenerate=True,
        )

    gradient = vol_gradient(p)
    hessian = vol_hessian(p)
    is_stationary = all(abs(g) <= tol for g in gradient)

    return StationaryReport(
        gradient=gradient,
        hessian=(
            (float(hessian[0, 0]), float(hessian[0, 1])),
            (float(hessian[1, 0]), float(hessian[1, 1])),
        ),
        is_stationary=is_stationary,
        second_differential_sign=_definiteness(hessian, tol),
    )


def automatic_type_conditions(
    p: VolParams,
    tol: float = DEFAULT_STATIONARITY_TOL,
) -> dict[str, bool]:
    """
    Check the two conditions an automatic stabiliser has to meet at p.

    Returns:
        Dict with `stationary_at_origin` (p sits at K* = b = 0 where the
        gradient vanishes), `second_differential_positive` (computed, not
        assumed) and `automatic_type` (both hold).
    """
    report = classify_stationary(p, tol)
    at_origin = p.k_rate == 0 and p.b_base == 0 and report.is_stationary
    positive = report.second_differential_sign == "positive"
    return {
        "stationary_at_origin": at_origin,
        "second_differential_positive": positive,
        "automatic_type": at_origin and positive,
    }


def gradient_check(p: VolParams, rel_step: float = 1e-6) -> float:
    """Relative error between vol_gradient and central finite differences in (K*, b)."""
    exact = np.array(vol_gradient(p))
    n, m = p.n_term, p.m_term

    def f(x: np.ndarray) -> float:
        return vol_value_cube_roots(x[0], x[1], n, m)

    approx = central_gradient(f, np.array([p.k_star, p.b_root]), rel_step=rel_step)
    error = relative_error(approx, exact)
    if not math.isfinite(error):
        return math.inf
    return error
