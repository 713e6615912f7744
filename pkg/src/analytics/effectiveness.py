"""
Stabiliser Effectiveness Module

Effectiveness of an automatic stabiliser is E = -K * B, the signed product of
its rate of action K and base of action B. Along an indifference curve E is
constant and dK/dB = -K/B; the coupling K = c/B keeps E = -c.

The base of action follows the logistic equation dB/dt = B(1 - B) with the
target value fixed at 1. Time is measured in calendar years, so every
exponential is evaluated in shifted form e^(t - t0): e^2014 does not fit in
a double.
"""

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, optimize

from ..utils.errors import FiscalDomainError, NumericError, SingularityError
from ..utils.logging_config import get_logger

logger = get_logger("analytics.effectiveness")

DEFAULT_ODE_TOL = 1e-8
BLOW_UP_MAGNITUDE = 1e12
MIN_OPTIMUM_SAMPLES = 5
CURVATURE_TOL = 1e-9
QUADRATURE_ABS_TOL = 1e-9

OptimumKind = Literal["maximum", "minimum", "inconclusive"]
RateInput = float | np.ndarray | Callable[[np.ndarray, np.ndarray], np.ndarray]


class LogisticSolution(BaseModel):
    """Initial condition (t0, x0) of the logistic base-of-action equation."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    t0: float
    x0: float = Field(ge=0)

    @property
    def c_const(self) -> float:
        """
        Integration constant C of B(t) = e^(t-t0) / (C + e^(t-t0)).

        Raises:
            FiscalDomainError: x0 = 0 (the zero solution has no finite C).
        """
        if self.x0 == 0:
            raise FiscalDomainError("the zero solution has no finite constant", field="x0")
        return (1.0 - self.x0) / self.x0


@dataclass(frozen=True)
class LogisticTrajectory:
    """Sampled solution of the logistic equation."""

    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class EffectivenessPath:
    """Sampled rate K(t), base B(t) and effectiveness E(t) = -K(t) B(t)."""

    times: np.ndarray
    base: np.ndarray
    rate: np.ndarray
    effectiveness: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.times)
        if not (len(self.base) == len(self.rate) == len(self.effectiveness) == n):
            raise FiscalDomainError("path arrays must have equal lengths")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise FiscalDomainError("times must be strictly increasing", field="times")
        if not np.all(self.base > 0):
            raise FiscalDomainError("base samples must be positive", field="base")

        expected = -self.rate * self.base
        scale = np.maximum(np.abs(expected), np.finfo(float).tiny)
        if np.any(np.abs(self.effectiveness - expected) > 1e-12 * scale):
            raise FiscalDomainError("effectiveness must equal -rate * base", field="effectiveness")

    def rows(self) -> list[dict[str, float]]:
        return [
            {"t": float(t), "B": float(b), "K": float(k), "E": float(e)}
            for t, b, k, e in zip(
                self.times, self.base, self.rate, self.effectiveness, strict=True
            )
        ]


@dataclass(frozen=True)
class Optimum:
    time: float
    value: float
    classification: OptimumKind


@dataclass
class OptimumSearch:
    """Located optima of E(t); degenerate when E is constant on the grid."""

    optima: list[Optimum] = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "degenerate": self.degenerate,
            "optima": [
                {"time": o.time, "E": o.value, "classification": o.classification}
                for o in self.optima
            ],
        }


@dataclass
class OptimalityReport:
    """Per-sample evaluation of the closed-form optimality conditions."""

    times: np.ndarray
    rate: np.ndarray
    rate_condition: np.ndarray
    rate_condition_holds: np.ndarray
    second_derivative: np.ndarray
    second_derivative_negative: np.ndarray
    fd_second_derivative: np.ndarray
    fd_second_derivative_negative: np.ndarray

    def rows(self) -> list[dict]:
        return [
            {
                "t": float(self.times[i]),
                "K": float(self.rate[i]),
                "K_condition": float(self.rate_condition[i]),
                "K_condition_holds": bool(self.rate_condition_holds[i]),
                "d2E": float(self.second_derivative[i]),
                "d2E_negative": bool(self.second_derivative_negative[i]),
                "d2E_fd": float(self.fd_second_derivative[i]),
                "d2E_fd_negative": bool(self.fd_second_derivative_negative[i]),
            }
            for i in range(len(self.times))
        ]


# =============================================================================
# Point relations
# =============================================================================


def effectiveness(k: float, b: float) -> float:
    """E = -K * B."""
    return -k * b


def marginal_rate_substitution(k: float, b: float) -> float:
    """Slope dK/dB = -K/B of the indifference curve through (B, K)."""
    if b == 0:
        raise FiscalDomainError("base of action must be non-zero", field="b")
    return -k / b


def rate_from_base(c: float, b: float) -> float:
    """Rate that keeps K * B = c on the indifference curve."""
    if c == 0:
        raise FiscalDomainError("coupling constant must be non-zero", field="c")
    if b == 0:
        raise FiscalDomainError("base of action must be non-zero", field="b")
    return c / b


def coupled_rate_samples(c: float, base: np.ndarray) -> np.ndarray:
    """Vectorised rate_from_base over a sampled base."""
    base = np.asarray(base, dtype=float)
    if c == 0:
        raise FiscalDomainError("coupling constant must be non-zero", field="c")
    if np.any(base == 0):
        raise FiscalDomainError("base of action must be non-zero", field="b")
    return c / base


def effectiveness_logistic_rhs(e: float) -> float:
    """Logistic growth rate E(1 - E); maximal at E = 1/2."""
    return e * (1.0 - e)


# =============================================================================
# Logistic base of action
# =============================================================================


def _pole_offset(x0: float) -> float | None:
    """Offset t - t0 at which 1 - x0 + x0 e^(t-t0) vanishes (only for x0 > 1)."""
    if x0 <= 1:
        return None
    return math.log((x0 - 1.0) / x0)


def base_logistic_analytic(init: LogisticSolution, t: float | np.ndarray) -> float | np.ndarray:
    """
    Closed-form solution of dB/dt = B(1 - B) through (t0, x0).

    B(t) = x0 e^(t-t0) / (1 - x0 + x0 e^(t-t0)), evaluated as
    x0 / (x0 + (1 - x0) e^-(t-t0)) for t >= t0 so large horizons do not overflow.

    Raises:
        SingularityError: x0 > 1 and t lies at or before the pole.
    """
    tau = np.asarray(t, dtype=float) - init.t0
    x0 = init.x0

    if x0 == 0.0 or x0 == 1.0:
        result = np.full_like(tau, x0)
    else:
        pole = _pole_offset(x0)
        if pole is not None and np.any(tau <= pole):
            blow_up = init.t0 + pole
            raise SingularityError(
                f"logistic solution through x0={x0} blows up at t={blow_up!r}",
                blow_up_time=blow_up,
            )

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            forward = x0 / (x0 + (1.0 - x0) * np.exp(-tau))
            growth = np.exp(tau)
            backward = x0 * growth / (1.0 - x0 + x0 * growth)
        result = np.where(tau >= 0, forward, backward)

    if not np.all(np.isfinite(result)):
        raise NumericError("logistic solution is not finite on the requested times")

    if result.ndim == 0:
        return float(result)
    return result


def _logistic_rhs(x: float) -> float:
    return x * (1.0 - x)


def _rk4_step(x: float, h: float) -> float:
    k1 = _logistic_rhs(x)
    k2 = _logistic_rhs(x + 0.5 * h * k1)
    k3 = _logistic_rhs(x + 0.5 * h * k2)
    k4 = _logistic_rhs(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(x: float, t_start: float, t_end: float, h: float, tol: float) -> tuple[float, float]:
    """
    Integrate from t_start to t_end with classical RK4 and step doubling.

    Each trial step is compared with two half steps; the step is halved until
    the two refinements agree within tol relative, then the Richardson
    combination is accepted.

    Returns:
        (value at t_end, suggested next step)
    """
    t = t_start
    min_step = 1e-15 * max(1.0, abs(t_end))

    while t < t_end:
        remaining = t_end - t
        trial = min(h, remaining)
        full = _rk4_step(x, trial)
        half = _rk4_step(_rk4_step(x, 0.5 * trial), 0.5 * trial)

        if not math.isfinite(half) or abs(half) > BLOW_UP_MAGNITUDE:
            if trial <= min_step:
                raise SingularityError(
                    f"numeric logistic solution exceeded {BLOW_UP_MAGNITUDE:g} near t={t!r}",
                    blow_up_time=t,
                )
            h = 0.5 * trial
            continue

        err = abs(half - full) / 15.0
        allowed = tol * max(abs(half), 1e-300)
        if err > allowed:
            if trial <= min_step:
                raise NumericError(f"step size underflow near t={t!r}")
            h = 0.5 * trial
            continue

        x = half + (half - full) / 15.0
        t = t_end if trial >= remaining else t + trial
        if trial == h:
            growth = 2.0 if err == 0 else 0.9 * (allowed / err) ** 0.2
            h = trial * min(2.0, max(growth, 1.0))

    return x, h


def sampling_grid(t0: float, t1: float, step: float) -> np.ndarray:
    """Times t0, t0 + step, ... up to t1; the last interval may be shorter than step."""
    if not t1 > t0:
        raise FiscalDomainError("t1 must be greater than t0", field="t1")
    if not step > 0:
        raise FiscalDomainError("step must be positive", field="step")
    n = int(math.ceil((t1 - t0) / step - 1e-9))
    times = t0 + step * np.arange(n + 1, dtype=float)
    times[-1] = t1
    return times


def base_logistic_numeric(
    x0: float,
    t0: float,
    t1: float,
    step: float,
    tol: float = DEFAULT_ODE_TOL,
) -> LogisticTrajectory:
    """
    Numeric solution of dB/dt = B(1 - B) sampled every `step` from t0 to t1.

    Between output samples the integrator adapts its own sub-steps; local
    agreement is held two orders of magnitude below tol so the sampled
    values stay within tol of the exact solution.

    Raises:
        FiscalDomainError: Invalid horizon, step or initial value.
        SingularityError: Solution magnitude exceeds 1e12.
    """
    if not x0 >= 0 or not math.isfinite(x0):
        raise FiscalDomainError(f"x0 must be finite and non-negative, got {x0}", field="x0")
    if abs(x0) > BLOW_UP_MAGNITUDE:
        raise SingularityError(f"initial value exceeds {BLOW_UP_MAGNITUDE:g}", blow_up_time=t0)
    if not t1 > t0:
        raise FiscalDomainError("t1 must be greater than t0", field="t1")
    if not step > 0:
        raise FiscalDomainError("step must be positive", field="step")

    times = sampling_grid(t0, t1, step)
    values = np.empty_like(times)
    values[0] = x0

    local_tol = tol * 1e-2
    x, h = x0, step
    for i in range(1, len(times)):
        x, h = _advance(x, float(times[i - 1]), float(times[i]), h, local_tol)
        values[i] = x

    logger.debug(f"Integrated logistic from {t0} to {t1}: B(t1)={values[-1]!r}")
    return LogisticTrajectory(times=times, values=values)


# =============================================================================
# Effectiveness trajectories
# =============================================================================


def _rate_samples(k_samples: RateInput, times: np.ndarray, base: np.ndarray) -> np.ndarray:
    if callable(k_samples):
        rate = np.asarray(k_samples(times, base), dtype=float)
    elif np.ndim(k_samples) == 0:
        rate = np.full_like(times, float(k_samples))
    else:
        rate = np.asarray(k_samples, dtype=float)

    if rate.shape != times.shape:
        raise FiscalDomainError(
            f"rate samples have shape {rate.shape}, grid has {times.shape}", field="k_samples"
        )
    return rate


def effectiveness_trajectory(
    k_samples: RateInput,
    init: LogisticSolution,
    grid: np.ndarray,
) -> EffectivenessPath:
    """
    Combine a rate of action with the logistic base of action.

    Args:
        k_samples: Rate per grid point, a constant, or a callable
            (times, base) -> rate, e.g. the c/B coupling.
        init: Initial condition of the base of action.
        grid: Strictly increasing sample times.

    Returns:
        EffectivenessPath with E(t) = -K(t) B(t).
    """
    times = np.asarray(grid, dtype=float)
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise FiscalDomainError("grid must be strictly increasing", field="grid")

    base = np.asarray(base_logistic_analytic(init, times), dtype=float)
    rate = _rate_samples(k_samples, times, base)

    return EffectivenessPath(times=times, base=base, rate=rate, effectiveness=-rate * base)


def optimum_search(path: EffectivenessPath, curvature_tol: float = CURVATURE_TOL) -> OptimumSearch:
    """
    Locate interior optima of E(t) on the sampled path.

    Roots of the finite-difference dE/dt are bracketed by sign changes and
    refined by bisection on its piecewise-linear interpolant. The finite
    difference d2E/dt2 at the root decides the kind: a maximum needs
    d2E/dt2 < 0 and dE/dt going from + to -, a minimum the opposite;
    anything else, including |d2E/dt2| < curvature_tol, is inconclusive.

    Raises:
        FiscalDomainError: Fewer than five samples.
    """
    t = path.times
    e = path.effectiveness
    if len(t) < MIN_OPTIMUM_SAMPLES:
        raise FiscalDomainError(
            f"optimum search needs at least {MIN_OPTIMUM_SAMPLES} samples, got {len(t)}",
            field="path",
        )

    if np.ptp(e) <= 1e-9 * max(1.0, float(np.max(np.abs(e)))):
        logger.info("Effectiveness is constant on the grid; no isolated optima")
        return OptimumSearch(degenerate=True)

    d1 = np.gradient(e, t, edge_order=2)
    d2 = np.gradient(d1, t, edge_order=2)

    def slope(s: float) -> float:
        return float(np.interp(s, t, d1))

    optima: list[Optimum] = []
    for i in range(len(t) - 1):
        if d1[i] == 0.0:
            if i == 0:
                continue
            root, before, after = float(t[i]), d1[i - 1], d1[i + 1]
        elif d1[i] * d1[i + 1] < 0:
            root = float(optimize.bisect(slope, t[i], t[i + 1], xtol=1e-12 * max(1.0, abs(t[i]))))
            before, after = d1[i], d1[i + 1]
        else:
            continue

        curvature = float(np.interp(root, t, d2))
        kind: OptimumKind = "inconclusive"
        if abs(curvature) >= curvature_tol:
            if curvature < 0 and before > 0 > after:
                kind = "maximum"
            elif curvature > 0 and before < 0 < after:
                kind = "minimum"

        optima.append(Optimum(time=root, value=float(np.interp(root, t, e)), classification=kind))

    logger.debug(f"Optimum search found {len(optima)} stationary points")
    return OptimumSearch(optima=optima)


def _quad_checked(func: Callable[[float], float], a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(func, a, b, epsabs=QUADRATURE_ABS_TOL, limit=200)
        except integrate.IntegrationWarning as e:
            raise NumericError(f"quadrature did not converge on [{a}, {b}]: {e}") from e
    if not math.isfinite(value):
        raise NumericError(f"quadrature is not finite on [{a}, {b}]")
    return value


def integral_rate_condition(c_const: float, grid: np.ndarray) -> np.ndarray:
    """
    Rate satisfying K(t) = exp(-integral from t0 of C / (C + e^(s-t0)) ds).

    t0 is the first grid point and C the time-shifted logistic constant. The
    integrand is 1 - B(s), evaluated without forming e^(s-t0).
    """
    times = np.asarray(grid, dtype=float)
    t0 = float(times[0])

    def integrand(s: float) -> float:
        w = c_const * math.exp(t0 - s)
        return w / (1.0 + w)

    pieces = [_quad_checked(integrand, float(a), float(b)) for a, b in zip(times[:-1], times[1:])]
    cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
    return np.exp(-cumulative)


def optimality_condition_check(
    k_samples: np.ndarray,
    c_const: float,
    grid: np.ndarray,
    rtol: float = 1e-6,
) -> OptimalityReport:
    """
    Evaluate the closed-form optimality conditions sample by sample.

    (a) whether K matches the integral rate condition (adaptive quadrature);
    (b) the sign of d2E/dt2 = -(K'' B + 2 K' B' + K B'') for E = -K B with
        B = 1/(1 + C e^(t0-t)), B' = B(1 - B) and B'' = B'(1 - 2B). The
        published rational expression repeats K' where K'' belongs; the
        corrected form is evaluated.
    A finite-difference d2E/dt2 of the sampled E is reported alongside.

    Raises:
        FiscalDomainError: Grid not strictly increasing or too short.
        NumericError: Quadrature failed to converge.
    """
    t = np.asarray(grid, dtype=float)
    k = np.asarray(k_samples, dtype=float)
    if len(t) < 3:
        raise FiscalDomainError("optimality check needs at least 3 samples", field="grid")
    if not np.all(np.diff(t) > 0):
        raise FiscalDomainError("grid must be strictly increasing", field="grid")
    if k.shape != t.shape:
        raise FiscalDomainError("rate samples must match the grid", field="k_samples")

    logger.warning(
        "Second-derivative condition uses K'' where the published expression repeats K'"
    )

    condition = integral_rate_condition(c_const, t)
    holds = np.abs(k - condition) <= rtol * np.maximum(np.abs(condition), 1e-300)

    base = 1.0 / (1.0 + c_const * np.exp(t[0] - t))
    b1 = base * (1.0 - base)
    b2 = b1 * (1.0 - 2.0 * base)
    k1 = np.gradient(k, t, edge_order=2)
    k2 = np.gradient(k1, t, edge_order=2)

    second = -(k2 * base + 2.0 * k1 * b1 + k * b2)

    e = -k * base
    fd_second = np.gradient(np.gradient(e, t, edge_order=2), t, edge_order=2)

    return OptimalityReport(
        times=t,
        rate=k,
        rate_condition=condition,
        rate_condition_holds=holds,
        second_derivative=second,
        second_derivative_negative=second < 0,
        fd_second_derivative=fd_second,
        fd_second_derivative_negative=fd_second < 0,
    )
