"""
Finite-difference helpers for checking analytic derivatives.
"""

from collections.abc import Callable

import numpy as np


def _steps(x: np.ndarray, rel_step: float) -> np.ndarray:
    return rel_step * np.maximum(np.abs(x), 1.0)


def central_gradient(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    rel_step: float = 1e-6,
) -> np.ndarray:
    """Central-difference gradient of a scalar function, step scaled by max(|x|, 1)."""
    x0 = np.asarray(x0, dtype=float)
    h = _steps(x0, rel_step)
    grad = np.empty_like(x0)
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = h[i]
        grad[i] = (f(x0 + e) - f(x0 - e)) / (2.0 * h[i])
    return grad


def central_hessian(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    rel_step: float = 1e-4,
) -> np.ndarray:
    """Second-order central-difference Hessian, symmetrized."""
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    h = _steps(x0, rel_step)
    f0 = f(x0)
    hess = np.zeros((dim, dim))
    E = np.diag(h)

    for i in range(dim):
        for j in range(i, dim):
            if i == j:
                value = (f(x0 + E[i]) - 2.0 * f0 + f(x0 - E[i])) / (h[i] * h[i])
            else:
                value = (
                    f(x0 + E[i] + E[j])
                    - f(x0 + E[i] - E[j])
                    - f(x0 - E[i] + E[j])
                    + f(x0 - E[i] - E[j])
                ) / (4.0 * h[i] * h[j])
            hess[i, j] = value
            hess[j, i] = value

    return hess


def relative_error(approx: np.ndarray, exact: np.ndarray, floor: float = 1e-12) -> float:
    """Largest componentwise error relative to max(|exact|, floor)."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    scale = np.maximum(np.abs(exact), floor)
    return float(np.max(np.abs(approx - exact) / scale))
