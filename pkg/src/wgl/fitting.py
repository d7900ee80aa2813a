"""Log-log least squares for power-law sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDesign, InsufficientSweep


@dataclass(frozen=True)
class PowerFit:
    """``log y = intercept + sum_i slopes[i] * log x_i``."""

    slopes: tuple
    intercept: float
    r2: float
    points: int


def _r2(y: np.ndarray, pred: np.ndarray) -> float:
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-300:
        return 1.0 if ss_res <= 1e-24 else 0.0
    return 1.0 - ss_res / ss_tot


def _distinct(x: np.ndarray) -> int:
    return np.unique(np.round(x, 12)).size


def fit_power(x, y, min_points: int = 4, axis: str = "x") -> PowerFit:
    """Slope of ``log y`` against ``log x``.

    Raises
    ------
    InsufficientSweep
        If ``x`` takes fewer than ``min_points`` distinct values.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same shape")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    k = _distinct(lx)
    if k < min_points:
        raise InsufficientSweep(f"{axis} axis has {k} distinct values, need {min_points}")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return PowerFit((float(coef[0]),), float(coef[1]), _r2(ly, A @ coef), int(x.size))


def fit_power2(x1, x2, y, min_points: int = 4, axes=("T", "N")) -> PowerFit:
    """Bivariate fit ``log y = c + a log x1 + b log x2``.

    Raises
    ------
    InsufficientSweep
        If either axis has fewer than ``min_points`` distinct values.
    DegenerateDesign
        If the two regressors are collinear.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x1 <= 0) or np.any(x2 <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    l1, l2, ly = np.log(x1), np.log(x2), np.log(y)
    for name, lx in zip(axes, (l1, l2)):
        k = _distinct(lx)
        if k < min_points:
            raise InsufficientSweep(f"{name} axis has {k} distinct values, need {min_points}")
    A = np.column_stack([l1, l2, np.ones_like(l1)])
    if np.linalg.matrix_rank(A, tol=1e-9 * max(1.0, np.abs(A).max())) < 3:
        raise DegenerateDesign("regressors are collinear")
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return PowerFit((float(coef[0]), float(coef[1])), float(coef[2]), _r2(ly, A @ coef), int(y.size))
