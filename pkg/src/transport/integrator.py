"""
Fixed-Step RK4
==============

Classical fourth-order Runge-Kutta on numpy state arrays. Evaluation
failures inside the right-hand side are re-raised with the failing t.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.integrate import simpson

from src.expr import EvaluationError

logger = logging.getLogger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class Trajectory:
    """Samples of an integration on the step grid, endpoint included."""
    times: np.ndarray
    states: np.ndarray
    steps: int

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]


def _call(f: RHS, t: float, y: np.ndarray) -> np.ndarray:
    try:
        return f(t, y)
    except EvaluationError as e:
        raise e.at(float(t)) from None


def rk4(f: RHS, y0, t0: float = 0.0, t1: float = 1.0, steps: int = 1000, record: bool = False) -> Trajectory:
    """Integrate y' = f(t, y) from t0 to t1 in `steps` equal steps."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / steps
    times: List[float] = [t0]
    states: List[np.ndarray] = [y.copy()]
    for n in range(steps):
        t = t0 + n * h
        k1 = _call(f, t, y)
        k2 = _call(f, t + h / 2, y + h / 2 * k1)
        k3 = _call(f, t + h / 2, y + h / 2 * k2)
        k4 = _call(f, t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise EvaluationError("non-finite state", t + h)
        if record:
            times.append(t + h)
            states.append(y.copy())
    if not record:
        times.append(t1)
        states.append(y)
    return Trajectory(np.array(times), np.array(states), steps)


def richardson_endpoint(f: RHS, y0, t0: float = 0.0, t1: float = 1.0, steps: int = 1000) -> np.ndarray:
    """Endpoint extrapolated from step sizes h and h/2 (fourth-order error cancellation)."""
    coarse = rk4(f, y0, t0, t1, steps).endpoint
    fine = rk4(f, y0, t0, t1, 2 * steps).endpoint
    return fine + (fine - coarse) / 15.0


def quadrature(g: Callable[[float], float], steps: int = 1000) -> float:
    """Composite Simpson's rule of g over [0, 1] on the step grid."""
    n = steps if steps % 2 == 0 else steps + 1
    ts = np.linspace(0.0, 1.0, n + 1)
    values = np.empty_like(ts)
    for i, t in enumerate(ts):
        try:
            values[i] = g(float(t))
        except EvaluationError as e:
            raise e.at(float(t)) from None
    return float(simpson(values, x=ts))
