"""
Geodesics
=========

Cotangent curves (x(t), a(t)) with D_a a = 0:

    dx^i/dt = sum_j pi^{ji}(x) a_j
    da_i/dt = -sum_{j,k} Gamma^{jk}_i(x) a_j a_k
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.config import IntegratorConfig
from src.connection import ConnectionSymbols
from src.multivec import DimensionMismatchError, PoissonStructure
from src.transport.integrator import Trajectory, richardson_endpoint, rk4

logger = logging.getLogger(__name__)


@dataclass
class GeodesicResult:
    times: np.ndarray
    positions: np.ndarray
    covectors: np.ndarray
    steps: int

    @property
    def end_position(self) -> np.ndarray:
        return self.positions[-1]

    @property
    def end_covector(self) -> np.ndarray:
        return self.covectors[-1]

    def csv_rows(self) -> List[List[float]]:
        return [[float(t), *map(float, x), *map(float, a)]
                for t, x, a in zip(self.times, self.positions, self.covectors)]

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "samples": len(self.times),
            "end_time": float(self.times[-1]),
            "end_position": [float(v) for v in self.end_position],
            "end_covector": [float(v) for v in self.end_covector],
        }


def geodesic_rhs(pi: PoissonStructure, conn: ConnectionSymbols):
    m = pi.dim

    def f(t: float, y: np.ndarray) -> np.ndarray:
        x, a = y[:m], y[m:]
        dx = pi.at(x).T @ a
        da = -np.einsum("jki,j,k->i", conn.at(x), a, a)
        return np.concatenate([dx, da])

    return f


def integrate_geodesic(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    x0: Sequence[float],
    alpha0: Sequence[float],
    T: float = 1.0,
    cfg: IntegratorConfig = None,
) -> GeodesicResult:
    """
    RK4 geodesic from (x0, alpha0) over [0, T], sampled on the step grid.

    Raises:
        EvaluationError: with the failing t when pi or Gamma cannot be evaluated.
    """
    cfg = cfg or IntegratorConfig()
    m = pi.dim
    if conn.dim != m:
        raise DimensionMismatchError(m, conn.dim, "connection")
    if len(x0) != m or len(alpha0) != m:
        raise DimensionMismatchError(m, len(x0) if len(x0) != m else len(alpha0), "initial data")
    y0 = np.concatenate([np.asarray(x0, float), np.asarray(alpha0, float)])
    traj: Trajectory = rk4(geodesic_rhs(pi, conn), y0, 0.0, T, cfg.steps, record=True)
    logger.debug(f"geodesic: {cfg.steps} steps, endpoint {traj.endpoint[:m]}")
    return GeodesicResult(traj.times, traj.states[:, :m], traj.states[:, m:], cfg.steps)


def geodesic_endpoint_oracle(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    x0: Sequence[float],
    alpha0: Sequence[float],
    T: float = 1.0,
    cfg: IntegratorConfig = None,
) -> np.ndarray:
    """Richardson-extrapolated (x, a) endpoint for pinning reference values."""
    cfg = cfg or IntegratorConfig()
    y0 = np.concatenate([np.asarray(x0, float), np.asarray(alpha0, float)])
    return richardson_endpoint(geodesic_rhs(pi, conn), y0, 0.0, T, cfg.steps)
