"""
Parallel Transport and Holonomy
===============================

Transport of covectors along cotangent paths (D_(gamma, a) b = 0):

    db/dt = -M(a(t)) b,    M(a)[j, l] = sum_k a_k Gamma^{kl}_j(gamma(t))

the linear holonomy of closed cotangent loops, the zero-leaf nonlinear
holonomy flow u' = #_u a(t), and line integrals of vector fields along
cotangent paths.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from src.config import IntegratorConfig
from src.connection import ConnectionSymbols, transport_generator
from src.expr import Expr, evaluate
from src.multivec import DimensionMismatchError, MultiVectorField, PoissonStructure
from src.transport.integrator import quadrature, rk4
from src.transport.paths import (
    CLOSURE_TOL,
    Path,
    PathError,
    require_cotangent,
    is_closed,
)

logger = logging.getLogger(__name__)

FLOW_FD_STEP = 1e-5
ZERO_LEAF_TOL = 1e-12


@dataclass
class HolonomyResult:
    """Transport map on covector components around a cotangent loop."""
    matrix: np.ndarray
    determinant: float
    path_residual: float
    steps: int
    conormal_determinant: float = 1.0
    conormal_dim: int = 0

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "determinant": float(self.determinant),
            "conormal_determinant": float(self.conormal_determinant),
            "conormal_dim": self.conormal_dim,
            "path_residual": float(self.path_residual),
            "steps": self.steps,
        }


@dataclass
class FlowResult:
    """Time-1 map of the zero-leaf holonomy flow and its Jacobian."""
    start: np.ndarray
    endpoint: np.ndarray
    jacobian: np.ndarray

    def to_dict(self) -> dict:
        return {
            "start": [float(v) for v in self.start],
            "endpoint": [float(v) for v in self.endpoint],
            "jacobian": [[float(v) for v in row] for row in self.jacobian],
        }


def _check(pi: PoissonStructure, conn: Optional[ConnectionSymbols], path: Path) -> None:
    if conn is not None and conn.dim != pi.dim:
        raise DimensionMismatchError(pi.dim, conn.dim, "connection")
    if path.dim != pi.dim:
        raise DimensionMismatchError(pi.dim, path.dim, "path")


def transport_matrix(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    path: Path,
    cfg: IntegratorConfig = None,
) -> np.ndarray:
    """Matrix H with b(1) = H b(0) for covector transport along each leg in turn."""
    cfg = cfg or IntegratorConfig()
    _check(pi, conn, path)
    m = pi.dim
    h = np.eye(m)
    for leg in path.legs:
        def rhs(t: float, y: np.ndarray, leg=leg) -> np.ndarray:
            gen = transport_generator(conn.at(leg.position(t)), leg.covector(t))
            return (-gen @ y.reshape(m, m)).ravel()

        step = rk4(rhs, np.eye(m).ravel(), 0.0, 1.0, cfg.steps).endpoint.reshape(m, m)
        h = step @ h
    return h


def parallel_transport_covector(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    path: Path,
    beta0: Sequence[float],
    cfg: IntegratorConfig = None,
    tol: float = 1e-8,
) -> np.ndarray:
    """
    Covector at t = 1 obtained by parallel transport of beta0 along the path.

    Raises:
        PathError: compatibility residual above tol.
    """
    cfg = cfg or IntegratorConfig()
    _check(pi, conn, path)
    require_cotangent(pi, path, tol)
    m = pi.dim
    beta = np.asarray(beta0, dtype=float)
    if beta.shape != (m,):
        raise DimensionMismatchError(m, beta.size, "covector")
    for leg in path.legs:
        def rhs(t: float, y: np.ndarray, leg=leg) -> np.ndarray:
            return -transport_generator(conn.at(leg.position(t)), leg.covector(t)) @ y

        beta = rk4(rhs, beta, 0.0, 1.0, cfg.steps).endpoint
    return beta


def parallel_transport_vector(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    path: Path,
    v0: Sequence[float],
    cfg: IntegratorConfig = None,
    tol: float = 1e-8,
) -> np.ndarray:
    """Vector transport, dual to covector transport: v(1) = H^{-T} v(0)."""
    require_cotangent(pi, path, tol)
    h = transport_matrix(pi, conn, path, cfg)
    return np.linalg.solve(h.T, np.asarray(v0, dtype=float))


def conormal_restriction(pi: PoissonStructure, point: Sequence[float], matrix: np.ndarray):
    """Restrict a covector map to ker # at a point; returns (block, basis)."""
    basis = null_space(pi.at(point).T)
    if basis.shape[1] == 0:
        return np.zeros((0, 0)), basis
    block = np.linalg.pinv(basis) @ matrix @ basis
    return block, basis


def linear_holonomy(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    loop: Path,
    cfg: IntegratorConfig = None,
    tol: float = 1e-8,
) -> HolonomyResult:
    """
    Transport of the full covector basis around a closed cotangent loop.

    Restricted to ker #(gamma(0)) this is the linear Poisson holonomy of the
    leaf through gamma(0) when conn is a basic connection.

    Raises:
        PathError: loop not closed or not cotangent.
    """
    cfg = cfg or IntegratorConfig()
    _check(pi, conn, loop)
    if not is_closed(loop, CLOSURE_TOL):
        raise PathError(f"path {getattr(loop, 'name', '')!r} is not closed")
    if conn.provenance != "canonical_poisson":
        logger.debug(f"holonomy with a {conn.provenance} connection is not the linear Poisson holonomy")
    residual = require_cotangent(pi, loop, tol)
    h = transport_matrix(pi, conn, loop, cfg)
    block, basis = conormal_restriction(pi, loop.position(0.0), h)
    conormal = float(np.linalg.det(block)) if basis.shape[1] else 1.0
    result = HolonomyResult(
        matrix=h,
        determinant=float(np.linalg.det(h)),
        path_residual=residual,
        steps=cfg.steps,
        conormal_determinant=conormal,
        conormal_dim=basis.shape[1],
    )
    logger.info(f"holonomy: det {result.determinant:.12g}, conormal det {conormal:.12g} (dim {basis.shape[1]})")
    return result


# ============================================================================
# ZERO-LEAF FLOW
# ============================================================================

def _flow_endpoint(pi: PoissonStructure, alpha: Sequence[Expr], u0: np.ndarray, steps: int) -> np.ndarray:
    def rhs(t: float, u: np.ndarray) -> np.ndarray:
        a = np.array([evaluate(e, (), t) for e in alpha])
        return pi.at(u).T @ a

    return rk4(rhs, u0, 0.0, 1.0, steps).endpoint


def zero_leaf_holonomy_flow(
    pi: PoissonStructure,
    alpha: Sequence[Expr],
    u0: Sequence[float],
    cfg: IntegratorConfig = None,
    fd_step: float = FLOW_FD_STEP,
) -> FlowResult:
    """
    Time-1 map of u' = #_u a(t) and its central-difference Jacobian at u0.

    Raises:
        ValueError: pi does not vanish at the origin.
        EvaluationError: the trajectory leaves the evaluable region.
    """
    cfg = cfg or IntegratorConfig()
    m = pi.dim
    if len(alpha) != m:
        raise DimensionMismatchError(m, len(alpha), "alpha")
    origin = np.zeros(m)
    if np.max(np.abs(pi.at(origin)), initial=0.0) > ZERO_LEAF_TOL:
        raise ValueError("the origin is not a zero-dimensional leaf: pi(0) != 0")
    u0 = np.asarray(u0, dtype=float)
    end = _flow_endpoint(pi, alpha, u0, cfg.steps)
    jac = np.zeros((m, m))
    for k in range(m):
        e = np.zeros(m)
        e[k] = fd_step
        plus = _flow_endpoint(pi, alpha, u0 + e, cfg.steps)
        minus = _flow_endpoint(pi, alpha, u0 - e, cfg.steps)
        jac[:, k] = (plus - minus) / (2 * fd_step)
    return FlowResult(u0, end, jac)


def automorphism_residual(pi: PoissonStructure, flow: FlowResult) -> float:
    """max |J pi(u0) J^T - pi(u(1))|."""
    j = flow.jacobian
    return float(np.max(np.abs(j @ pi.at(flow.start) @ j.T - pi.at(flow.endpoint)), initial=0.0))


# ============================================================================
# LINE INTEGRALS
# ============================================================================

def line_integral(
    field: MultiVectorField,
    path: Path,
    cfg: IntegratorConfig = None,
) -> float:
    """-integral over [0, 1] of <a(t), X(gamma(t))>, composite Simpson on the step grid."""
    cfg = cfg or IntegratorConfig()
    if field.degree != 1:
        raise ValueError("line integrals need a vector field")
    if field.dim != path.dim:
        raise DimensionMismatchError(path.dim, field.dim, "vector field")
    total = 0.0
    for leg in path.legs:
        total += quadrature(lambda t, leg=leg: -float(leg.covector(t) @ field.vector_at(leg.position(t))), cfg.steps)
    return total
