"""
Connection Constructions
========================

Christoffel symbol builders: the canonical Poisson (basic) connection, the
flat connection, connections induced from a riemannian metric, the
torsion-free symmetrization, the two-dimensional example connections, and the
change-of-chart rule evaluated at a point.
"""

import logging
from itertools import permutations
from typing import List, Optional, Sequence

import numpy as np

from src.connection.tensors import ConnectionSymbols, Metric, MetricError
from src.expr import ZERO, Expr, ONE, add, const, diff, div, evaluate, inverse_entry, mul, neg, sqrt, total
from src.multivec import PoissonStructure, sort_with_sign

logger = logging.getLogger(__name__)

SYMBOLIC_INVERSE_MAX_DIM = 4


def canonical_poisson_connection(pi: PoissonStructure) -> ConnectionSymbols:
    """Gamma^{ij}_k = d pi^{ij} / d x^k, i.e. D_{dx^i} b = [dx^i, b]."""
    return ConnectionSymbols.build(pi.dim, lambda i, j, k: diff(pi.entry(i, j), k), "canonical_poisson")


def flat_connection(dim: int) -> ConnectionSymbols:
    return ConnectionSymbols.build(dim, lambda i, j, k: ZERO, "flat")


def symmetrize(pi: PoissonStructure, conn: ConnectionSymbols) -> ConnectionSymbols:
    """*Gamma^{ij}_k = (Gamma^{ij}_k + Gamma^{ji}_k + d_k pi^{ij}) / 2: zero torsion, same geodesics."""
    half = const(0.5)
    return ConnectionSymbols.build(
        pi.dim,
        lambda i, j, k: mul(half, add(conn.gamma(i, j, k), conn.gamma(j, i, k), diff(pi.entry(i, j), k))),
        "explicit",
    )


# ============================================================================
# METRIC-INDUCED
# ============================================================================

def _determinant(rows: List[List[Expr]]) -> Expr:
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return rows[0][0]
    terms = []
    for perm in permutations(range(n)):
        sign, _ = sort_with_sign(perm)
        factors = [rows[a][perm[a]] for a in range(n)]
        if any(f.is_zero for f in factors):
            continue
        term = mul(*factors)
        terms.append(term if sign > 0 else neg(term))
    return total(terms)


def inverse_metric(g: Metric, symbolic: Optional[bool] = None) -> List[List[Expr]]:
    """
    g^{ij}. Cofactors over det g up to SYMBOLIC_INVERSE_MAX_DIM, otherwise
    entries inverted numerically at each evaluation point (still exactly
    differentiable).
    """
    m = g.dim
    if symbolic is None:
        symbolic = m <= SYMBOLIC_INVERSE_MAX_DIM
    rows = [[g.g(i, j) for j in range(m)] for i in range(m)]
    if not symbolic:
        logger.debug(f"per-point metric inverse in dimension {m}")
        return [[inverse_entry(rows, i, j) for j in range(m)] for i in range(m)]
    det = _determinant(rows)
    inv = []
    for i in range(m):
        row = []
        for j in range(m):
            # cofactor C_{ji}
            minor = [[rows[a][b] for b in range(m) if b != i] for a in range(m) if a != j]
            cof = _determinant(minor)
            if (i + j) % 2:
                cof = neg(cof)
            row.append(div(cof, det))
        inv.append(row)
    return inv


def levi_civita_symbols(g: Metric) -> List[List[List[Expr]]]:
    """
    Covariant symbols G[j][l][k] = Gamma^j_{lk}
        = 1/2 g^{jp} (d_l g_{pk} + d_k g_{pl} - d_p g_{lk}).
    """
    m = g.dim
    ginv = inverse_metric(g)
    first = [[[add(diff(g.g(p, k), l), diff(g.g(p, l), k), neg(diff(g.g(l, k), p)))
               for k in range(m)] for l in range(m)] for p in range(m)]
    half = const(0.5)
    return [[[mul(half, total(mul(ginv[j][p], first[p][l][k]) for p in range(m) if not first[p][l][k].is_zero))
              for k in range(m)] for l in range(m)] for j in range(m)]


def levi_civita_contra(pi: PoissonStructure, g: Metric) -> ConnectionSymbols:
    """
    D^0_a = nabla_{#a} acting on covectors: Gamma^{ij}_k = -sum_l pi^{il} Gamma^j_{lk}.
    """
    if g.dim != pi.dim:
        raise MetricError(f"metric has dimension {g.dim}, Poisson structure {pi.dim}")
    lc = levi_civita_symbols(g)
    m = pi.dim
    return ConnectionSymbols.build(
        m,
        lambda i, j, k: neg(total(mul(pi.entry(i, l), lc[j][l][k]) for l in range(m) if not pi.entry(i, l).is_zero)),
        "levi_civita",
    )


def metric_compatibility_residual(g: Metric, points: Sequence[Sequence[float]]) -> float:
    """max |nabla_l g_{jk}| for the Levi-Civita symbols of g."""
    m = g.dim
    lc = levi_civita_symbols(g)
    worst = 0.0
    for l in range(m):
        for j in range(m):
            for k in range(m):
                expr = add(
                    diff(g.g(j, k), l),
                    neg(total(mul(lc[p][l][j], g.g(p, k)) for p in range(m))),
                    neg(total(mul(lc[p][l][k], g.g(j, p)) for p in range(m))),
                )
                for x in points:
                    worst = max(worst, abs(evaluate(expr, x)))
    return worst


def volume_weight(g: Metric) -> Expr:
    """(det g)^(1/2)."""
    rows = [[g.g(i, j) for j in range(g.dim)] for i in range(g.dim)]
    return sqrt(_determinant(rows))


# ============================================================================
# EXAMPLE CONNECTIONS ON aff(1)*
# ============================================================================

def literal_example_connection() -> ConnectionSymbols:
    """D_{dx1} dx2 = dx2, all else zero. Has torsion T^{12}_2 = 1."""
    return ConnectionSymbols.from_sparse(2, {(0, 1, 1): ONE})


def corrected_example_connection() -> ConnectionSymbols:
    """D_{dx2} dx1 = -dx1, all else zero. Torsion-free with D pi = 0 on aff(1)*."""
    return ConnectionSymbols.from_sparse(2, {(1, 0, 0): const(-1.0)})


# ============================================================================
# CHANGE OF CHART
# ============================================================================

def transform_symbols_at(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    forward: Sequence[Expr],
    x0: Sequence[float],
) -> np.ndarray:
    """
    Symbols in the chart y = y(x), evaluated at y(x0):

        G~^{ab}_c = dy^a/dx^i dy^b/dx^j dx^k/dy^c Gamma^{ij}_k
                  + dy^a/dx^i d^2 y^b/dx^j dx^k dx^j/dy^c pi^{ik}
    """
    m = pi.dim
    if len(forward) != m:
        raise ValueError(f"coordinate change needs {m} expressions, got {len(forward)}")
    jac = np.array([[evaluate(diff(forward[a], i), x0) for i in range(m)] for a in range(m)])
    hess = np.array([[[evaluate(diff(diff(forward[b], j), k), x0) for k in range(m)] for j in range(m)]
                     for b in range(m)])
    try:
        jinv = np.linalg.inv(jac)
    except np.linalg.LinAlgError:
        raise ValueError(f"coordinate change is singular at {list(x0)}") from None
    gamma = conn.at(x0)
    p = pi.at(x0)
    first = np.einsum("ai,bj,kc,ijk->abc", jac, jac, jinv, gamma)
    second = np.einsum("ai,bjk,jc,ik->abc", jac, hess, jinv, p)
    return first + second
