"""
Chern-Weil and Secondary Classes
================================

Multivector fields built from the curvature of contravariant connections on
the coframe bundle:

    lambda(G)(P_k)(a_1..a_2k) = sum_{s in S_2k} sgn(s) P_k(R_{a_s1, a_s2}, ..., R_{a_s(2k-1), a_s2k})

and the transgression (2k-1)-vector field comparing two connections:

    lambda(G1, G0)(P_k)(a_1..a_2k-1) =
        k sum_{s in S_2k-1} sgn(s) int_0^1 P_k(L(a_s1), X^t(a_s2, a_s3), ...) dt

with L = G1 - G0 acting on covectors and X^t the curvature of the interpolated
symbols t G1 + (1 - t) G0. The t-integrand is a polynomial of degree 2k - 2,
so k + 1 Gauss-Legendre nodes integrate it exactly.

Components are assembled on increasing basis tuples of covectors; the result
is a symbolic MultiVectorField.
"""

import logging
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from numpy.polynomial.legendre import leggauss

from src.classes.invariants import ExprMatrix, TWO_PI, K_form, sigma_polarized_expr
from src.classes.lie_algebra import LieAlgebra
from src.connection import (
    ConnectionSymbols,
    Metric,
    TensorField,
    canonical_poisson_connection,
    curvature,
    levi_civita_contra,
    volume_weight,
)
from src.expr import add, const, diff, mul, sub, total
from src.multivec import (
    DensityField,
    DimensionMismatchError,
    MultiVectorField,
    PoissonStructure,
    contravariant_differential,
    increasing_tuples,
    modular_vector_field,
    sort_with_sign,
)
from src.utils.sampling import sample_points

logger = logging.getLogger(__name__)

FLATNESS_TOL = 1e-10
FLATNESS_POINTS = 20

# secondary_class(canonical, flat) = ratio * lie_poisson_mk on g*
LIE_POISSON_RATIOS = {1: 1.0, 2: 1.0 / 6.0, 3: 1.0 / 30.0}

Pair = Tuple[int, int]


def _check(pi: PoissonStructure, *conns: ConnectionSymbols) -> None:
    for c in conns:
        if c.dim != pi.dim:
            raise DimensionMismatchError(pi.dim, c.dim, "connection")


def _curvature_matrices(rt: TensorField) -> Dict[Pair, ExprMatrix]:
    """R_{dx^a, dx^b}[l][k] = R^{abk}_l for a < b."""
    m = rt.dim
    return {(a, b): [[rt[a, b, k, l] for k in range(m)] for l in range(m)]
            for a in range(m) for b in range(a + 1, m)}


def _difference_matrices(conn1: ConnectionSymbols, conn0: ConnectionSymbols) -> List[ExprMatrix]:
    """L(dx^a)[j][l] = G1^{al}_j - G0^{al}_j."""
    m = conn1.dim
    return [[[sub(conn1.gamma(a, l, j), conn0.gamma(a, l, j)) for l in range(m)] for j in range(m)]
            for a in range(m)]


def _pairings(indices: Sequence[int]) -> Dict[Tuple[Pair, ...], int]:
    """
    Collapse sum_{s} sgn(s) f(pair_1, ..., pair_k) for f symmetric in its pairs and
    antisymmetric within each pair: {sorted pairs: signed multiplicity}.
    """
    out: Dict[Tuple[Pair, ...], int] = {}
    n = len(indices)
    for perm in permutations(range(n)):
        sign, _ = sort_with_sign(perm)
        pairs = []
        for a in range(0, n, 2):
            i, j = indices[perm[a]], indices[perm[a + 1]]
            if i > j:
                i, j = j, i
                sign = -sign
            pairs.append((i, j))
        key = tuple(sorted(pairs))
        out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


def _lead_pairings(indices: Sequence[int]) -> Dict[Tuple[int, Tuple[Pair, ...]], int]:
    """Same collapse with one leading unpaired slot."""
    out: Dict[Tuple[int, Tuple[Pair, ...]], int] = {}
    n = len(indices)
    for perm in permutations(range(n)):
        sign, _ = sort_with_sign(perm)
        lead = indices[perm[0]]
        pairs = []
        for a in range(1, n, 2):
            i, j = indices[perm[a]], indices[perm[a + 1]]
            if i > j:
                i, j = j, i
                sign = -sign
            pairs.append((i, j))
        key = (lead, tuple(sorted(pairs)))
        out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


# ============================================================================
# CHERN-WEIL
# ============================================================================

def chern_weil(pi: PoissonStructure, conn: ConnectionSymbols, k: int) -> MultiVectorField:
    """The closed 2k-vector field lambda(conn)(P_k); zero when 2k > m."""
    _check(pi, conn)
    m = pi.dim
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if 2 * k > m:
        return MultiVectorField.zero(2 * k, m)
    mats = _curvature_matrices(curvature(pi, conn))
    comps = {}
    for idx in increasing_tuples(m, 2 * k):
        terms = []
        for pairs, weight in _pairings(idx).items():
            value = sigma_polarized_expr(k, [mats[p] for p in pairs])
            if not value.is_zero:
                terms.append(mul(const(float(weight)), value))
        comps[idx] = total(terms)
    return MultiVectorField(2 * k, m, comps)


# ============================================================================
# SECONDARY CLASSES
# ============================================================================

def interpolate(conn1: ConnectionSymbols, conn0: ConnectionSymbols, t: float) -> ConnectionSymbols:
    """Symbols t G1 + (1 - t) G0."""
    a, b = const(t), const(1.0 - t)
    return ConnectionSymbols.build(
        conn1.dim, lambda i, j, k: add(mul(a, conn1.gamma(i, j, k)), mul(b, conn0.gamma(i, j, k))),
    )


def is_flat(pi: PoissonStructure, conn: ConnectionSymbols, points: Sequence[Sequence[float]],
            tol: float = FLATNESS_TOL) -> bool:
    rt = curvature(pi, conn)
    return rt.is_zero or rt.max_abs(points) <= tol


def secondary_class(
    pi: PoissonStructure,
    conn1: ConnectionSymbols,
    conn0: ConnectionSymbols,
    k: int,
    points: Optional[Sequence[Sequence[float]]] = None,
) -> MultiVectorField:
    """
    The (2k-1)-vector field lambda(conn1, conn0)(P_k).

    Even k is computed only when both connections are flat on the sample points.

    Raises:
        ValueError: even k with a curved connection.
    """
    _check(pi, conn1, conn0)
    m = pi.dim
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    degree = 2 * k - 1
    if degree > m:
        return MultiVectorField.zero(degree, m)
    if k % 2 == 0:
        pts = points if points is not None else sample_points(m, FLATNESS_POINTS)
        if not (is_flat(pi, conn1, pts) and is_flat(pi, conn0, pts)):
            logger.warning(f"m_{k}: even k needs flat connections; class not computed")
            raise ValueError(f"secondary class for even k={k} needs both connections flat")

    lam = _difference_matrices(conn1, conn0)
    stages = [(1.0, {})]
    if k > 1:
        nodes, weights = leggauss(k + 1)
        stages = [(0.5 * float(w), _curvature_matrices(curvature(pi, interpolate(conn1, conn0, 0.5 * (float(x) + 1.0)))))
                  for x, w in zip(nodes, weights)]

    comps = {}
    for idx in increasing_tuples(m, degree):
        terms = []
        for (lead, pairs), multiplicity in _lead_pairings(idx).items():
            for w, xi in stages:
                value = sigma_polarized_expr(k, [lam[lead]] + [xi[p] for p in pairs])
                if not value.is_zero:
                    terms.append(mul(const(k * multiplicity * w), value))
        comps[idx] = total(terms)
    logger.debug(f"m_{k}: {len(comps)} components over {len(stages)} quadrature nodes")
    return MultiVectorField(degree, m, comps)


def transgression_residual(
    pi: PoissonStructure,
    conn1: ConnectionSymbols,
    conn0: ConnectionSymbols,
    k: int,
    points: Sequence[Sequence[float]],
) -> float:
    """max | delta lambda(G1, G0)(P_k) - (lambda(G1)(P_k) - lambda(G0)(P_k)) / 2 | over points."""
    mk = secondary_class(pi, conn1, conn0, k, points)
    lhs = contravariant_differential(pi, mk)
    rhs = (chern_weil(pi, conn1, k) - chern_weil(pi, conn0, k)).scale(0.5)
    return (lhs - rhs).max_abs(points)


def closedness_residual(pi: PoissonStructure, conn: ConnectionSymbols, k: int,
                        points: Sequence[Sequence[float]]) -> float:
    return contravariant_differential(pi, chern_weil(pi, conn, k)).max_abs(points)


# ============================================================================
# LIE-POISSON CLOSED FORMS
# ============================================================================

def lie_poisson_mk(g: LieAlgebra, k: int) -> MultiVectorField:
    """
    Constant (2k-1)-vector on g*:

        m_k(v_1..v_2k-1) = (2 pi)^-k sum_s sgn(s) K_k(v_s1, [v_s2, v_s3], ..., [v_s(2k-2), v_s(2k-1)])
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = g.dim
    degree = 2 * k - 1
    if degree > n:
        return MultiVectorField.zero(degree, n)
    comps = {}
    for idx in increasing_tuples(n, degree):
        acc = 0.0
        for (lead, pairs), multiplicity in _lead_pairings(idx).items():
            vectors = [g.basis(lead)] + [g.bracket(g.basis(a), g.basis(b)) for a, b in pairs]
            acc += multiplicity * K_form(g, *vectors)
        value = acc / TWO_PI ** k
        if abs(value) > 0.0:
            comps[idx] = const(value)
    return MultiVectorField(degree, n, comps)


# ============================================================================
# MODULAR CLASS
# ============================================================================

def modular_comparison(
    pi: PoissonStructure,
    g: Metric,
    points: Sequence[Sequence[float]],
) -> float:
    """
    max over points and basis covectors of |lambda(D1, D0)(tr)(dx^a) - v_mu^a|,
    D1 canonical, D0 induced by g, mu = (det g)^(1/2) dx.

    Raises:
        MetricError: g singular or indefinite at a sample point.
        DensityError: det g not positive at a sample point.
    """
    if g.dim != pi.dim:
        raise DimensionMismatchError(pi.dim, g.dim, "metric")
    g.check(points)
    d1 = canonical_poisson_connection(pi)
    d0 = levi_civita_contra(pi, g)
    trace_class = secondary_class(pi, d1, d0, 1).scale(TWO_PI)
    v_mu = modular_vector_field(pi, DensityField(volume_weight(g)), points)
    residual = (trace_class - v_mu).max_abs(points)
    logger.info(f"modular comparison on {pi}: residual {residual:.3e}")
    return residual


def euclidean_first_class(pi: PoissonStructure) -> MultiVectorField:
    """m_1^i = (1/2 pi) sum_j d_j pi^{ij}: the first class against the flat connection."""
    m = pi.dim
    return MultiVectorField(1, m, {
        (i,): mul(const(1.0 / TWO_PI), total(diff(pi.entry(i, j), j) for j in range(m))) for i in range(m)
    })
