"""
Invariant Polynomials
=====================

The elementary symmetric functions sigma_k, read off from

    det(mu I + A / 2 pi) = sum_k sigma_k(A) mu^{m-k}

and their full polarizations P_k(A_1, ..., A_k), computed with the cycle
expansion of Newton's identities:

    P_k(A_1..A_k) = (1 / k!) sum_{p in S_k} sgn(p) prod_{cycles c of p} tr(A_c1 ... A_cr) / (2 pi)^k

The same expansion runs on numpy matrices and on matrices of Exprs.
"""

import math
from functools import lru_cache
from itertools import permutations
from typing import Callable, Dict, List, Sequence, Tuple, TypeVar

import numpy as np

from src.classes.lie_algebra import LieAlgebra
from src.expr import ZERO, Expr, const, mul, total
from src.multivec import DimensionMismatchError, sort_with_sign

T = TypeVar("T")
Cycle = Tuple[int, ...]
ExprMatrix = List[List[Expr]]

TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=None)
def cycle_expansion(k: int) -> Tuple[Tuple[int, Tuple[Cycle, ...]], ...]:
    """(sign, cycles) for every permutation of range(k), cycles starting at their smallest slot."""
    out = []
    for perm in permutations(range(k)):
        sign, _ = sort_with_sign(perm)
        seen, cycles = set(), []
        for start in range(k):
            if start in seen:
                continue
            cycle, a = [], start
            while a not in seen:
                seen.add(a)
                cycle.append(a)
                a = perm[a]
            cycles.append(tuple(cycle))
        out.append((sign, tuple(cycles)))
    return tuple(out)


def polarize(k: int, trace_of: Callable[[Cycle], T], combine: Callable[[int, List[T]], T]) -> List[T]:
    """Signed products of cycle traces, one per permutation; the caller sums and scales."""
    cache: Dict[Cycle, T] = {}

    def tr(cycle: Cycle) -> T:
        if cycle not in cache:
            cache[cycle] = trace_of(cycle)
        return cache[cycle]

    return [combine(sign, [tr(c) for c in cycles]) for sign, cycles in cycle_expansion(k)]


# ============================================================================
# NUMERIC
# ============================================================================

def sigma_polarized(k: int, *matrices) -> float:
    """
    Full polarization of sigma_k on k square matrices.

    sigma_polarized(k, A, ..., A) equals sigma_k(A), the (1/2 pi)^k scaling included.

    Raises:
        DimensionMismatchError: matrices of different sizes.
    """
    if k == 0:
        return 1.0
    if len(matrices) != k:
        raise ValueError(f"sigma_{k} takes {k} matrices, got {len(matrices)}")
    mats = [np.asarray(a, dtype=float) for a in matrices]
    m = mats[0].shape[0]
    for a in mats:
        if a.shape != (m, m):
            raise DimensionMismatchError(m, a.shape[0], "matrix")

    def trace_of(cycle: Cycle) -> float:
        prod = mats[cycle[0]]
        for slot in cycle[1:]:
            prod = prod @ mats[slot]
        return float(np.trace(prod))

    terms = polarize(k, trace_of, lambda sign, traces: sign * math.prod(traces))
    return math.fsum(terms) / math.factorial(k) / TWO_PI ** k


def characteristic_coefficients(a) -> np.ndarray:
    """[sigma_0(A), ..., sigma_m(A)] from the characteristic polynomial of A / 2 pi."""
    a = np.asarray(a, dtype=float)
    coeffs = np.poly(a / TWO_PI)
    return np.array([(-1) ** k * coeffs[k] for k in range(len(coeffs))])


def p3_closed_form(a, b, c) -> float:
    """
    P_3(A, B, C) = 1/(24 pi^3) [ (tr ABC + tr ACB)/2
                                 - (tr A tr BC + tr B tr AC + tr C tr AB)/2
                                 + tr A tr B tr C / 2 ]
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    tr = np.trace
    bracket = (0.5 * (tr(a @ b @ c) + tr(a @ c @ b))
               - 0.5 * (tr(a) * tr(b @ c) + tr(b) * tr(a @ c) + tr(c) * tr(a @ b))
               + 0.5 * tr(a) * tr(b) * tr(c))
    return float(bracket / (24.0 * math.pi ** 3))


def K_form(g: LieAlgebra, *vectors) -> float:
    """K_j(v_1, ..., v_j) = tr(ad v_1 ... ad v_j)."""
    if not vectors:
        raise ValueError("K_form needs at least one vector")
    prod = np.eye(g.dim)
    for v in vectors:
        v = np.asarray(v, dtype=float)
        if v.shape != (g.dim,):
            raise DimensionMismatchError(g.dim, v.size, "vector")
        prod = prod @ g.ad(v)
    return float(np.trace(prod))


# ============================================================================
# SYMBOLIC
# ============================================================================

def expr_matmul(a: ExprMatrix, b: ExprMatrix) -> ExprMatrix:
    n = len(a)
    return [[total(mul(a[i][p], b[p][j]) for p in range(n) if not a[i][p].is_zero and not b[p][j].is_zero)
             for j in range(n)] for i in range(n)]


def expr_trace(a: ExprMatrix) -> Expr:
    return total(a[i][i] for i in range(len(a)))


def sigma_polarized_expr(k: int, matrices: Sequence[ExprMatrix]) -> Expr:
    """sigma_polarized on matrices of Exprs."""
    if k == 0:
        return const(1.0)
    if len(matrices) != k:
        raise ValueError(f"sigma_{k} takes {k} matrices, got {len(matrices)}")
    m = len(matrices[0])
    for a in matrices:
        if len(a) != m or any(len(row) != m for row in a):
            raise DimensionMismatchError(m, len(a), "matrix")

    def trace_of(cycle: Cycle) -> Expr:
        prod = matrices[cycle[0]]
        for slot in cycle[1:]:
            prod = expr_matmul(prod, matrices[slot])
        return expr_trace(prod)

    def combine(sign: int, traces: List[Expr]) -> Expr:
        if any(t.is_zero for t in traces):
            return ZERO
        return mul(const(float(sign)), *traces)

    terms = polarize(k, trace_of, combine)
    return mul(const(1.0 / (math.factorial(k) * TWO_PI ** k)), total(terms))
