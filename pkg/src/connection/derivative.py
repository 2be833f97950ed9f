"""
Contravariant Derivative
========================

D_a on tensor fields from the Christoffel symbols, coordinate torsion and
curvature tensors, their operator counterparts on 1-forms, and the DPi
residual certifying a Poisson connection.
"""

import logging
from typing import Sequence

import numpy as np

from src.connection.tensors import ConnectionSymbols, TensorField
from src.expr import add, diff, mul, neg, total
from src.multivec import (
    DifferentialForm,
    DimensionMismatchError,
    PoissonStructure,
    basis_form,
    koszul_bracket,
    sharp,
)

logger = logging.getLogger(__name__)


def _check(pi: PoissonStructure, conn: ConnectionSymbols, *others) -> None:
    if conn.dim != pi.dim:
        raise DimensionMismatchError(pi.dim, conn.dim, "connection")
    for o in others:
        if o.dim != pi.dim:
            raise DimensionMismatchError(pi.dim, o.dim)


def contra_derivative(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    alpha: DifferentialForm,
    tensor: TensorField,
) -> TensorField:
    """
    (D_a K)^I_J = pi^{kl} a_k d_l K^I_J
                  - sum_a Gamma^{k i_a}_l a_k K^{..l..}_J
                  + sum_b Gamma^{k l}_{j_b} a_k K^I_{..l..}
    """
    _check(pi, conn, alpha, tensor)
    m = pi.dim
    r, s = tensor.contravariant, tensor.covariant
    a = alpha.as_list()
    direction = sharp(pi, alpha).as_list()
    live = [k for k in range(m) if not a[k].is_zero]

    def component(idx):
        terms = [total(mul(direction[l], diff(tensor[idx], l)) for l in range(m) if not direction[l].is_zero)]
        for pos in range(r + s):
            upper = pos < r
            for l in range(m):
                replaced = idx[:pos] + (l,) + idx[pos + 1:]
                value = tensor[replaced]
                if value.is_zero:
                    continue
                if upper:
                    coeff = total(mul(conn.gamma(k, idx[pos], l), a[k]) for k in live)
                    if not coeff.is_zero:
                        terms.append(neg(mul(coeff, value)))
                else:
                    coeff = total(mul(conn.gamma(k, l, idx[pos]), a[k]) for k in live)
                    if not coeff.is_zero:
                        terms.append(mul(coeff, value))
        return total(terms)

    return TensorField.build(r, s, m, component)


def form_as_tensor(alpha: DifferentialForm) -> TensorField:
    return TensorField(0, 1, alpha.dim, tuple(alpha.as_list()))


def tensor_as_form(tensor: TensorField) -> DifferentialForm:
    if (tensor.contravariant, tensor.covariant) != (0, 1):
        raise ValueError("only (0, 1) tensors convert to 1-forms")
    return DifferentialForm.from_list(tensor.dim, list(tensor.components))


def derivative_of_form(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    alpha: DifferentialForm,
    beta: DifferentialForm,
) -> DifferentialForm:
    """D_a b for 1-forms: (D_a b)_j = #a(b_j) + Gamma^{kl}_j a_k b_l."""
    return tensor_as_form(contra_derivative(pi, conn, alpha, form_as_tensor(beta)))


# ============================================================================
# TORSION AND CURVATURE
# ============================================================================

def torsion(pi: PoissonStructure, conn: ConnectionSymbols) -> TensorField:
    """T^{ij}_k = Gamma^{ij}_k - Gamma^{ji}_k - d_k pi^{ij}."""
    _check(pi, conn)
    return TensorField.build(2, 1, pi.dim, lambda idx: add(
        conn.gamma(idx[0], idx[1], idx[2]),
        neg(conn.gamma(idx[1], idx[0], idx[2])),
        neg(diff(pi.entry(idx[0], idx[1]), idx[2])),
    ))


def curvature(pi: PoissonStructure, conn: ConnectionSymbols) -> TensorField:
    """
    R^{ijk}_l = Gamma^{ir}_l Gamma^{jk}_r - Gamma^{jr}_l Gamma^{ik}_r
              + pi^{ir} d_r Gamma^{jk}_l - pi^{jr} d_r Gamma^{ik}_l
              - d_r pi^{ij} Gamma^{rk}_l
    """
    _check(pi, conn)
    m = pi.dim
    g = conn.gamma

    def component(idx):
        i, j, k, l = idx
        terms = []
        for r in range(m):
            terms.append(mul(g(i, r, l), g(j, k, r)))
            terms.append(neg(mul(g(j, r, l), g(i, k, r))))
            terms.append(mul(pi.entry(i, r), diff(g(j, k, l), r)))
            terms.append(neg(mul(pi.entry(j, r), diff(g(i, k, l), r))))
            terms.append(neg(mul(diff(pi.entry(i, j), r), g(r, k, l))))
        return total(terms)

    return TensorField.build(3, 1, m, component)


def torsion_operator(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    alpha: DifferentialForm,
    beta: DifferentialForm,
) -> DifferentialForm:
    """T(a, b) = D_a b - D_b a - [a, b]."""
    return (derivative_of_form(pi, conn, alpha, beta)
            - derivative_of_form(pi, conn, beta, alpha)
            - koszul_bracket(pi, alpha, beta))


def curvature_operator(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    alpha: DifferentialForm,
    beta: DifferentialForm,
    gamma: DifferentialForm,
) -> DifferentialForm:
    """R(a, b)c = D_a D_b c - D_b D_a c - D_{[a, b]} c."""
    d = derivative_of_form
    return (d(pi, conn, alpha, d(pi, conn, beta, gamma))
            - d(pi, conn, beta, d(pi, conn, alpha, gamma))
            - d(pi, conn, koszul_bracket(pi, alpha, beta), gamma))


def contract_torsion(t: TensorField, alpha: Sequence[float], beta: Sequence[float], point: Sequence[float]):
    """Numeric T(a, b)_k = T^{ij}_k a_i b_j."""
    return np.einsum("ijk,i,j->k", t.at(point), np.asarray(alpha, float), np.asarray(beta, float))


def contract_curvature(rt: TensorField, alpha, beta, gamma, point: Sequence[float]):
    """Numeric R(a, b)c_l = R^{ijk}_l a_i b_j c_k."""
    return np.einsum("ijkl,i,j,k->l", rt.at(point), np.asarray(alpha, float),
                     np.asarray(beta, float), np.asarray(gamma, float))


def curvature_matrix(rt_at, alpha, beta):
    """Endomorphism of the coframe fiber: R_{a,b}[l, k] = R^{ijk}_l a_i b_j."""
    return np.einsum("ijkl,i,j->lk", rt_at, np.asarray(alpha, float), np.asarray(beta, float))


def d_pi_residual(pi: PoissonStructure, conn: ConnectionSymbols) -> TensorField:
    """(D Pi)^{kij} = (D_{dx^k} Pi)^{ij}; vanishes for a Poisson connection."""
    _check(pi, conn)
    m = pi.dim
    bivector = TensorField.build(2, 0, m, lambda idx: pi.entry(idx[0], idx[1]))
    slices = [contra_derivative(pi, conn, basis_form(m, k), bivector) for k in range(m)]
    return TensorField.build(3, 0, m, lambda idx: slices[idx[0]][idx[1], idx[2]])


def first_bianchi(
    pi: PoissonStructure,
    conn: ConnectionSymbols,
    alpha: DifferentialForm,
    beta: DifferentialForm,
    gamma: DifferentialForm,
) -> DifferentialForm:
    """
    Cyclic sum of R(a, b)c - T(T(a, b), c) - (D_a T)(b, c); zero for every connection.
    """
    triples = ((alpha, beta, gamma), (beta, gamma, alpha), (gamma, alpha, beta))
    out = DifferentialForm.zero(1, pi.dim)
    for a, b, c in triples:
        out = out + curvature_operator(pi, conn, a, b, c)
        out = out - torsion_operator(pi, conn, torsion_operator(pi, conn, a, b), c)
        # (D_a T)(b, c) = D_a(T(b, c)) - T(D_a b, c) - T(b, D_a c)
        out = out - derivative_of_form(pi, conn, a, torsion_operator(pi, conn, b, c))
        out = out + torsion_operator(pi, conn, derivative_of_form(pi, conn, a, b), c)
        out = out + torsion_operator(pi, conn, b, derivative_of_form(pi, conn, a, c))
    return out
