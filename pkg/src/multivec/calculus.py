"""
Contravariant Cartan Calculus
=============================

Symbolic operators on a Poisson chart: the sharp map, Poisson and Koszul
brackets, hamiltonian fields, the contravariant differential delta, contraction,
Lie derivatives along 1-forms, sharp on forms and the modular vector field.

Conventions (fixed once for the whole package):
    (#a)^l          = sum_k pi^{kl} a_k
    [dx^i, dx^j]    = d pi^{ij}
    delta           unnormalized Chevalley-Eilenberg sum, determinant-convention wedge
    #lambda(a_1..)  = (-1)^r lambda(#a_1, ..., #a_r)

With these, delta(#lambda) = -#(d lambda) and i_a(#lambda) = -#(i_{#a} lambda).
"""

import logging
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence, Tuple

from src.expr import ONE, Expr, add, diff, log, mul, neg, total
from src.multivec.fields import (
    AlternatingField,
    DensityField,
    DifferentialForm,
    DimensionMismatchError,
    MultiVectorField,
    PoissonStructure,
    increasing_tuples,
    sort_with_sign,
)

logger = logging.getLogger(__name__)


def _require_dim(dim: int, *fields) -> None:
    for f in fields:
        if f.dim != dim:
            raise DimensionMismatchError(dim, f.dim)


def _require_degree(field: AlternatingField, degree: int, what: str) -> None:
    if field.degree != degree:
        raise ValueError(f"{what} must have degree {degree}, got {field.degree}")


def basis_form(dim: int, i: int) -> DifferentialForm:
    """dx^i (0-based)."""
    return DifferentialForm(1, dim, {(i,): ONE})


def differential(f: Expr, dim: int) -> DifferentialForm:
    """df as a 1-form."""
    return DifferentialForm(1, dim, {(k,): diff(f, k) for k in range(dim)})


def directional(vector: Sequence[Expr], f: Expr) -> Expr:
    """X(f) = sum_l X^l d_l f."""
    return total(mul(x, diff(f, l)) for l, x in enumerate(vector) if not x.is_zero)


# ============================================================================
# SHARP, BRACKETS, HAMILTONIAN FIELDS
# ============================================================================

def sharp(pi: PoissonStructure, alpha: DifferentialForm) -> MultiVectorField:
    """(#a)^l = sum_k pi^{kl} a_k, so that b(#a) = Pi(a, b)."""
    _require_dim(pi.dim, alpha)
    _require_degree(alpha, 1, "alpha")
    a = alpha.as_list()
    return MultiVectorField(1, pi.dim, {
        (l,): total(mul(pi.entry(k, l), a[k]) for k in range(pi.dim) if not a[k].is_zero)
        for l in range(pi.dim)
    })


def pairing(pi: PoissonStructure, alpha: DifferentialForm, beta: DifferentialForm) -> Expr:
    """Pi(a, b) = sum_{k,l} pi^{kl} a_k b_l."""
    a, b = alpha.as_list(), beta.as_list()
    terms = []
    for (k, l), p in pi.components.items():
        terms.append(mul(p, add(mul(a[k], b[l]), neg(mul(a[l], b[k])))))
    return total(terms)


def jacobiator(pi: PoissonStructure) -> MultiVectorField:
    """
    J^{ijk} = sum_l (pi^{li} d_l pi^{jk} + pi^{lj} d_l pi^{ki} + pi^{lk} d_l pi^{ij}).

    Vanishes identically iff pi is Poisson. Equals -delta(Pi)/2.
    """
    m = pi.dim
    comps = {}
    for i, j, k in combinations(range(m), 3):
        terms = []
        for l in range(m):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                p = pi.entry(l, a)
                if p.is_zero:
                    continue
                terms.append(mul(p, diff(pi.entry(b, c), l)))
        comps[(i, j, k)] = total(terms)
    return MultiVectorField(3, m, comps)


def poisson_bracket(pi: PoissonStructure, f: Expr, g: Expr) -> Expr:
    terms = []
    for (k, l), p in pi.components.items():
        dkf, dlf = diff(f, k), diff(f, l)
        dkg, dlg = diff(g, k), diff(g, l)
        terms.append(mul(p, add(mul(dkf, dlg), neg(mul(dlf, dkg)))))
    return total(terms)


def hamiltonian_field(pi: PoissonStructure, f: Expr) -> MultiVectorField:
    """X_f = #df, so X_f(g) = {f, g}."""
    return sharp(pi, differential(f, pi.dim))


def koszul_bracket(pi: PoissonStructure, alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    """[a, b] = L_{#a} b - L_{#b} a - d(Pi(a, b)), componentwise."""
    _require_dim(pi.dim, alpha, beta)
    m = pi.dim
    a, b = alpha.as_list(), beta.as_list()
    sa, sb = sharp(pi, alpha).as_list(), sharp(pi, beta).as_list()
    p = pairing(pi, alpha, beta)
    comps = {}
    for i in range(m):
        terms = [
            directional(sa, b[i]),
            neg(directional(sb, a[i])),
            neg(diff(p, i)),
        ]
        for l in range(m):
            if not b[l].is_zero:
                terms.append(mul(b[l], diff(sa[l], i)))
            if not a[l].is_zero:
                terms.append(neg(mul(a[l], diff(sb[l], i))))
        comps[(i,)] = total(terms)
    return DifferentialForm(1, m, comps)


def vector_commutator(x: MultiVectorField, y: MultiVectorField) -> MultiVectorField:
    """[X, Y]^l = X(Y^l) - Y(X^l)."""
    _require_dim(x.dim, y)
    xs, ys = x.as_list(), y.as_list()
    return MultiVectorField(1, x.dim, {
        (l,): add(directional(xs, ys[l]), neg(directional(ys, xs[l]))) for l in range(x.dim)
    })


# ============================================================================
# DELTA, CONTRACTION, LIE DERIVATIVE
# ============================================================================

def contravariant_differential(pi: PoissonStructure, q: MultiVectorField) -> MultiVectorField:
    """
    delta Q on basis covectors dx^{i_0}, ..., dx^{i_r}:

        sum_k (-1)^k #dx^{i_k}(Q^{..^i_k..})
      + sum_{k<l} (-1)^{k+l} sum_n d_n pi^{i_k i_l} Q^{n, ..^i_k..^i_l..}
    """
    _require_dim(pi.dim, q)
    m, r = pi.dim, q.degree
    if r + 1 > m:
        return MultiVectorField.zero(r + 1, m)
    comps = {}
    for idx in increasing_tuples(m, r + 1):
        terms = []
        for k in range(r + 1):
            rest = idx[:k] + idx[k + 1:]
            qk = q.component(rest)
            if qk.is_zero:
                continue
            row = [pi.entry(idx[k], l) for l in range(m)]
            term = directional(row, qk)
            terms.append(term if k % 2 == 0 else neg(term))
        for k, l in combinations(range(r + 1), 2):
            rest = tuple(idx[a] for a in range(r + 1) if a not in (k, l))
            pkl = pi.entry(idx[k], idx[l])
            for n in range(m):
                qn = q.component((n,) + rest)
                if qn.is_zero:
                    continue
                dp = diff(pkl, n)
                if dp.is_zero:
                    continue
                term = mul(dp, qn)
                terms.append(term if (k + l) % 2 == 0 else neg(term))
        comps[idx] = total(terms)
    return MultiVectorField(r + 1, m, comps)


def contract(alpha: DifferentialForm, q: AlternatingField) -> AlternatingField:
    """(i_a Q)(a_1, ...) = Q(a, a_1, ...)."""
    _require_dim(alpha.dim, q)
    if q.degree < 1:
        raise ValueError("contraction needs degree >= 1")
    a = alpha.as_list()
    comps = {}
    for idx in increasing_tuples(q.dim, q.degree - 1):
        comps[idx] = total(mul(a[n], q.component((n,) + idx)) for n in range(q.dim) if not a[n].is_zero)
    return type(q)(q.degree - 1, q.dim, comps)


def lie_derivative(pi: PoissonStructure, alpha: DifferentialForm, q: MultiVectorField) -> MultiVectorField:
    """(L_a Q)(a_1..a_r) = #a(Q(a_1..a_r)) - sum_k Q(.., [a, a_k], ..)."""
    _require_dim(pi.dim, alpha, q)
    m, r = pi.dim, q.degree
    sa = sharp(pi, alpha).as_list()
    brackets = [koszul_bracket(pi, alpha, basis_form(m, j)).as_list() for j in range(m)] if r else []
    comps = {}
    for idx in increasing_tuples(m, r):
        terms = [directional(sa, q.component(idx))]
        for k in range(r):
            bk = brackets[idx[k]]
            for n in range(m):
                if bk[n].is_zero:
                    continue
                replaced = idx[:k] + (n,) + idx[k + 1:]
                qn = q.component(replaced)
                if not qn.is_zero:
                    terms.append(neg(mul(bk[n], qn)))
        comps[idx] = total(terms)
    return MultiVectorField(r, m, comps)


def lie_derivative_along(x: MultiVectorField, q: MultiVectorField) -> MultiVectorField:
    """Ordinary Lie derivative of a multivector along a vector field."""
    _require_dim(x.dim, q)
    m, r = q.dim, q.degree
    xs = x.as_list()
    comps = {}
    for idx in increasing_tuples(m, r):
        terms = [directional(xs, q.component(idx))]
        for a in range(r):
            for l in range(m):
                dx = diff(xs[idx[a]], l)
                if dx.is_zero:
                    continue
                qn = q.component(idx[:a] + (l,) + idx[a + 1:])
                if not qn.is_zero:
                    terms.append(neg(mul(dx, qn)))
        comps[idx] = total(terms)
    return MultiVectorField(r, m, comps)


# ============================================================================
# FORMS
# ============================================================================

def sharp_form(pi: PoissonStructure, lam: DifferentialForm) -> MultiVectorField:
    """#lambda(a_1..a_r) = (-1)^r lambda(#a_1, ..., #a_r)."""
    _require_dim(pi.dim, lam)
    m, r = pi.dim, lam.degree
    sign = -1 if r % 2 else 1
    comps = {}
    for idx in increasing_tuples(m, r):
        terms = []
        for key, value in lam.components.items():
            # lambda_J det[pi^{i_a j_b}] by permutation expansion
            for perm in permutations(key):
                s, _ = sort_with_sign(perm)
                factors = [pi.entry(i, j) for i, j in zip(idx, perm)]
                if any(f.is_zero for f in factors):
                    continue
                term = mul(value, *factors)
                terms.append(term if s * sign > 0 else neg(term))
        comps[idx] = total(terms)
    return MultiVectorField(r, m, comps)


def de_rham(lam: DifferentialForm) -> DifferentialForm:
    """(d lambda)_{i_0..i_r} = sum_k (-1)^k d_{i_k} lambda_{..^i_k..}."""
    m, r = lam.dim, lam.degree
    if r + 1 > m:
        return DifferentialForm.zero(r + 1, m)
    comps = {}
    for idx in increasing_tuples(m, r + 1):
        terms = []
        for k in range(r + 1):
            term = diff(lam.component(idx[:k] + idx[k + 1:]), idx[k])
            terms.append(term if k % 2 == 0 else neg(term))
        comps[idx] = total(terms)
    return DifferentialForm(r + 1, m, comps)


def interior_vector(x: MultiVectorField, lam: DifferentialForm) -> DifferentialForm:
    """i_X lambda for a vector field X."""
    _require_dim(x.dim, lam)
    if lam.degree < 1:
        raise ValueError("contraction needs degree >= 1")
    xs = x.as_list()
    comps = {}
    for idx in increasing_tuples(lam.dim, lam.degree - 1):
        comps[idx] = total(mul(xs[n], lam.component((n,) + idx)) for n in range(lam.dim) if not xs[n].is_zero)
    return DifferentialForm(lam.degree - 1, lam.dim, comps)


def wedge(q1: AlternatingField, q2: AlternatingField) -> AlternatingField:
    """Determinant-convention wedge: signed sum over (r, s)-shuffles."""
    _require_dim(q1.dim, q2)
    m, r, s = q1.dim, q1.degree, q2.degree
    if r + s > m:
        return type(q1).zero(r + s, m)
    comps = {}
    for idx in increasing_tuples(m, r + s):
        terms = []
        for chosen in combinations(range(r + s), r):
            rest = tuple(p for p in range(r + s) if p not in chosen)
            sign, _ = sort_with_sign(chosen + rest)
            left = q1.component(tuple(idx[p] for p in chosen))
            right = q2.component(tuple(idx[p] for p in rest))
            if left.is_zero or right.is_zero:
                continue
            term = mul(left, right)
            terms.append(term if sign > 0 else neg(term))
        comps[idx] = total(terms)
    return type(q1)(r + s, m, comps)


# ============================================================================
# MODULAR VECTOR FIELD / ACCEPTANCE
# ============================================================================

def modular_vector_field(
    pi: PoissonStructure,
    mu: DensityField,
    points: Optional[Iterable[Sequence[float]]] = None,
) -> MultiVectorField:
    """
    v^k = sum_j d_j pi^{kj} + sum_j pi^{kj} d_j log(weight), i.e. f -> div_mu(X_f).

    Raises:
        DensityError: weight not positive at one of the given points.
    """
    if points is not None:
        mu.check(points)
    m = pi.dim
    grad_log = [diff(log(mu.weight), j) for j in range(m)]
    comps = {}
    for k in range(m):
        terms = []
        for j in range(m):
            p = pi.entry(k, j)
            if p.is_zero:
                continue
            terms.append(diff(p, j))
            terms.append(mul(p, grad_log[j]))
        comps[(k,)] = total(terms)
    return MultiVectorField(1, m, comps)


def is_poisson(pi: PoissonStructure, points: Sequence[Sequence[float]], tol: float = 1e-9) -> Tuple[bool, float]:
    """Numeric Jacobi acceptance over sample points."""
    residual = jacobiator(pi).max_abs(points)
    accepted = residual <= tol
    logger.debug(f"jacobi residual {residual:.3e} (tol {tol:.1e}) -> {'Poisson' if accepted else 'rejected'}")
    return accepted, residual


def casimir_residual(pi: PoissonStructure, f: Expr, points: Sequence[Sequence[float]]) -> float:
    """max |#df| over the sample; zero for a Casimir."""
    return hamiltonian_field(pi, f).max_abs(points)



# ============================================================================
# IDENTITY RESIDUALS
# ============================================================================

Points = Sequence[Sequence[float]]


def delta_squared_residual(pi: PoissonStructure, q: MultiVectorField, points: Points) -> float:
    return contravariant_differential(pi, contravariant_differential(pi, q)).max_abs(points)


def leibniz_residual(pi: PoissonStructure, q1: MultiVectorField, q2: MultiVectorField, points: Points) -> float:
    """max |delta(Q1 ^ Q2) - delta Q1 ^ Q2 - (-1)^r Q1 ^ delta Q2|, r = deg Q1."""
    lhs = contravariant_differential(pi, wedge(q1, q2))
    first = wedge(contravariant_differential(pi, q1), q2)
    second = wedge(q1, contravariant_differential(pi, q2))
    if q1.degree % 2:
        second = -second
    return (lhs - first - second).max_abs(points)


def cartan_residual(pi: PoissonStructure, alpha: DifferentialForm, q: MultiVectorField, points: Points) -> float:
    """max |L_a Q - i_a delta Q - delta i_a Q| for deg Q >= 1."""
    lhs = lie_derivative(pi, alpha, q)
    rhs = contract(alpha, contravariant_differential(pi, q)) + contravariant_differential(pi, contract(alpha, q))
    return (lhs - rhs).max_abs(points)


def musical_residual(pi: PoissonStructure, alpha: DifferentialForm, beta: DifferentialForm, points: Points) -> float:
    """max |#[a, b] - [#a, #b]|; zero exactly when # is a Lie algebra map."""
    lhs = sharp(pi, koszul_bracket(pi, alpha, beta))
    rhs = vector_commutator(sharp(pi, alpha), sharp(pi, beta))
    return (lhs - rhs).max_abs(points)


def bracket_function_residual(
    pi: PoissonStructure,
    alpha: DifferentialForm,
    beta: DifferentialForm,
    f: Expr,
    points: Points,
) -> float:
    """max |[a, f b] - f [a, b] - #a(f) b|."""
    lhs = koszul_bracket(pi, alpha, beta.scale(f))
    rhs = koszul_bracket(pi, alpha, beta).scale(f) + beta.scale(directional(sharp(pi, alpha).as_list(), f))
    return (lhs - rhs).max_abs(points)
