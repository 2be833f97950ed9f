"""
Unit Tests for Multivector Calculus
===================================
"""

import numpy as np
import pytest

from src.expr import ONE, const, coordinate, evaluate, parse_expr
from src.multivec import (
    DensityError,
    DensityField,
    DifferentialForm,
    DimensionMismatchError,
    MultiVectorField,
    PoissonStructure,
    basis_form,
    bracket_function_residual,
    cartan_residual,
    casimir_residual,
    contract,
    contravariant_differential,
    de_rham,
    delta_squared_residual,
    differential,
    directional,
    hamiltonian_field,
    interior_vector,
    is_poisson,
    jacobiator,
    koszul_bracket,
    leibniz_residual,
    lie_derivative,
    lie_derivative_along,
    modular_vector_field,
    musical_residual,
    pairing,
    poisson_bracket,
    sharp,
    sharp_form,
    sort_with_sign,
    vector_commutator,
    wedge,
)
from src.utils.fixtures import (
    POISSON_FIXTURES,
    aff1_fixture,
    non_jacobi_fixture,
    sl2_fixture,
    so3_fixture,
    solvable_fixture,
)
from src.utils.sampling import random_field, random_polynomial, sample_points


@pytest.fixture
def points3():
    return sample_points(3, 30, seed=7)


@pytest.fixture
def so3():
    return so3_fixture().pi


class TestFields:
    def test_sort_with_sign(self):
        assert sort_with_sign((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_with_sign((1, 0)) == (-1, (0, 1))
        assert sort_with_sign((1, 1)) == (0, None)

    def test_from_any_folds_permutations(self):
        x = coordinate(1)
        q = MultiVectorField.from_any(2, 3, {(1, 0): x})
        assert evaluate(q.component((0, 1)), [2.0, 0.0, 0.0]) == -2.0
        assert evaluate(q.component((1, 0)), [2.0, 0.0, 0.0]) == 2.0
        assert q.component((1, 1)).is_zero

    def test_rejects_bad_keys(self):
        with pytest.raises(ValueError):
            MultiVectorField(2, 3, {(1, 0): ONE})
        with pytest.raises(ValueError):
            MultiVectorField(1, 2, {(2,): ONE})
        with pytest.raises(ValueError):
            MultiVectorField(2, 3, {(0,): ONE})

    def test_zero_components_dropped(self):
        q = MultiVectorField(1, 2, {(0,): const(0.0), (1,): ONE})
        assert list(q.components) == [(1,)]

    def test_evaluate_on_matches_matrix(self, so3):
        p = [0.3, -0.2, 0.9]
        a, b = np.array([1.0, 2.0, -1.0]), np.array([0.5, 0.0, 3.0])
        value = so3.as_bivector().evaluate_on(p, [a, b])
        assert value == pytest.approx(a @ so3.at(p) @ b, abs=1e-14)

    def test_wedge_of_basis_forms(self):
        w = wedge(basis_form(3, 0), basis_form(3, 1))
        assert evaluate(w.component((0, 1)), []) == 1.0
        assert evaluate(w.component((1, 0)), []) == -1.0
        assert wedge(basis_form(3, 0), basis_form(3, 0)).is_zero

    def test_linear_structure(self):
        x = MultiVectorField.from_list(2, [coordinate(1), ONE])
        y = (x + x).scale(0.5) - x
        assert y.max_abs([[1.0, 2.0], [-3.0, 0.5]]) == 0.0

    def test_dimension_mismatch(self, so3):
        with pytest.raises(DimensionMismatchError):
            sharp(so3, basis_form(2, 0))
        with pytest.raises(DimensionMismatchError):
            MultiVectorField.from_list(3, [ONE, ONE])


class TestPoissonStructure:
    def test_lower_triangle_rejected(self):
        with pytest.raises(ValueError, match="indices must satisfy i<j"):
            PoissonStructure(2, {(1, 0): coordinate(1)})

    def test_antisymmetric_matrix(self, so3):
        p = [0.1, 0.2, 0.3]
        m = so3.at(p)
        assert np.allclose(m, -m.T)
        assert m[0, 1] == 0.3

    @pytest.mark.parametrize("fixture", [so3_fixture, aff1_fixture, sl2_fixture, solvable_fixture])
    def test_lie_poisson_satisfies_jacobi(self, fixture, points3):
        pi = fixture().pi
        sample = points3 if pi.dim == 3 else sample_points(pi.dim, 30, seed=7)
        accepted, residual = is_poisson(pi, sample)
        assert accepted
        assert residual < 1e-12

    def test_non_jacobi_rejected(self, points3):
        pi = non_jacobi_fixture().pi
        accepted, residual = is_poisson(pi, points3)
        assert not accepted
        # J^{123} = -x1
        assert residual == pytest.approx(np.max(np.abs(points3[:, 0])))
        assert evaluate(jacobiator(pi).component((0, 1, 2)), [0.7, 0.1, 0.2]) == pytest.approx(-0.7)

    @pytest.mark.parametrize("fixture", [so3_fixture, sl2_fixture])
    def test_casimirs(self, fixture, points3):
        fx = fixture()
        for c in fx.casimirs:
            assert casimir_residual(fx.pi, c, points3) < 1e-12


class TestBrackets:
    def test_hamiltonian_field_acts_by_bracket(self, so3, points3):
        f = parse_expr("x1^2 * x2", 3)
        g = parse_expr("sin(x3) + x1", 3)
        lhs = directional(hamiltonian_field(so3, f).as_list(), g)
        rhs = poisson_bracket(so3, f, g)
        for p in points3:
            assert evaluate(lhs, p) == pytest.approx(evaluate(rhs, p), abs=1e-13)

    def test_coordinate_brackets(self, so3):
        x1, x2 = coordinate(1), coordinate(2)
        assert evaluate(poisson_bracket(so3, x1, x2), [0.0, 0.0, 2.5]) == 2.5

    def test_pairing_is_bivector_value(self, so3):
        a, b = basis_form(3, 0), basis_form(3, 1)
        assert evaluate(pairing(so3, a, b), [0.0, 0.0, 4.0]) == 4.0
        assert evaluate(sharp(so3, a).component((1,)), [0.0, 0.0, 4.0]) == 4.0

    def test_koszul_bracket_of_exact_forms(self, so3, points3):
        f, g = parse_expr("x1*x2", 3), parse_expr("x3^2 + x1", 3)
        lhs = koszul_bracket(so3, differential(f, 3), differential(g, 3))
        rhs = differential(poisson_bracket(so3, f, g), 3)
        assert (lhs - rhs).max_abs(points3) < 1e-12

    def test_koszul_bracket_of_coordinates(self, so3):
        bracket = koszul_bracket(so3, basis_form(3, 0), basis_form(3, 1))
        # [dx1, dx2] = d pi^{12} = dx3
        assert bracket.vector_at([0.2, 0.4, 0.6]).tolist() == [0.0, 0.0, 1.0]


class TestContravariantDifferential:
    def test_on_functions(self, so3, points3):
        f = parse_expr("x1*x3 + x2^2", 3)
        df = contravariant_differential(so3, MultiVectorField.scalar(3, f))
        for i in range(3):
            expected = poisson_bracket(so3, coordinate(i + 1), f)
            for p in points3[:5]:
                assert evaluate(df.component((i,)), p) == pytest.approx(evaluate(expected, p), abs=1e-13)

    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_squares_to_zero(self, so3, points3, degree):
        rng = np.random.default_rng(11 + degree)
        q = random_field(MultiVectorField, degree, 3, rng)
        twice = contravariant_differential(so3, contravariant_differential(so3, q))
        assert twice.max_abs(points3) < 1e-10

    def test_bivector_gives_jacobiator(self, points3):
        pi = non_jacobi_fixture().pi
        delta_pi = contravariant_differential(pi, pi.as_bivector())
        assert (delta_pi + jacobiator(pi).scale(2.0)).max_abs(points3) < 1e-12

    def test_top_degree_is_zero(self, so3):
        q = MultiVectorField(3, 3, {(0, 1, 2): coordinate(1)})
        assert contravariant_differential(so3, q).is_zero


class TestForms:
    def test_sharp_commutes_with_differentials(self, so3, points3):
        rng = np.random.default_rng(5)
        lam = random_field(DifferentialForm, 1, 3, rng)
        lhs = contravariant_differential(so3, sharp_form(so3, lam))
        rhs = sharp_form(so3, de_rham(lam))
        assert (lhs + rhs).max_abs(points3) < 1e-10

    def test_contraction_against_sharp(self, so3, points3):
        rng = np.random.default_rng(6)
        lam = random_field(DifferentialForm, 2, 3, rng)
        alpha = differential(parse_expr("x1*x2 + x3", 3), 3)
        lhs = contract(alpha, sharp_form(so3, lam))
        rhs = sharp_form(so3, interior_vector(sharp(so3, alpha), lam))
        assert (lhs + rhs).max_abs(points3) < 1e-10

    def test_de_rham_squares_to_zero(self, points3):
        rng = np.random.default_rng(9)
        lam = random_field(DifferentialForm, 1, 3, rng)
        assert de_rham(de_rham(lam)).max_abs(points3) < 1e-12


class TestLieDerivative:
    @pytest.mark.parametrize("degree", [1, 2])
    def test_exact_form_acts_as_hamiltonian_field(self, so3, points3, degree):
        rng = np.random.default_rng(21 + degree)
        q = random_field(MultiVectorField, degree, 3, rng)
        f = parse_expr("x1*x2 + x3^2", 3)
        lhs = lie_derivative(so3, differential(f, 3), q)
        rhs = lie_derivative_along(hamiltonian_field(so3, f), q)
        assert (lhs - rhs).max_abs(points3) < 1e-10

    def test_commutes_with_delta(self, so3, points3):
        rng = np.random.default_rng(31)
        q = random_field(MultiVectorField, 1, 3, rng)
        alpha = random_field(DifferentialForm, 1, 3, rng)
        lhs = contravariant_differential(so3, lie_derivative(so3, alpha, q))
        rhs = lie_derivative(so3, alpha, contravariant_differential(so3, q))
        assert (lhs - rhs).max_abs(points3) < 1e-10

    def test_hamiltonian_commutator(self, so3, points3):
        f, g = parse_expr("x1*x2", 3), parse_expr("x3^2 + x1", 3)
        lhs = vector_commutator(hamiltonian_field(so3, f), hamiltonian_field(so3, g))
        rhs = hamiltonian_field(so3, poisson_bracket(so3, f, g))
        assert (lhs - rhs).max_abs(points3) < 1e-12


# ============================================================================
# Identity battery over every built-in Poisson chart
# ============================================================================

@pytest.fixture(params=sorted(POISSON_FIXTURES))
def structure(request):
    return POISSON_FIXTURES[request.param]().pi


class TestIdentities:
    @pytest.fixture
    def points(self, structure):
        return sample_points(structure.dim, 100, seed=17)

    def test_delta_pi_vanishes(self, structure, points):
        assert contravariant_differential(structure, structure.as_bivector()).max_abs(points) < 1e-10

    def test_delta_squared(self, structure, points):
        rng = np.random.default_rng(40)
        for degree in range(structure.dim):
            q = random_field(MultiVectorField, degree, structure.dim, rng)
            assert delta_squared_residual(structure, q, points) < 1e-10

    @pytest.mark.parametrize("degrees", [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)])
    def test_derivation_rule(self, structure, points, degrees):
        r, s = degrees
        m = structure.dim
        rng = np.random.default_rng(50 + 3 * r + s)
        q1 = random_field(MultiVectorField, r, m, rng)
        q2 = random_field(MultiVectorField, s, m, rng)
        assert leibniz_residual(structure, q1, q2, points) < 1e-10

    @pytest.mark.parametrize("degree", [1, 2])
    def test_cartan_formula(self, structure, points, degree):
        m = structure.dim
        rng = np.random.default_rng(60 + degree)
        alpha = random_field(DifferentialForm, 1, m, rng)
        q = random_field(MultiVectorField, degree, m, rng)
        assert cartan_residual(structure, alpha, q, points) < 1e-10

    def test_musical_homomorphism(self, structure, points):
        m = structure.dim
        rng = np.random.default_rng(70)
        for _ in range(100):
            alpha = random_field(DifferentialForm, 1, m, rng)
            beta = random_field(DifferentialForm, 1, m, rng)
            assert musical_residual(structure, alpha, beta, points[:10]) < 1e-10

    def test_bracket_with_function(self, structure, points):
        m = structure.dim
        rng = np.random.default_rng(80)
        alpha = random_field(DifferentialForm, 1, m, rng)
        beta = random_field(DifferentialForm, 1, m, rng)
        f = random_polynomial(m, rng)
        assert bracket_function_residual(structure, alpha, beta, f, points) < 1e-10

    def test_contraction_by_bracket(self, structure, points):
        # i_[a,b] = L_a i_b - i_b L_a
        m = structure.dim
        rng = np.random.default_rng(90)
        alpha = random_field(DifferentialForm, 1, m, rng)
        beta = random_field(DifferentialForm, 1, m, rng)
        q = random_field(MultiVectorField, 2, m, rng)
        lhs = contract(koszul_bracket(structure, alpha, beta), q)
        rhs = lie_derivative(structure, alpha, contract(beta, q)) - contract(beta, lie_derivative(structure, alpha, q))
        assert (lhs - rhs).max_abs(points) < 1e-10

    def test_lie_derivative_of_bracket(self, structure, points):
        m = structure.dim
        rng = np.random.default_rng(91)
        alpha = random_field(DifferentialForm, 1, m, rng)
        beta = random_field(DifferentialForm, 1, m, rng)
        q = random_field(MultiVectorField, 1, m, rng)
        lhs = lie_derivative(structure, koszul_bracket(structure, alpha, beta), q)
        rhs = (lie_derivative(structure, alpha, lie_derivative(structure, beta, q))
               - lie_derivative(structure, beta, lie_derivative(structure, alpha, q)))
        assert (lhs - rhs).max_abs(points) < 1e-10


class TestModularVectorField:
    def test_aff1(self):
        pi = aff1_fixture().pi
        v = modular_vector_field(pi, DensityField(ONE))
        assert v.vector_at([0.3, -0.4]).tolist() == [0.0, -1.0]

    def test_solvable(self):
        pi = solvable_fixture().pi
        v = modular_vector_field(pi, DensityField(ONE))
        assert v.vector_at([0.1, 0.2, 0.3]).tolist() == [2.0, 0.0, 0.0]

    def test_unimodular(self, so3, points3):
        assert modular_vector_field(so3, DensityField(ONE), points3).max_abs(points3) == 0.0

    def test_density_change_adds_hamiltonian_field(self, so3, points3):
        f = coordinate(1)
        plain = modular_vector_field(so3, DensityField(ONE))
        scaled = modular_vector_field(so3, DensityField(parse_expr("exp(x1)", 3)))
        assert (scaled + hamiltonian_field(so3, f) - plain).max_abs(points3) < 1e-12

    def test_preserves_pi(self, points3):
        pi = solvable_fixture().pi
        v = modular_vector_field(pi, DensityField(ONE))
        assert lie_derivative_along(v, pi.as_bivector()).max_abs(points3) == 0.0

    def test_hamiltonian_fields_preserve_pi(self, so3, points3):
        x = hamiltonian_field(so3, parse_expr("x1^2 + x2*x3", 3))
        assert lie_derivative_along(x, so3.as_bivector()).max_abs(points3) < 1e-12

    def test_non_positive_density(self, so3):
        with pytest.raises(DensityError):
            modular_vector_field(so3, DensityField(coordinate(1)), [[-0.5, 0.0, 0.0]])
