"""
Unit Tests for Contravariant Connections
========================================
"""

import math

import numpy as np
import pytest

from src.connection import (
    ConnectionSymbols,
    Metric,
    MetricError,
    TensorField,
    contra_derivative,
    canonical_poisson_connection,
    contract_curvature,
    contract_torsion,
    corrected_example_connection,
    curvature,
    curvature_matrix,
    curvature_operator,
    d_pi_residual,
    derivative_of_form,
    first_bianchi,
    flat_connection,
    inverse_metric,
    levi_civita_contra,
    levi_civita_symbols,
    literal_example_connection,
    metric_compatibility_residual,
    symmetrize,
    torsion,
    torsion_operator,
    transform_symbols_at,
    transport_generator,
    volume_weight,
)
from src.expr import ONE, ZERO, const, coordinate, diff, evaluate, mul, parse_expr
from src.expr.nodes import InverseEntry
from src.multivec import DifferentialForm, DimensionMismatchError, basis_form, directional, sharp
from src.utils.fixtures import (
    POISSON_FIXTURES,
    aff1_fixture,
    non_jacobi_fixture,
    quadratic_fixture,
    sl2_fixture,
    so3_fixture,
    solvable_fixture,
    symplectic_fixture,
)
from src.utils.sampling import random_covectors, random_field, random_polynomial, sample_points


@pytest.fixture
def so3():
    return so3_fixture().pi


@pytest.fixture
def quadratic():
    return quadratic_fixture().pi


@pytest.fixture
def curved_metric():
    return Metric.from_upper(2, {(0, 0): ONE, (1, 1): parse_expr("x1^2 + 1", 2)})


@pytest.fixture
def points2():
    return sample_points(2, 20, seed=3)


@pytest.fixture
def points3():
    return sample_points(3, 20, seed=3)


class TestSymbols:
    def test_build_and_lookup(self):
        conn = ConnectionSymbols.from_sparse(2, {(0, 1, 1): coordinate(1)})
        assert evaluate(conn.gamma(0, 1, 1), [3.0, 0.0]) == 3.0
        assert conn.gamma(1, 0, 0).is_zero
        assert conn.at([3.0, 0.0])[0, 1, 1] == 3.0
        assert conn.to_dict() == {"1.2.2": "x1"}

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            ConnectionSymbols(2, ((ZERO,),))
        with pytest.raises(ValueError):
            ConnectionSymbols.build(2, lambda i, j, k: ZERO, provenance="made_up")

    def test_flat(self):
        assert flat_connection(3).is_zero
        assert flat_connection(3).provenance == "flat"

    def test_canonical_symbols(self, so3):
        conn = canonical_poisson_connection(so3)
        # Gamma^{12}_3 = d pi^{12} / d x3 = 1
        assert evaluate(conn.gamma(0, 1, 2), []) == 1.0
        assert conn.provenance == "canonical_poisson"

    def test_transport_generator(self):
        symbols = np.zeros((2, 2, 2))
        symbols[1, 0, 0] = -1.0
        symbols[0, 1, 1] = 2.0
        m = transport_generator(symbols, [1.0, 3.0])
        # M[j, l] = sum_k a_k Gamma^{kl}_j
        assert m.tolist() == [[-3.0, 0.0], [0.0, 2.0]]


class TestTorsionAndCurvature:
    def test_canonical_torsion_is_bracket(self, so3, points3):
        t = torsion(so3, canonical_poisson_connection(so3))
        for p in points3[:3]:
            values = t.at(p)
            # T^{ij}_k = d_k pi^{ij}
            assert values[0, 1, 2] == 1.0
            assert values[1, 2, 0] == 1.0
            assert values[0, 2, 1] == -1.0

    def test_symmetrized_is_torsion_free(self, so3, points3):
        conn = symmetrize(so3, canonical_poisson_connection(so3))
        assert torsion(so3, conn).max_abs(points3) == 0.0

    @pytest.mark.parametrize("fixture", [so3_fixture, aff1_fixture, sl2_fixture, solvable_fixture])
    def test_canonical_on_lie_poisson_is_flat(self, fixture):
        pi = fixture().pi
        points = sample_points(pi.dim, 20, seed=3)
        assert curvature(pi, canonical_poisson_connection(pi)).max_abs(points) < 1e-12

    def test_torsion_tensor_matches_operator(self, quadratic, curved_metric, points2):
        conn = levi_civita_contra(quadratic, curved_metric)
        t = torsion(quadratic, conn)
        for i in range(2):
            for j in range(2):
                op = torsion_operator(quadratic, conn, basis_form(2, i), basis_form(2, j))
                for p in points2[:5]:
                    assert np.allclose(op.vector_at(p), t.at(p)[i, j, :], atol=1e-12)

    def test_curvature_tensor_matches_operator(self, quadratic, curved_metric, points2):
        conn = levi_civita_contra(quadratic, curved_metric)
        rt = curvature(quadratic, conn)
        assert rt.max_abs(points2) > 1e-3
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    op = curvature_operator(quadratic, conn, basis_form(2, i), basis_form(2, j), basis_form(2, k))
                    for p in points2[:5]:
                        assert np.allclose(op.vector_at(p), rt.at(p)[i, j, k, :], atol=1e-10)

    def test_canonical_curvature_of_quadratic_structure(self, quadratic):
        # pi^{12} = x1 x2: R^{121}_1 = -x1 x2, R^{122}_2 = x1 x2
        rt = curvature(quadratic, canonical_poisson_connection(quadratic)).at([1.0, 1.0])
        expected = np.zeros((2, 2, 2, 2))
        expected[0, 1, 0, 0] = -1.0
        expected[0, 1, 1, 1] = 1.0
        expected[1, 0] = -expected[0, 1]
        assert np.allclose(rt, expected, atol=1e-14)

    @pytest.mark.parametrize("name", sorted(POISSON_FIXTURES))
    def test_operators_match_tensors_for_random_connections(self, name):
        pi = POISSON_FIXTURES[name]().pi
        m = pi.dim
        rng = np.random.default_rng(23)
        conn = ConnectionSymbols.build(m, lambda i, j, k: random_polynomial(m, rng, max_degree=1))
        t = torsion(pi, conn)
        rt = curvature(pi, conn)
        for p in sample_points(m, 50, seed=29):
            a, b, c = random_covectors(m, 3, rng)
            forms = [DifferentialForm.from_list(m, [const(float(v)) for v in w]) for w in (a, b, c)]
            top = torsion_operator(pi, conn, forms[0], forms[1]).vector_at(p)
            assert np.allclose(top, contract_torsion(t, a, b, p), atol=1e-10)
            rop = curvature_operator(pi, conn, *forms).vector_at(p)
            assert np.allclose(rop, contract_curvature(rt, a, b, c, p), atol=1e-9)

    def test_numeric_contractions(self, quadratic, curved_metric):
        conn = levi_civita_contra(quadratic, curved_metric)
        rt = curvature(quadratic, conn)
        p = [0.4, -0.3]
        a, b, c = np.array([1.0, 2.0]), np.array([-1.0, 0.5]), np.array([0.3, 0.7])
        r_abc = contract_curvature(rt, a, b, c, p)
        assert np.allclose(curvature_matrix(rt.at(p), a, b) @ c, r_abc, atol=1e-14)
        tab = contract_torsion(torsion(quadratic, conn), a, b, p)
        assert tab.shape == (2,)

    def test_first_bianchi(self, quadratic, curved_metric, points2):
        conn = levi_civita_contra(quadratic, curved_metric)
        forms = [basis_form(2, 0), basis_form(2, 1), basis_form(2, 0)]
        assert first_bianchi(quadratic, conn, *forms).max_abs(points2) < 1e-9

    def test_first_bianchi_with_torsion(self, so3, points3):
        conn = canonical_poisson_connection(so3)
        forms = [basis_form(3, 0), basis_form(3, 1), basis_form(3, 2)]
        assert first_bianchi(so3, conn, *forms).max_abs(points3) < 1e-12

    def test_dimension_checked(self, so3):
        with pytest.raises(DimensionMismatchError):
            torsion(so3, flat_connection(2))


class TestPoissonConnections:
    def test_canonical_preserves_pi(self, so3, points3):
        assert d_pi_residual(so3, canonical_poisson_connection(so3)).max_abs(points3) < 1e-14

    def test_canonical_fails_without_jacobi(self, points3):
        pi = non_jacobi_fixture().pi
        assert d_pi_residual(pi, canonical_poisson_connection(pi)).max_abs(points3) > 1e-3

    @pytest.mark.parametrize("name", sorted(POISSON_FIXTURES))
    def test_canonical_is_poisson_on_every_fixture(self, name):
        pi = POISSON_FIXTURES[name]().pi
        points = sample_points(pi.dim, 20, seed=3)
        assert d_pi_residual(pi, canonical_poisson_connection(pi)).max_abs(points) < 1e-10

    def test_leibniz_rule_in_tensor_argument(self, quadratic, curved_metric, points2):
        conn = levi_civita_contra(quadratic, curved_metric)
        rng = np.random.default_rng(5)
        alpha = random_field(DifferentialForm, 1, 2, rng)
        f = random_polynomial(2, rng)
        k = TensorField.build(1, 1, 2, lambda idx: random_polynomial(2, rng))
        fk = TensorField.build(1, 1, 2, lambda idx: mul(f, k[idx]))
        lhs = contra_derivative(quadratic, conn, alpha, fk)
        dk = contra_derivative(quadratic, conn, alpha, k)
        af = directional(sharp(quadratic, alpha).as_list(), f)
        for p in points2[:5]:
            expected = evaluate(f, p) * dk.at(p) + evaluate(af, p) * k.at(p)
            assert np.allclose(lhs.at(p), expected, atol=1e-10)

    def test_linear_over_functions_in_direction(self, so3, points3):
        conn = canonical_poisson_connection(so3)
        rng = np.random.default_rng(6)
        alpha = random_field(DifferentialForm, 1, 3, rng)
        f = random_polynomial(3, rng)
        k = TensorField.build(2, 0, 3, lambda idx: random_polynomial(3, rng))
        lhs = contra_derivative(so3, conn, alpha.scale(f), k)
        rhs = contra_derivative(so3, conn, alpha, k)
        for p in points3[:5]:
            assert np.allclose(lhs.at(p), evaluate(f, p) * rhs.at(p), atol=1e-10)

    def test_derivative_of_form(self, so3):
        conn = canonical_poisson_connection(so3)
        # D_{dx1} dx2 = [dx1, dx2] = dx3
        out = derivative_of_form(so3, conn, basis_form(3, 0), basis_form(3, 1))
        assert out.vector_at([0.5, 0.5, 0.5]).tolist() == [0.0, 0.0, 1.0]

    def test_vector_derivative_is_dual_to_form_derivative(self, quadratic, curved_metric, points2):
        conn = levi_civita_contra(quadratic, curved_metric)
        alpha = DifferentialForm.from_list(2, [parse_expr("x2 + 1", 2), coordinate(1)])
        beta = DifferentialForm.from_list(2, [coordinate(1), ONE])
        x = [coordinate(2), parse_expr("x1^2", 2)]
        dx = contra_derivative(quadratic, conn, alpha, TensorField(1, 0, 2, tuple(x)))
        dbeta = derivative_of_form(quadratic, conn, alpha, beta)
        paired = parse_expr("x2*x1 + x1^2", 2)
        direction = sharp(quadratic, alpha).as_list()
        for p in points2[:5]:
            lhs = sum(evaluate(dx[i], p) * beta.vector_at(p)[i] for i in range(2))
            rhs = evaluate(directional(direction, paired), p) - np.dot([evaluate(e, p) for e in x], dbeta.vector_at(p))
            assert lhs == pytest.approx(rhs, abs=1e-12)


class TestAffineExamples:
    @pytest.fixture
    def aff1(self):
        return aff1_fixture().pi

    def test_literal_connection_has_torsion(self, aff1, points2):
        t = torsion(aff1, literal_example_connection())
        assert t.at(points2[0])[0, 1, 1] == 1.0

    def test_corrected_connection(self, aff1, points2):
        conn = corrected_example_connection()
        assert torsion(aff1, conn).max_abs(points2) == 0.0
        assert d_pi_residual(aff1, conn).max_abs(points2) == 0.0


class TestMetricInduced:
    def test_euclidean_symbols_vanish(self, so3):
        conn = levi_civita_contra(so3, Metric.euclidean(3))
        assert conn.is_zero
        assert conn.provenance == "levi_civita"

    def test_inverse(self, curved_metric):
        inv = inverse_metric(curved_metric)
        p = [0.5, 0.0]
        matrix = np.array([[evaluate(e, p) for e in row] for row in inv])
        assert np.allclose(matrix @ curved_metric.at(p), np.eye(2))

    def test_christoffel_symbols(self, curved_metric):
        lc = levi_civita_symbols(curved_metric)
        p = [0.5, 0.0]
        # Gamma^2_{12} = x1 / (x1^2 + 1), Gamma^1_{22} = -x1
        assert evaluate(lc[1][0][1], p) == pytest.approx(0.5 / 1.25)
        assert evaluate(lc[0][1][1], p) == pytest.approx(-0.5)

    def test_contravariant_symbols_for_constant_structure(self, curved_metric):
        pi = symplectic_fixture().pi
        conn = levi_civita_contra(pi, curved_metric)
        # Gamma^{11}_2 = x1, Gamma^{12}_1 = -x1/(x1^2 + 1), Gamma^{22}_2 = x1/(x1^2 + 1)
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 1] = 0.5
        expected[0, 1, 0] = -0.4
        expected[1, 1, 1] = 0.4
        assert np.allclose(conn.at([0.5, -0.7]), expected, atol=1e-14)

    def test_metric_compatibility(self, curved_metric, points2):
        assert metric_compatibility_residual(curved_metric, points2) < 1e-12

    @pytest.fixture
    def metric5(self):
        return Metric.from_upper(5, {
            (0, 0): ONE, (0, 2): parse_expr("0.5*x3", 5), (1, 1): parse_expr("x1^2 + 1", 5),
            (2, 2): const(2.0), (3, 3): parse_expr("exp(x2)", 5), (4, 4): ONE,
        })

    def test_inverse_above_four_dimensions_is_per_point(self, metric5):
        inv = inverse_metric(metric5)
        assert isinstance(inv[0][2], InverseEntry)
        cofactors = inverse_metric(metric5, symbolic=True)
        for p in sample_points(5, 5, seed=4):
            matrix = np.array([[evaluate(e, p) for e in row] for row in inv])
            assert np.allclose(matrix, np.linalg.inv(metric5.at(p)), atol=1e-14)
            for i, j, l in [(0, 2, 2), (1, 1, 0), (3, 3, 1), (0, 0, 2)]:
                assert evaluate(diff(inv[i][j], l), p) == pytest.approx(evaluate(diff(cofactors[i][j], l), p), abs=1e-12)

    def test_metric_compatibility_above_four_dimensions(self, metric5):
        assert metric_compatibility_residual(metric5, sample_points(5, 10, seed=4)) < 1e-12

    def test_volume_weight(self, curved_metric):
        assert evaluate(volume_weight(curved_metric), [2.0, 0.0]) == pytest.approx(math.sqrt(5.0))

    def test_indefinite_metric(self):
        g = Metric.from_upper(2, {(0, 0): ONE, (1, 1): const(-1.0)})
        with pytest.raises(MetricError):
            g.check([[0.0, 0.0]])

    def test_non_symmetric_metric(self):
        with pytest.raises(MetricError):
            Metric(2, ((ONE, coordinate(1)), (ZERO, ONE)))

    def test_dimension_mismatch(self, so3):
        with pytest.raises(MetricError):
            levi_civita_contra(so3, Metric.euclidean(2))


class TestChangeOfChart:
    def test_identity(self, so3):
        conn = canonical_poisson_connection(so3)
        x0 = [0.2, -0.1, 0.4]
        forward = [coordinate(1), coordinate(2), coordinate(3)]
        assert np.allclose(transform_symbols_at(so3, conn, forward, x0), conn.at(x0))

    def test_linear_scaling(self, so3):
        conn = canonical_poisson_connection(so3)
        x0 = [0.2, -0.1, 0.4]
        forward = [parse_expr(f"2*x{k}", 3) for k in (1, 2, 3)]
        assert np.allclose(transform_symbols_at(so3, conn, forward, x0), 2.0 * conn.at(x0))

    @pytest.mark.parametrize("name, texts, x0", [
        ("quadratic", ["x1", "x2 + x1^2"], [0.3, -0.2]),
        ("so3", ["x1", "x2 + x1^2", "x3"], [0.3, -0.2, 0.5]),
    ])
    def test_nonlinear_change_matches_derivative_of_coframe(self, curved_metric, name, texts, x0):
        pi = POISSON_FIXTURES[name]().pi
        m = pi.dim
        conn = levi_civita_contra(pi, curved_metric) if m == 2 else canonical_poisson_connection(pi)
        forward = [parse_expr(t, m) for t in texts]
        coframe = [DifferentialForm.from_list(m, [diff(y, i) for i in range(m)]) for y in forward]
        jac = np.array([dy.vector_at(x0) for dy in coframe])
        jinv = np.linalg.inv(jac)
        transformed = transform_symbols_at(pi, conn, forward, x0)
        tensorial = np.einsum("ai,bj,kc,ijk->abc", jac, jac, jinv, conn.at(x0))
        assert np.abs(transformed - tensorial).max() > 1e-3
        # D_{dy^a} dy^b computed in x, read off in the dy coframe
        for a in range(m):
            for b in range(m):
                in_x = derivative_of_form(pi, conn, coframe[a], coframe[b]).vector_at(x0)
                assert np.allclose(in_x @ jinv, transformed[a, b], atol=1e-12)

    def test_singular_change(self, so3):
        conn = canonical_poisson_connection(so3)
        forward = [coordinate(1), coordinate(1), coordinate(3)]
        with pytest.raises(ValueError, match="singular"):
            transform_symbols_at(so3, conn, forward, [0.0, 0.0, 0.0])


class TestTensorField:
    def test_indexing(self):
        t = TensorField.build(1, 1, 2, lambda idx: const(10 * idx[0] + idx[1]))
        assert evaluate(t[1, 0], []) == 10.0
        assert t.rank == 2
        with pytest.raises(IndexError):
            t[0, 0, 0]

    def test_component_count_checked(self):
        with pytest.raises(ValueError):
            TensorField(1, 1, 2, (ZERO,))
