import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from rest_framework import serializers

from core.exceptions import InvalidInput, NonpositiveLinearComponent, OutOfRegion
from core.serializers import load
from core.strategies import one_factor_betas, random_designs, two_factor_betas

from .domain import (
    Box, CandidateSet, CustomIntensity, Design, DiscreteMeasure, GammaInverseLink, ModelSpec, UniformMeasure,
    builtin_basis, mixture,
)
from .information import (
    check_parameter, design_info, elemental_info, eval_basis, in_parameter_region, intensity, intensity_values,
    mean_response, positivity_points, sample_parameters, uniform_quadrature, weight_matrix_v,
)
from .serializers import DesignSerializer, ModelSpecSerializer, WeightingMeasureSerializer


def one_factor():
    return ModelSpec.builtin('linear', lower=[0.0], upper=[1.0])


def two_factor():
    return ModelSpec.builtin('additive', lower=[0.0, 0.0], upper=[1.0, 1.0])


def exponential_intensity_model():
    return ModelSpec(builtin_basis('linear', 1), Box([0.0], [1.0]), CustomIntensity(np.exp, name='exp'))


class RegionTests(SimpleTestCase):
    def test_vertices_are_lexicographic(self):
        vertices = Box([0, 0], [1, 1]).extremal_points()
        np.testing.assert_array_equal(vertices, [[0, 0], [0, 1], [1, 0], [1, 1]])

    def test_empty_box_is_rejected(self):
        with self.assertRaises(InvalidInput):
            Box([0.0], [0.0])

    def test_grid_respects_cap(self):
        grid = Box([0, 0], [1, 1]).grid(101, cap=100)
        self.assertLessEqual(grid.shape[0], 100)
        self.assertEqual(grid.shape[1], 2)

    def test_contains(self):
        box = Box([0.0], [1.0])
        np.testing.assert_array_equal(box.contains([[0.0], [1.0], [1.5]]), [True, True, False])

    def test_candidate_set_membership(self):
        region = CandidateSet([[0.0], [0.5], [1.0]])
        np.testing.assert_array_equal(region.contains([[0.5], [0.25]]), [True, False])
        self.assertEqual(region.as_dict(), {'candidates': [[0.0], [0.5], [1.0]]})


class ModelSpecTests(SimpleTestCase):
    def test_dimensions(self):
        model = two_factor()
        self.assertEqual(model.p, 3)
        self.assertEqual(model.dim_x, 2)
        self.assertEqual(model.kappa, 1.0)

    def test_basis_region_mismatch(self):
        with self.assertRaises(InvalidInput):
            ModelSpec(builtin_basis('linear', 1), Box([0, 0], [1, 1]))

    def test_quadratic_basis_needs_three_candidates(self):
        with self.assertRaises(InvalidInput):
            ModelSpec.builtin('quadratic', candidates=[[0.0], [1.0]])
        model = ModelSpec.builtin('quadratic', candidates=[[0.0], [0.5], [1.0]])
        self.assertEqual(model.p, 3)

    def test_quadratic_basis_is_one_factor(self):
        with self.assertRaises(InvalidInput):
            builtin_basis('quadratic', 2)

    def test_nonpositive_kappa(self):
        with self.assertRaises(InvalidInput):
            ModelSpec.builtin('linear', kappa=0.0)

    def test_gamma_model_round_trip_keeps_kappa(self):
        model = ModelSpec(builtin_basis('linear', 1), Box([0.0], [2.0]), GammaInverseLink(2.5))
        again = load(ModelSpecSerializer, model.as_dict())
        self.assertTrue(again.is_gamma)
        self.assertEqual(again.kappa, 2.5)
        self.assertEqual(again.region, model.region)


class CustomIntensityTests(SimpleTestCase):
    def test_no_kappa_and_no_positivity_requirement(self):
        model = exponential_intensity_model()
        self.assertIsNone(model.kappa)
        self.assertFalse(model.is_gamma)
        np.testing.assert_array_equal(check_parameter(model, [-1.0, -2.0]), [-1.0, -2.0])
        self.assertTrue(in_parameter_region(model, [-1.0, -2.0]))

    def test_intensity_of_negative_linear_component(self):
        model = exponential_intensity_model()
        _, lam = intensity_values(model, [[0.0], [1.0]], [-1.0, -2.0])
        np.testing.assert_allclose(lam, [np.exp(-1.0), np.exp(-3.0)], rtol=1e-15)
        self.assertAlmostEqual(intensity(model, 0.0), 1.0)

    def test_information_uses_the_custom_intensity(self):
        model = exponential_intensity_model()
        m = design_info(model, Design.uniform([[0.0], [1.0]]), [0.0, -1.0])
        e = np.exp(-1.0)
        np.testing.assert_allclose(m, [[(1 + e) / 2, e / 2], [e / 2, e / 2]], rtol=1e-14)

    def test_intensity_must_be_positive(self):
        model = ModelSpec(builtin_basis('linear', 1), Box([0.0], [1.0]), CustomIntensity(lambda z: z))
        with self.assertRaises(InvalidInput):
            design_info(model, Design.uniform([[0.0], [1.0]]), [-1.0, 0.5])

    def test_custom_model_cannot_be_written_as_json(self):
        with self.assertRaises(InvalidInput):
            exponential_intensity_model().as_dict()


class DesignTests(SimpleTestCase):
    def test_weights_must_sum_to_one(self):
        with self.assertRaises(InvalidInput):
            Design([[0.0], [1.0]], [0.5, 0.6])

    def test_weights_must_be_positive(self):
        with self.assertRaises(InvalidInput):
            Design([[0.0], [1.0]], [1.5, -0.5])

    def test_coincident_points_merge(self):
        xi = Design([[0.0], [1.0], [0.0]], [0.25, 0.5, 0.25])
        self.assertEqual(len(xi), 2)
        self.assertAlmostEqual(xi.weight_at([0.0]), 0.5)

    def test_flat_one_factor_support(self):
        xi = Design([0.0, 1.0], [0.5, 0.5])
        self.assertEqual(xi.support.shape, (2, 1))

    def test_canonical_order(self):
        xi = Design([[1, 1], [0, 1], [0, 0]], [0.2, 0.3, 0.5]).canonical()
        np.testing.assert_array_equal(xi.support, [[0, 0], [0, 1], [1, 1]])
        np.testing.assert_allclose(xi.weights, [0.5, 0.3, 0.2])

    def test_arrays_are_read_only(self):
        xi = Design.uniform([[0.0], [1.0]])
        with self.assertRaises(ValueError):
            xi.weights[0] = 1.0

    def test_normalized_prunes(self):
        xi = Design.normalized([[0.0], [0.5], [1.0]], [0.5, 1e-12, 0.5], prune=1e-9)
        self.assertEqual(len(xi), 2)

    def test_mixture(self):
        left = Design.uniform([[0.0], [1.0]])
        right = Design([[1.0]], [1.0])
        mixed = mixture([left, right])
        self.assertAlmostEqual(mixed.weight_at([1.0]), 0.75)

    def test_same_measure_ignores_order(self):
        a = Design([[0.0], [1.0]], [0.3, 0.7])
        b = Design([[1.0], [0.0]], [0.7, 0.3])
        self.assertTrue(a.same_measure(b))


class MeasureTests(SimpleTestCase):
    def test_uniform_needs_a_box(self):
        with self.assertRaises(InvalidInput):
            UniformMeasure(CandidateSet([[0.0], [1.0]]))

    def test_discrete_weights_sum(self):
        with self.assertRaises(InvalidInput):
            DiscreteMeasure([[0.0], [1.0]], [0.5, 0.4])


class InformationTests(SimpleTestCase):
    def test_endpoint_design_information(self):
        model = one_factor()
        m = design_info(model, Design.uniform([[0.0], [1.0]]), [1.0, 1.0])
        np.testing.assert_allclose(m, [[0.625, 0.125], [0.125, 0.125]], rtol=1e-14)
        self.assertAlmostEqual(np.linalg.det(m), 1.0 / 16.0, places=14)

    def test_intensity(self):
        self.assertEqual(intensity(one_factor(), 2.0), 0.25)

    def test_nonpositive_linear_component_reports_location(self):
        with self.assertRaises(NonpositiveLinearComponent) as ctx:
            check_parameter(one_factor(), [1.0, -1.0])
        self.assertEqual(ctx.exception.index, 1)
        self.assertEqual(ctx.exception.point, [1.0])

    def test_parameter_region_membership(self):
        model = two_factor()
        self.assertTrue(in_parameter_region(model, [1.0, 3.0, 3.0]))
        self.assertTrue(in_parameter_region(model, [1.0, -3 / 7, -3 / 7]))
        self.assertFalse(in_parameter_region(model, [1.0, -0.6, -0.6]))

    def test_eval_basis_checks_region(self):
        with self.assertRaises(OutOfRegion):
            eval_basis(one_factor(), [2.0])

    def test_quadratic_positivity_uses_a_grid(self):
        model = ModelSpec.builtin('quadratic', lower=[0.0], upper=[1.0])
        self.assertGreater(positivity_points(model).shape[0], 2)
        # positive at both ends but not at x = 1/2
        self.assertFalse(in_parameter_region(model, [1.0, -4.2, 4.2]))

    def test_mean_response(self):
        np.testing.assert_allclose(mean_response(one_factor(), [[0.0], [1.0]], [1.0, 1.0]), [1.0, 0.5])

    def test_quadrature_weights_are_probabilities(self):
        nodes, weights = uniform_quadrature(Box([0, 0], [2, 3]), order=8)
        self.assertEqual(nodes.shape, (64, 2))
        self.assertAlmostEqual(weights.sum(), 1.0, places=14)

    def test_uniform_weight_matrix_flat_parameter(self):
        model = one_factor()
        v = weight_matrix_v(model, [1.0, 0.0], UniformMeasure(model.region))
        np.testing.assert_allclose(v, [[1.0, 0.5], [0.5, 1.0 / 3.0]], rtol=1e-13)

    def test_uniform_weight_matrix_sloped_parameter(self):
        model = one_factor()
        v = weight_matrix_v(model, [1.0, 1.0], UniformMeasure(model.region))
        np.testing.assert_allclose(v, [[7 / 24, 1 / 12], [1 / 12, 1 / 24]], rtol=1e-12)

    def test_discrete_weighting_points_must_be_in_region(self):
        with self.assertRaises(OutOfRegion):
            weight_matrix_v(one_factor(), [1.0, 1.0], DiscreteMeasure([[2.0]], [1.0]))

    def test_endpoint_weighting_measure(self):
        # lambda(0) = 1, lambda(1) = 1/4
        v = weight_matrix_v(one_factor(), [1.0, 1.0], DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5]))
        np.testing.assert_allclose(v, [[17 / 32, 1 / 32], [1 / 32, 1 / 32]], rtol=1e-14)

    def test_midpoint_weighting_measure(self):
        v = weight_matrix_v(one_factor(), [1.0, 1.0], DiscreteMeasure([[0.5]], [1.0]))
        np.testing.assert_allclose(v, 16 / 81 * np.array([[1.0, 0.5], [0.5, 0.25]]), rtol=1e-14)

    def test_elemental_info_is_a_one_point_design(self):
        model = two_factor()
        beta = [1.0, 3.0, 3.0]
        mu = elemental_info(model, [0.25, 1.0], beta)
        np.testing.assert_allclose(mu, design_info(model, Design([[0.25, 1.0]], [1.0]), beta), rtol=1e-15)
        f = np.array([1.0, 0.25, 1.0])
        np.testing.assert_allclose(mu, np.outer(f, f) / 4.75 ** 2, rtol=1e-14)

    def test_elemental_info_needs_positive_linear_component(self):
        with self.assertRaises(NonpositiveLinearComponent):
            elemental_info(one_factor(), [1.0], [1.0, -1.0])
        with self.assertRaises(NonpositiveLinearComponent):
            elemental_info(one_factor(), [1.0], [1.0, -2.0])

    def test_design_info_is_the_weighted_elemental_sum(self):
        model = one_factor()
        xi = Design([[0.0], [0.4], [1.0]], [0.2, 0.3, 0.5])
        expected = sum(w * elemental_info(model, x, [1.0, 2.0]) for x, w in zip(xi.support, xi.weights))
        np.testing.assert_allclose(design_info(model, xi, [1.0, 2.0]), expected, rtol=1e-14)

    def test_sampled_parameters_are_admissible(self):
        model = two_factor()
        betas = sample_parameters(model, 25, np.random.default_rng(0))
        self.assertEqual(len(betas), 25)
        self.assertTrue(all(in_parameter_region(model, beta) for beta in betas))


class InformationPropertyTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(beta=two_factor_betas(), xi=random_designs(Box([0, 0], [1, 1])),
           scale=st.floats(min_value=0.2, max_value=5.0))
    def test_scale_law(self, beta, xi, scale):
        model = two_factor()
        m = design_info(model, xi, beta)
        np.testing.assert_allclose(design_info(model, xi, scale * beta), m / scale ** 2, rtol=1e-10, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(beta=one_factor_betas(), scale=st.floats(min_value=0.2, max_value=5.0))
    def test_weight_matrix_scale_law(self, beta, scale):
        model = one_factor()
        nu = UniformMeasure(model.region)
        v = weight_matrix_v(model, beta, nu)
        np.testing.assert_allclose(weight_matrix_v(model, scale * beta, nu), v / scale ** 4, rtol=1e-10, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(beta=two_factor_betas(), xi=random_designs(Box([0, 0], [1, 1])),
           kappa=st.floats(min_value=0.1, max_value=10.0))
    def test_information_is_linear_in_kappa(self, beta, xi, kappa):
        unit = ModelSpec.builtin('additive', lower=[0, 0], upper=[1, 1], kappa=1.0)
        shaped = ModelSpec.builtin('additive', lower=[0, 0], upper=[1, 1], kappa=kappa)
        np.testing.assert_allclose(design_info(shaped, xi, beta), kappa * design_info(unit, xi, beta),
                                   rtol=1e-12, atol=0)

    @settings(max_examples=50, deadline=None)
    @given(beta=one_factor_betas(), kappa=st.floats(min_value=0.1, max_value=10.0))
    def test_weight_matrix_is_quadratic_in_kappa(self, beta, kappa):
        unit = ModelSpec.builtin('linear', kappa=1.0)
        shaped = ModelSpec.builtin('linear', kappa=kappa)
        nu = UniformMeasure(unit.region)
        np.testing.assert_allclose(weight_matrix_v(shaped, beta, nu), kappa ** 2 * weight_matrix_v(unit, beta, nu),
                                   rtol=1e-12, atol=0)

    @settings(max_examples=100, deadline=None)
    @given(beta=two_factor_betas(), xi=random_designs(Box([0, 0], [1, 1])))
    def test_information_is_symmetric_psd(self, beta, xi):
        m = design_info(two_factor(), xi, beta)
        np.testing.assert_array_equal(m, m.T)
        self.assertGreaterEqual(np.linalg.eigvalsh(m).min(), -1e-12 * np.trace(m))


class SerializerTests(SimpleTestCase):
    def test_model_defaults_to_unit_box(self):
        model = load(ModelSpecSerializer, {'dim_x': 2, 'basis': 'additive'})
        self.assertEqual(model.region, Box([0, 0], [1, 1]))
        self.assertEqual(model.p, 3)

    def test_model_rejects_negative_kappa(self):
        serializer = ModelSpecSerializer(data={'dim_x': 1, 'kappa': -1})
        self.assertFalse(serializer.is_valid())
        self.assertIn('kappa', serializer.errors)

    def test_region_needs_one_form(self):
        serializer = ModelSpecSerializer(data={'dim_x': 1, 'region': {'lower': [0], 'upper': [1],
                                                                       'candidates': [[0], [1]]}})
        self.assertFalse(serializer.is_valid())

    def test_design_lengths(self):
        with self.assertRaises(serializers.ValidationError):
            load(DesignSerializer, {'support': [[0], [1]], 'weights': [1.0]})

    def test_design_region_check(self):
        with self.assertRaises(serializers.ValidationError):
            load(DesignSerializer, {'support': [[0], [2]], 'weights': [0.5, 0.5]}, model=one_factor())

    def test_design_with_bare_numbers(self):
        xi = load(DesignSerializer, {'support': [0, 1], 'weights': [0.5, 0.5]}, model=one_factor())
        np.testing.assert_array_equal(xi.support, [[0.0], [1.0]])

    def test_uniform_measure_uses_model_region(self):
        model = two_factor()
        nu = load(WeightingMeasureSerializer, {'kind': 'uniform'}, model=model)
        self.assertEqual(nu.region, model.region)

    def test_round_trip_keeps_order_and_weights(self):
        xi = Design([[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]], [0.1, 0.2, 0.7])
        again = load(DesignSerializer, xi.as_dict())
        np.testing.assert_array_equal(again.support, xi.support)
        np.testing.assert_array_equal(again.weights, xi.weights)
