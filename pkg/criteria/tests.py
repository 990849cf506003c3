import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings

from core.exceptions import EmptyGrid, InvalidInput, SingularInformation
from core.serializers import load
from core.strategies import designs_on, one_factor_betas
from model_core.domain import CustomIntensity, Design, DiscreteMeasure, ModelSpec, UniformMeasure
from model_core.information import design_info

from .efficiency import efficiency, efficiency_value, maximin_objective, maximin_profile
from .equivalence import (
    d_sensitivity, equivalence_check, imse_sensitivity, prediction_variance, sensitivities,
)
from .local import (
    CriterionSpec, criterion_value, d_homogeneous, d_value, imse_value, local_criterion,
    require_positive_definite,
)
from .serializers import CriterionSerializer

ENDPOINTS = [[0.0], [1.0]]


def one_factor():
    return ModelSpec.builtin('linear', lower=[0.0], upper=[1.0])


class CriterionValueTests(SimpleTestCase):
    def setUp(self):
        self.model = one_factor()
        self.xi = Design.uniform(ENDPOINTS)
        self.beta = [1.0, 1.0]

    def test_d_value_of_endpoint_design(self):
        m = design_info(self.model, self.xi, self.beta)
        self.assertAlmostEqual(d_value(m), 16.0, places=10)
        self.assertAlmostEqual(d_homogeneous(m, 2), 4.0, places=10)

    def test_imse_of_endpoint_design(self):
        value = imse_value(self.model, self.xi, self.beta, UniformMeasure(self.model.region))
        self.assertAlmostEqual(value, 2.0 / 3.0, places=12)

    def test_singular_design_is_infinite(self):
        xi = Design([[0.5]], [1.0])
        self.assertEqual(criterion_value(self.model, xi, self.beta, CriterionSpec.d()), np.inf)
        crit = CriterionSpec.imse(UniformMeasure(self.model.region))
        self.assertEqual(criterion_value(self.model, xi, self.beta, crit), np.inf)
        with self.assertRaises(SingularInformation):
            require_positive_definite(design_info(self.model, xi, self.beta))

    def test_local_criterion_is_homogeneous_for_d(self):
        crit = CriterionSpec.d()
        raw = criterion_value(self.model, self.xi, self.beta, crit)
        self.assertAlmostEqual(local_criterion(self.model, self.xi, self.beta, crit), raw ** 0.5, places=10)

    def test_d_value_scales_as_inverse_kappa_power(self):
        for basis, lower, upper in (('linear', [0.0], [1.0]), ('additive', [0, 0], [1, 1])):
            unit = ModelSpec.builtin(basis, lower=lower, upper=upper, kappa=1.0)
            shaped = ModelSpec.builtin(basis, lower=lower, upper=upper, kappa=3.0)
            xi = Design.uniform(unit.region.extremal_points())
            beta = [1.0] + [0.5] * (unit.p - 1)
            ratio = d_value(design_info(shaped, xi, beta)) / d_value(design_info(unit, xi, beta))
            self.assertAlmostEqual(ratio, 3.0 ** -unit.p, places=12)

    def test_imse_scales_with_kappa(self):
        shaped = ModelSpec.builtin('linear', lower=[0.0], upper=[1.0], kappa=3.0)
        nu = UniformMeasure(shaped.region)
        self.assertAlmostEqual(imse_value(shaped, self.xi, self.beta, nu), 3.0 * 2.0 / 3.0, places=12)
        nu = DiscreteMeasure([[0.5]], [1.0])
        ratio = imse_value(shaped, self.xi, self.beta, nu) / imse_value(self.model, self.xi, self.beta, nu)
        self.assertAlmostEqual(ratio, 3.0, places=12)

    def test_imse_needs_a_measure(self):
        with self.assertRaises(InvalidInput):
            CriterionSpec('IMSE')
        with self.assertRaises(InvalidInput):
            CriterionSpec('A')


class EquivalenceTests(SimpleTestCase):
    def setUp(self):
        self.model = one_factor()

    def test_endpoint_design_is_d_optimal(self):
        xi = Design.uniform(ENDPOINTS)
        certificate = equivalence_check(self.model, xi, [1.0, 1.0], CriterionSpec.d())
        self.assertTrue(certificate.passed)
        self.assertAlmostEqual(certificate.max_sensitivity, 2.0, places=10)
        self.assertEqual(certificate.bound, 2.0)

    def test_sensitivity_equals_bound_on_support(self):
        xi = Design.uniform(ENDPOINTS)
        for x in ENDPOINTS:
            self.assertAlmostEqual(d_sensitivity(self.model, xi, [1.0, 3.0], x), 2.0, places=10)

    def test_interior_support_fails(self):
        xi = Design.uniform([[0.0], [0.5]])
        certificate = equivalence_check(self.model, xi, [1.0, 0.0], CriterionSpec.d())
        self.assertFalse(certificate.passed)
        self.assertEqual(certificate.argmax, (1.0,))
        self.assertGreater(certificate.gap, 0.0)

    def test_uniform_imse_endpoint_design(self):
        nu = UniformMeasure(self.model.region)
        xi = Design.uniform(ENDPOINTS)
        certificate = equivalence_check(self.model, xi, [1.0, 1.0], CriterionSpec.imse(nu))
        self.assertTrue(certificate.passed)
        self.assertAlmostEqual(certificate.bound, 2.0 / 3.0, places=12)
        self.assertAlmostEqual(imse_sensitivity(self.model, xi, [1.0, 1.0], nu, [0.0]), 2.0 / 3.0, places=10)

    def test_singular_design_cannot_be_checked(self):
        with self.assertRaises(SingularInformation):
            sensitivities(self.model, Design([[0.0]], [1.0]), [1.0, 0.0], CriterionSpec.d(), ENDPOINTS)

    def test_prediction_variance(self):
        xi = Design.uniform(ENDPOINTS)
        np.testing.assert_allclose(prediction_variance(self.model, xi, [1.0, 0.0], ENDPOINTS), [2.0, 2.0])

    def test_constant_intensity_allows_negative_linear_component(self):
        model = ModelSpec(self.model.basis, self.model.region, CustomIntensity(np.ones_like, name='constant'))
        beta = [-1.0, 0.5]
        xi = Design.uniform(ENDPOINTS)
        self.assertTrue(equivalence_check(model, xi, beta, CriterionSpec.d()).passed)
        certificate = equivalence_check(model, xi, beta, CriterionSpec.imse(UniformMeasure(model.region)))
        self.assertTrue(certificate.passed)
        self.assertAlmostEqual(certificate.bound, 4.0 / 3.0, places=12)
        self.assertFalse(equivalence_check(model, Design.uniform([[0.0], [0.5]]), beta, CriterionSpec.d()).passed)

    @settings(max_examples=200, deadline=None)
    @given(beta=one_factor_betas())
    def test_endpoint_design_certified_for_every_parameter(self, beta):
        certificate = equivalence_check(self.model, Design.uniform(ENDPOINTS), beta, CriterionSpec.d())
        self.assertTrue(certificate.passed)


class EfficiencyTests(SimpleTestCase):
    def setUp(self):
        self.model = one_factor()
        self.optimum = Design.uniform(ENDPOINTS)
        self.crit = CriterionSpec.d()

    def test_optimum_has_efficiency_one(self):
        report = efficiency(self.model, self.optimum, [1.0, 1.0], self.crit, self.optimum)
        self.assertAlmostEqual(report.value, 1.0, places=12)
        self.assertEqual(report.beta, (1.0, 1.0))

    def test_singular_design_has_efficiency_zero(self):
        xi = Design([[0.5]], [1.0])
        self.assertEqual(efficiency_value(self.model, xi, [1.0, 1.0], self.crit, self.optimum), 0.0)

    def test_unbalanced_endpoint_design(self):
        xi = Design(ENDPOINTS, [0.25, 0.75])
        # det ratio 4 * 0.25 * 0.75
        self.assertAlmostEqual(efficiency_value(self.model, xi, [1.0, 1.0], self.crit, self.optimum),
                               np.sqrt(0.75), places=12)

    @settings(max_examples=200, deadline=None)
    @given(beta=one_factor_betas(), xi=designs_on([[0.0], [0.3], [0.7], [1.0]]))
    def test_efficiency_never_exceeds_one(self, beta, xi):
        self.assertLessEqual(efficiency_value(self.model, xi, beta, self.crit, self.optimum), 1.0 + 1e-9)

    def test_maximin_profile(self):
        xi = Design(ENDPOINTS, [0.25, 0.75])
        grid = [np.array([1.0, 0.0]), np.array([1.0, 2.0])]
        profile = maximin_profile(self.model, xi, self.crit, grid, [self.optimum, self.optimum])
        np.testing.assert_allclose(profile.efficiencies, [np.sqrt(0.75)] * 2, rtol=1e-12)
        self.assertAlmostEqual(profile.objective, 1.0 / np.sqrt(0.75), places=10)
        self.assertAlmostEqual(
            maximin_objective(self.model, xi, self.crit, grid, [self.optimum, self.optimum]),
            profile.objective, places=12)

    def test_maximin_profile_flags_grid_edge(self):
        xi = Design.uniform([[0.0], [0.5], [1.0]])
        grid = [np.array([1.0, 0.0]), np.array([1.0, 5.0])]
        optima = [self.optimum, self.optimum]
        profile = maximin_profile(self.model, xi, self.crit, grid, optima)
        self.assertEqual(profile.at_grid_edge, profile.worst_index == 1)

    def test_maximin_profile_rejects_empty_grid(self):
        with self.assertRaises(EmptyGrid):
            maximin_profile(self.model, self.optimum, self.crit, [], [])
        with self.assertRaises(InvalidInput):
            maximin_profile(self.model, self.optimum, self.crit, [np.array([1.0, 0.0])], [])


class CriterionSerializerTests(SimpleTestCase):
    def test_default_is_d(self):
        self.assertTrue(load(CriterionSerializer, {}).is_d)

    def test_imse_needs_nu(self):
        serializer = CriterionSerializer(data={'kind': 'IMSE'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('nu', serializer.errors)

    def test_discrete_imse(self):
        crit = load(CriterionSerializer, {'kind': 'IMSE', 'nu': {'kind': 'discrete', 'points': [[0.5]],
                                                                  'weights': [1.0]}})
        self.assertIsInstance(crit.nu, DiscreteMeasure)
