import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings
from hypothesis import strategies as st

from core.conf import DEFAULTS
from core.exceptions import (
    EquivalenceCheckFailed, InvalidInput, OutOfParameterRegion, OutOfRegion, SingularInformation, WrongModelShape,
)
from core.serializers import load
from core.strategies import one_factor_betas
from criteria.efficiency import efficiency_value
from criteria.equivalence import equivalence_check
from criteria.local import CriterionSpec
from model_core.domain import Box, CustomIntensity, Design, ModelSpec, UniformMeasure
from transforms.equivariance import INTERCEPT_RESCALED, make_pair, transfer_optimal
from transforms.maps import full_reflection, reflection

from .closed_forms import (
    B1, B2, B3, B4, CORNER, INTERIOR, MAXIMIN_EQUAL_SLOPES_WEIGHT, NU_VARIANTS, ORIGIN, RIGHT, TOP,
    beta1_zero_design, classify_region, det_beta1_zero, equal_slopes_closed_form, equal_slopes_det,
    equal_slopes_efficiency_cubed, equal_slopes_limit_efficiency, equal_slopes_weights,
    one_factor_model, prop1_closed_form, prop1_measure, prop1_weights, reduced_parameter,
    region_design, two_factor_model, w_star_beta1_zero,
)
from .local import default_candidates, local_opt_design
from .maximin import (
    InvariantFamily, equal_slopes_family, equal_slopes_gammas, equal_slopes_maximin,
    golden_section_maximize, invariant_family_curve,
)
from .serializers import DesignResultSerializer, OptimizeOptionsSerializer
from .weights import OptimizeOptions, _WeightProblem, optimal_weights_fixed_support

VERTICES = (ORIGIN, TOP, RIGHT, CORNER)


def imse_uniform(model):
    return CriterionSpec.imse(UniformMeasure(model.region))


class FixedSupportTests(SimpleTestCase):
    def test_one_factor_d_optimum(self):
        model = one_factor_model()
        result = optimal_weights_fixed_support(model, [1.0, 1.0], CriterionSpec.d(), [[0.0], [1.0]])
        np.testing.assert_allclose(result.design.weights, [0.5, 0.5], atol=1e-9)
        self.assertTrue(result.certificate.passed)
        # det(M)^-1 = 16
        self.assertAlmostEqual(result.criterion_value, 16.0, places=6)

    def test_too_few_points_are_singular(self):
        model = two_factor_model()
        with self.assertRaises(SingularInformation):
            optimal_weights_fixed_support(model, [1.0, 0.0, 0.0], CriterionSpec.d(), [ORIGIN, CORNER])

    def test_support_outside_region(self):
        with self.assertRaises(OutOfRegion):
            optimal_weights_fixed_support(one_factor_model(), [1.0, 0.0], CriterionSpec.d(), [[0.0], [2.0]])

    def test_options_must_be_positive(self):
        with self.assertRaises(InvalidInput):
            OptimizeOptions(max_iters=0)

    def test_options_from_settings(self):
        opts = OptimizeOptions.from_settings(max_iters=5, weight_tol=None)
        self.assertEqual(opts.max_iters, 5)
        self.assertEqual(opts.weight_tol, DEFAULTS['WEIGHT_TOL'])

    def test_imse_step_is_exact_on_minimal_support(self):
        model = one_factor_model()
        problem = _WeightProblem(model, np.array([1.0, 3.0]), imse_uniform(model), np.array([[0.0], [1.0]]))
        _, sens, bound = problem.evaluate(np.array([0.9, 0.1]))
        w = problem.update(np.array([0.9, 0.1]), sens, bound)
        _, sens, bound = problem.evaluate(w)
        np.testing.assert_allclose(sens, [bound, bound], rtol=1e-10)
        np.testing.assert_allclose(problem.update(w, sens, bound), w, rtol=1e-10)

    def test_interior_parameter_keeps_four_points(self):
        result = optimal_weights_fixed_support(two_factor_model(), [1.0, 0.0, 0.0], CriterionSpec.d(), VERTICES)
        np.testing.assert_allclose(result.design.weights_on(VERTICES), [0.25] * 4, atol=1e-8)


class ProportionTests(SimpleTestCase):
    """Closed-form IMSE weights on [0, 1] against the numerical optimizer"""

    @settings(max_examples=30, deadline=None)
    @given(beta=one_factor_betas(), variant=st.sampled_from(NU_VARIANTS))
    def test_closed_form_matches_optimizer(self, beta, variant):
        model = one_factor_model()
        crit = CriterionSpec.imse(prop1_measure(variant, model))
        computed = local_opt_design(model, beta, crit).design.weights_on([[0.0], [1.0]])
        np.testing.assert_allclose(computed, prop1_weights(beta, variant), atol=1e-6)

    def test_known_values(self):
        self.assertEqual(prop1_weights([1.0, 1.0], 'uniform_continuous'), (0.5, 0.5))
        np.testing.assert_allclose(prop1_weights([1.0, 1.0], 'uniform_endpoints'), [2 / 3, 1 / 3])
        np.testing.assert_allclose(prop1_weights([1.0, 1.0], 'midpoint_mass'), [1 / 3, 2 / 3])
        self.assertEqual(len(prop1_closed_form([1.0, 2.0], 'midpoint_mass')), 2)

    def test_wrong_shape_and_region(self):
        with self.assertRaises(WrongModelShape):
            prop1_weights([1.0, 1.0, 1.0], 'uniform_continuous')
        with self.assertRaises(OutOfParameterRegion):
            prop1_weights([1.0, -1.0], 'uniform_continuous')
        with self.assertRaises(WrongModelShape):
            prop1_measure('triangular')


class RegionClassificationTests(SimpleTestCase):
    def test_labels(self):
        self.assertEqual(classify_region(2.0, 2.0), B1)
        self.assertEqual(classify_region(0.0, 0.0), INTERIOR)
        self.assertEqual(classify_region(-0.9, 9.0), B3)
        self.assertEqual(classify_region(9.0, -0.9), B4)
        self.assertEqual(classify_region(-0.45, -0.45), B2)

    def test_outside_parameter_region(self):
        with self.assertRaises(OutOfParameterRegion):
            classify_region(-1.0, 0.5)
        with self.assertRaises(OutOfParameterRegion):
            classify_region(-0.6, -0.6)

    def test_region_designs_are_d_optimal(self):
        model = two_factor_model()
        for gammas in ((2.0, 2.0), (-0.45, -0.45), (-0.9, 9.0), (9.0, -0.9), (3.0, 1.0)):
            label = classify_region(*gammas)
            self.assertNotEqual(label, INTERIOR)
            beta = np.array([1.0, *gammas])
            certificate = equivalence_check(model, region_design(label), beta, CriterionSpec.d())
            self.assertTrue(certificate.passed, f'{label} at {gammas}')

    def test_interior_parameters_need_four_points(self):
        model = two_factor_model()
        for gammas in ((0.0, 0.0), (0.5, 1.0), (-0.3, 0.4)):
            self.assertEqual(classify_region(*gammas), INTERIOR)
            result = optimal_weights_fixed_support(model, [1.0, *gammas], CriterionSpec.d(), VERTICES)
            self.assertTrue(np.all(result.design.weights_on(VERTICES) > 0))

    def test_unknown_label(self):
        with self.assertRaises(OutOfParameterRegion):
            region_design(INTERIOR)

    def test_reduced_parameter(self):
        np.testing.assert_allclose(reduced_parameter([2.0, 1.0, -1.0]), [0.5, -0.5])


class BetaOneZeroTests(SimpleTestCase):
    def test_zero_gamma_gives_uniform_weights(self):
        self.assertEqual(w_star_beta1_zero(0.0), 0.25)

    def test_matches_brute_force_maximizer(self):
        ws = np.linspace(0.0, 0.5, 200001)[1:-1]
        for gamma2 in (-0.45, -0.2, 0.5, 1.0, 3.0, 10.0):
            brute = ws[np.argmax(det_beta1_zero(ws, gamma2))]
            self.assertAlmostEqual(w_star_beta1_zero(gamma2), brute, delta=5e-6)

    def test_domain(self):
        with self.assertRaises(OutOfParameterRegion):
            w_star_beta1_zero(-1.0)

    def test_invariant_optimum_is_globally_d_optimal(self):
        model = two_factor_model()
        for gamma2 in (-0.4, 1.0, 4.0):
            certificate = equivalence_check(model, beta1_zero_design(gamma2), [1.0, 0.0, gamma2], CriterionSpec.d())
            self.assertTrue(certificate.passed)


class EqualSlopesTests(SimpleTestCase):
    def test_regimes(self):
        self.assertEqual(equal_slopes_weights(2.0), (1 / 3, 1 / 3, 1 / 3, 0.0))
        self.assertEqual(equal_slopes_weights(-0.4), (0.0, 1 / 3, 1 / 3, 1 / 3))
        np.testing.assert_allclose(equal_slopes_weights(0.0), [0.25] * 4)
        np.testing.assert_allclose(equal_slopes_weights(1.0 - 1e-12), [1 / 3, 1 / 3, 1 / 3, 0.0], atol=1e-10)
        np.testing.assert_allclose(equal_slopes_weights(-1 / 3 + 1e-12), [0.0, 1 / 3, 1 / 3, 1 / 3], atol=1e-10)

    def test_closed_form_is_certified(self):
        model = two_factor_model()
        for gamma in (-0.45, -1 / 3, -0.1, 0.0, 0.5, 1.0, 3.0):
            xi = equal_slopes_closed_form(gamma)
            certificate = equivalence_check(model, xi, [1.0, gamma, gamma], CriterionSpec.d())
            self.assertTrue(certificate.passed, f'gamma = {gamma}')

    def test_minimal_design_determinant(self):
        from criteria.local import criterion_value
        model = two_factor_model()
        gamma = 3.0
        value = criterion_value(model, equal_slopes_closed_form(gamma), [1.0, gamma, gamma], CriterionSpec.d())
        self.assertAlmostEqual(1.0 / value, 1.0 / (27.0 * (1 + gamma) ** 4), places=12)

    def test_invariant_determinant_formula(self):
        from criteria.local import criterion_value
        model = two_factor_model()
        family = equal_slopes_family(model)
        for w, gamma in ((0.2, 0.5), (0.3, 2.0), (0.1, -0.3)):
            value = criterion_value(model, family.design(w), [1.0, gamma, gamma], CriterionSpec.d())
            self.assertAlmostEqual(1.0 / value / equal_slopes_det(w, gamma), 1.0, places=10)

    def test_efficiency_cube(self):
        model = two_factor_model()
        family = equal_slopes_family(model)
        for w, gamma in ((0.2, 1.0), (0.25, 4.0)):
            beta = [1.0, gamma, gamma]
            eff = efficiency_value(model, family.design(w), beta, CriterionSpec.d(),
                                   equal_slopes_closed_form(gamma))
            self.assertAlmostEqual(eff ** 3, equal_slopes_efficiency_cubed(w, gamma), places=10)

    def test_limit_efficiency(self):
        self.assertAlmostEqual(equal_slopes_limit_efficiency(0.25), 0.8585, delta=1e-4)
        self.assertAlmostEqual(equal_slopes_limit_efficiency(MAXIMIN_EQUAL_SLOPES_WEIGHT), math.sqrt(3) / 2,
                               places=12)
        self.assertAlmostEqual(equal_slopes_efficiency_cubed(0.2, 1e8), equal_slopes_limit_efficiency(0.2) ** 3,
                               places=6)


class LocalOptimumTests(SimpleTestCase):
    # weights on (0,0), (0,1), (1,0), (1,1) for uniform nu on the unit square
    TABLE = (
        ((1, 0, 0), (0.250, 0.250, 0.250, 0.250)),
        ((1, 1, 1), (0.250, 0.300, 0.300, 0.150)),
        ((1, 2, 2), (0.242, 0.362, 0.362, 0.034)),
        ((1, 3, 3), (0.236, 0.382, 0.382, 0.000)),
        ((1, 10, 10), (0.214, 0.393, 0.393, 0.000)),
        ((1, -3 / 7, -3 / 7), (0.000, 0.382, 0.382, 0.236)),
    )

    def test_imse_optimal_weights(self):
        model = two_factor_model()
        crit = imse_uniform(model)
        for beta, expected in self.TABLE:
            result = local_opt_design(model, beta, crit)
            self.assertTrue(result.certificate.passed)
            np.testing.assert_allclose(result.design.weights_on(VERTICES), expected, atol=1e-3,
                                       err_msg=f'beta = {beta}')

    def test_one_factor_d_optimum(self):
        result = local_opt_design(one_factor_model(), [1.0, 1.0], CriterionSpec.d())
        np.testing.assert_allclose(result.design.support, [[0.0], [1.0]])
        np.testing.assert_allclose(result.design.weights, [0.5, 0.5], atol=1e-9)

    def test_optimal_weights_do_not_depend_on_kappa(self):
        for crit in (CriterionSpec.d(), imse_uniform(two_factor_model())):
            designs = [
                local_opt_design(ModelSpec.builtin('additive', lower=[0, 0], upper=[1, 1], kappa=kappa),
                                 [1.0, 2.0, 2.0], crit).design
                for kappa in (1.0, 3.0)
            ]
            np.testing.assert_allclose(designs[0].weights_on(VERTICES), designs[1].weights_on(VERTICES),
                                       atol=1e-6, err_msg=crit.kind)

    def test_custom_intensity_optimum(self):
        model = ModelSpec(one_factor_model().basis, Box([0.0], [1.0]), CustomIntensity(np.ones_like, name='constant'))
        beta = [-1.0, 0.5]
        for crit in (CriterionSpec.d(), imse_uniform(model)):
            result = local_opt_design(model, beta, crit)
            np.testing.assert_allclose(result.design.weights_on([[0.0], [1.0]]), [0.5, 0.5], atol=1e-6,
                                       err_msg=crit.kind)
            self.assertTrue(equivalence_check(model, result.design, beta, crit).passed)

    def test_custom_intensity_transfers_in_linear_mode_only(self):
        model = ModelSpec(one_factor_model().basis, Box([0.0], [1.0]), CustomIntensity(np.exp, name='exp'))
        beta = np.array([0.5, -2.0])
        crit = CriterionSpec.d()
        source = local_opt_design(model, beta, crit).design
        pair = make_pair(model, reflection(model.region, 1))
        result = transfer_optimal(model, source, pair, crit)
        self.assertTrue(equivalence_check(result.model, result.design, result.param_map(beta), crit).passed)
        with self.assertRaises(InvalidInput):
            make_pair(model, reflection(model.region, 1), INTERCEPT_RESCALED)
        rescaled = make_pair(one_factor_model(), reflection(model.region, 1), INTERCEPT_RESCALED)
        with self.assertRaises(InvalidInput):
            transfer_optimal(model, source, rescaled, crit)

    def test_quadratic_basis_adds_grid_candidates(self):
        model = ModelSpec.builtin('quadratic', lower=[0.0], upper=[1.0])
        self.assertIn(0.5, default_candidates(model)[:, 0])
        result = local_opt_design(model, [1.0, 0.0, 0.0], CriterionSpec.d())
        np.testing.assert_allclose(result.design.weights_on([[0.0], [0.5], [1.0]]), [1 / 3] * 3, atol=1e-4)

    def test_candidate_augmentation(self):
        model = ModelSpec.builtin('quadratic', lower=[0.0], upper=[1.0])
        crit = CriterionSpec.d()
        result = local_opt_design(model, [1.0, 0.0, 0.0], crit, candidates=[[0.0], [0.25], [1.0]])
        self.assertTrue(result.certificate.passed)
        reference = Design.uniform([[0.0], [0.5], [1.0]])
        self.assertGreater(efficiency_value(model, result.design, [1.0, 0.0, 0.0], crit, reference), 0.9999)

    @override_settings(OPTDESIGN={'MAX_AUGMENTATIONS': 0})
    def test_failed_certification(self):
        model = ModelSpec.builtin('quadratic', lower=[0.0], upper=[1.0])
        with self.assertRaises(EquivalenceCheckFailed) as ctx:
            local_opt_design(model, [1.0, 0.0, 0.0], CriterionSpec.d(), candidates=[[0.0], [0.25], [1.0]])
        self.assertEqual(ctx.exception.exit_code, 2)
        self.assertGreater(ctx.exception.max_sensitivity, ctx.exception.bound)

    def test_transfer_of_optimal_design(self):
        model = two_factor_model()
        crit = imse_uniform(model)
        source = local_opt_design(model, [1.0, 3.0, 3.0], crit).design
        pair = make_pair(model, full_reflection(model.region), INTERCEPT_RESCALED)
        result = transfer_optimal(model, source, pair, crit)
        image_beta = result.param_map([1.0, 3.0, 3.0])
        np.testing.assert_allclose(image_beta, [1.0, -3 / 7, -3 / 7], atol=1e-12)
        np.testing.assert_allclose(result.design.weights_on(VERTICES), [0.000, 0.382, 0.382, 0.236], atol=1e-3)
        certificate = equivalence_check(result.model, result.design, image_beta, result.criterion)
        self.assertTrue(certificate.passed)


class MaximinTests(SimpleTestCase):
    def test_golden_section(self):
        x, fx = golden_section_maximize(lambda t: -(t - 0.3) ** 2, 0.0, 1.0, 1e-10)
        self.assertAlmostEqual(x, 0.3, places=8)
        self.assertAlmostEqual(fx, 0.0, places=12)

    def test_family_orbits(self):
        family = equal_slopes_family()
        self.assertEqual(family.partition.orbits, ((0, 3), (1, 2)))
        self.assertEqual(family.upper, 0.5)
        np.testing.assert_allclose(family.design(0.2).weights_on(VERTICES), [0.2, 0.3, 0.3, 0.2])
        with self.assertRaises(InvalidInput):
            family.design(0.5)

    def test_family_needs_two_orbits(self):
        from invariance.groups import OrbitPartition
        with self.assertRaises(InvalidInput):
            InvariantFamily(OrbitPartition(((0,), (1,), (2,)), np.eye(3)))

    def test_gamma_grid(self):
        gammas = equal_slopes_gammas(20)
        self.assertGreater(gammas.min(), -0.5)
        self.assertAlmostEqual(gammas.max(), 1e4)
        self.assertIn(0.0, gammas)

    def test_maximin_weight_and_efficiency(self):
        result = equal_slopes_maximin(include_limit=True)
        self.assertAlmostEqual(result.weight, 0.21132, delta=1e-4)
        self.assertAlmostEqual(result.min_efficiency, 0.8660, delta=1e-3)
        self.assertTrue(result.limit_binding)

    def test_uniform_invariant_design(self):
        result = equal_slopes_maximin(include_limit=True, weight=0.25)
        self.assertAlmostEqual(result.min_efficiency, 0.8585, delta=1e-3)
        self.assertEqual(result.weight, 0.25)

    def test_efficiency_curve(self):
        curve = invariant_family_curve([MAXIMIN_EQUAL_SLOPES_WEIGHT, 0.25], [-0.25, 0.0, 1.0, 5.0])
        self.assertEqual(list(curve.columns), ['param', 'value', 'value2'])
        self.assertTrue((curve['value'] <= 1.0 + 1e-12).all())
        # the uniform invariant design is D-optimal at gamma = 0
        self.assertAlmostEqual(float(curve.loc[1, 'value2']), 1.0, places=10)
        self.assertGreaterEqual(float(curve.loc[2, 'value']), 0.8660 - 1e-3)


class SerializerTests(SimpleTestCase):
    def test_options(self):
        opts = load(OptimizeOptionsSerializer, {'max_iters': 50})
        self.assertEqual(opts.max_iters, 50)

    def test_result_rendering(self):
        result = local_opt_design(one_factor_model(), [1.0, 1.0], CriterionSpec.d())
        data = DesignResultSerializer(result).data
        self.assertEqual(data['support'], [[0.0], [1.0]])
        self.assertTrue(data['certificate']['passed'])
