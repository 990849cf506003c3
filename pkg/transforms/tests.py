import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import InvalidInput, NonAxisAlignedImage, NotEquivariant, RescaleUndefined
from core.serializers import load
from core.strategies import one_factor_betas, random_designs, two_factor_betas
from criteria.equivalence import equivalence_check
from criteria.local import CriterionSpec, d_value, imse_value
from model_core.domain import Basis, Box, CustomIntensity, Design, DiscreteMeasure, ModelSpec, UniformMeasure
from model_core.information import design_info, weight_matrix_v

from .equivariance import (
    INTERCEPT_RESCALED, LINEAR, compose, derive_q, design_image, identity_pair, image_model,
    inverse_pair, make_pair, param_transform, pushforward_measure, rescale_factor,
    transfer_optimal, verify_info_equivariance,
)
from .maps import (
    AffinePointMap, canonical_transform, full_reflection, parse_named_map, reflection, shift_scale, swap,
)
from .serializers import TransformSerializer

UNIT_SQUARE = Box([0, 0], [1, 1])


def one_factor():
    return ModelSpec.builtin('linear', lower=[0.0], upper=[1.0])


def two_factor():
    return ModelSpec.builtin('additive', lower=[0.0, 0.0], upper=[1.0, 1.0])


class PointMapTests(SimpleTestCase):
    def test_reflection(self):
        g = reflection(UNIT_SQUARE, 1)
        np.testing.assert_allclose(g([[0.25, 0.75]]), [[0.75, 0.75]])

    def test_inverse_and_composition(self):
        g = shift_scale(1, 2.0, 3.0)
        self.assertTrue(g.then(g.inverse()).is_identity)
        np.testing.assert_allclose(g.then(g)([[1.0]]), [[17.0]])

    def test_singular_matrix_is_rejected(self):
        with self.assertRaises(InvalidInput):
            AffinePointMap([[1.0, 2.0], [2.0, 4.0]])

    def test_box_image(self):
        image = shift_scale(1, 2.0, 3.0).image_region(Box([0.0], [1.0]))
        self.assertEqual(image, Box([2.0], [5.0]))
        self.assertEqual(swap(2, 1, 2).image_region(Box([0, 0], [1, 2])), Box([0, 0], [2, 1]))

    def test_rotation_has_no_box_image(self):
        rotation = AffinePointMap([[0.6, -0.8], [0.8, 0.6]])
        with self.assertRaises(NonAxisAlignedImage):
            rotation.image_region(UNIT_SQUARE)

    def test_named_maps(self):
        self.assertTrue(parse_named_map('identity', UNIT_SQUARE).is_identity)
        self.assertTrue(parse_named_map('reflect_all', UNIT_SQUARE).close_to(full_reflection(UNIT_SQUARE)))
        self.assertTrue(parse_named_map('swap:1,2', UNIT_SQUARE).close_to(swap(2, 1, 2)))
        with self.assertRaises(InvalidInput):
            parse_named_map('rotate:1', UNIT_SQUARE)
        with self.assertRaises(InvalidInput):
            parse_named_map('reflect:x', UNIT_SQUARE)

    def test_canonical_transform(self):
        g = canonical_transform([2.0, -1.0])
        np.testing.assert_allclose(g([[0.0], [1.0]]), [[2.0], [1.0]])


class DeriveQTests(SimpleTestCase):
    def test_full_reflection(self):
        q = derive_q(two_factor(), full_reflection(UNIT_SQUARE))
        np.testing.assert_allclose(q, [[1, 0, 0], [1, -1, 0], [1, 0, -1]], atol=1e-12)

    def test_single_reflections(self):
        model = two_factor()
        np.testing.assert_allclose(derive_q(model, reflection(UNIT_SQUARE, 1)),
                                   [[1, 0, 0], [1, -1, 0], [0, 0, 1]], atol=1e-12)
        np.testing.assert_allclose(derive_q(model, reflection(UNIT_SQUARE, 2)),
                                   [[1, 0, 0], [0, 1, 0], [1, 0, -1]], atol=1e-12)

    def test_swap(self):
        np.testing.assert_allclose(derive_q(two_factor(), swap(2, 1, 2)),
                                   [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-12)

    def test_quadratic_reflection(self):
        model = ModelSpec.builtin('quadratic', lower=[0.0], upper=[1.0])
        q = derive_q(model, reflection(model.region, 1))
        np.testing.assert_allclose(q, [[1, 0, 0], [1, -1, 0], [1, -2, 1]], atol=1e-10)

    def test_non_polynomial_basis_is_not_equivariant(self):
        basis = Basis('exponential', 1, 2, lambda x: np.column_stack([np.ones(len(x)), np.exp(x[:, 0])]))
        model = ModelSpec(basis, Box([0.0], [1.0]))
        with self.assertRaises(NotEquivariant):
            derive_q(model, shift_scale(1, 0.0, 2.0))

    def test_dimension_mismatch(self):
        with self.assertRaises(InvalidInput):
            derive_q(two_factor(), shift_scale(1, 0.0, 2.0))


class ParameterMapTests(SimpleTestCase):
    def test_rescaled_full_reflection(self):
        pair = make_pair(two_factor(), full_reflection(UNIT_SQUARE), INTERCEPT_RESCALED)
        np.testing.assert_allclose(param_transform(pair, [1.0, 3.0, 3.0]), [1.0, -3 / 7, -3 / 7], atol=1e-14)

    def test_linear_full_reflection(self):
        pair = make_pair(two_factor(), full_reflection(UNIT_SQUARE))
        np.testing.assert_allclose(param_transform(pair, [1.0, 3.0, 3.0]), [7.0, -3.0, -3.0], atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(gamma=st.floats(min_value=-0.9, max_value=20.0))
    def test_one_factor_reflection_maps_gamma(self, gamma):
        pair = make_pair(one_factor(), reflection(Box([0.0], [1.0]), 1), INTERCEPT_RESCALED)
        mapped = param_transform(pair, [1.0, gamma])
        np.testing.assert_allclose(mapped, [1.0, -gamma / (1 + gamma)], rtol=1e-12, atol=1e-12)

    def test_rescale_undefined(self):
        pair = make_pair(one_factor(), reflection(Box([0.0], [1.0]), 1), INTERCEPT_RESCALED)
        with self.assertRaises(RescaleUndefined):
            rescale_factor(pair, [1.0, -2.0])

    def test_linear_mode_never_rescales(self):
        pair = make_pair(one_factor(), reflection(Box([0.0], [1.0]), 1))
        self.assertEqual(rescale_factor(pair, [1.0, 5.0]), 1.0)

    def test_compose_and_inverse(self):
        model = two_factor()
        g2 = make_pair(model, full_reflection(UNIT_SQUARE))
        g5 = make_pair(model, swap(2, 1, 2))
        product = compose(g2, g5)
        np.testing.assert_allclose(product.q, g5.q @ g2.q)
        back = compose(product, inverse_pair(product))
        np.testing.assert_allclose(back.q, np.eye(3), atol=1e-12)
        self.assertTrue(back.g.is_identity)

    def test_compose_needs_matching_modes(self):
        model = one_factor()
        g = reflection(model.region, 1)
        with self.assertRaises(InvalidInput):
            compose(make_pair(model, g, LINEAR), make_pair(model, g, INTERCEPT_RESCALED))


class EquivarianceLawTests(SimpleTestCase):
    @settings(max_examples=200, deadline=None)
    @given(beta=two_factor_betas(), xi=random_designs(UNIT_SQUARE),
           name=st.sampled_from(['reflect:1', 'reflect:2', 'reflect_all', 'swap:1,2']),
           mode=st.sampled_from([LINEAR, INTERCEPT_RESCALED]))
    def test_information_congruence(self, beta, xi, name, mode):
        model = two_factor()
        pair = make_pair(model, parse_named_map(name, UNIT_SQUARE), mode)
        try:
            residual = verify_info_equivariance(model, xi, beta, pair)
        except RescaleUndefined:
            return
        self.assertLess(residual, 1e-10)

    @settings(max_examples=200, deadline=None)
    @given(beta=two_factor_betas(), xi=random_designs(UNIT_SQUARE),
           shift=st.floats(min_value=-3.0, max_value=3.0), scale=st.floats(min_value=0.5, max_value=4.0))
    def test_determinant_law(self, beta, xi, shift, scale):
        model = two_factor()
        pair = make_pair(model, shift_scale(2, shift, scale))
        target = image_model(model, pair.g)
        m = design_info(model, xi, beta)
        m_image = design_info(target, design_image(xi, pair, target), param_transform(pair, beta))
        if np.linalg.cond(m) > 1e5:
            return
        expected = d_value(m) / np.linalg.det(pair.q) ** 2
        self.assertAlmostEqual(d_value(m_image) / expected, 1.0, delta=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(beta=one_factor_betas(), xi=random_designs(Box([0.0], [1.0]), min_size=2, max_size=4),
           shift=st.floats(min_value=-3.0, max_value=3.0), scale=st.floats(min_value=0.5, max_value=4.0))
    def test_imse_invariance(self, beta, xi, shift, scale):
        model = one_factor()
        nu = UniformMeasure(model.region)
        pair = make_pair(model, shift_scale(1, shift, scale))
        if np.linalg.cond(design_info(model, xi, beta)) > 1e5:
            return
        target = image_model(model, pair.g)
        before = imse_value(model, xi, beta, nu)
        after = imse_value(target, design_image(xi, pair, target), param_transform(pair, beta),
                           pushforward_measure(nu, pair.g))
        self.assertAlmostEqual(after / before, 1.0, delta=1e-9)

    def test_linear_mode_holds_for_any_intensity(self):
        model = ModelSpec(two_factor().basis, UNIT_SQUARE, CustomIntensity(np.exp, name='exp'))
        xi = Design.uniform(UNIT_SQUARE.extremal_points())
        for name in ('reflect:1', 'reflect_all', 'swap:1,2'):
            pair = make_pair(model, parse_named_map(name, UNIT_SQUARE))
            self.assertLess(verify_info_equivariance(model, xi, [-1.0, 2.0, 0.5], pair), 1e-10, msg=name)

    def test_rescaled_mode_needs_the_gamma_link(self):
        model = ModelSpec(one_factor().basis, Box([0.0], [1.0]), CustomIntensity(np.exp, name='exp'))
        with self.assertRaises(InvalidInput):
            make_pair(model, reflection(model.region, 1), INTERCEPT_RESCALED)

    def test_weight_matrix_congruence(self):
        model = two_factor()
        nu = UniformMeasure(UNIT_SQUARE)
        pair = make_pair(model, full_reflection(UNIT_SQUARE))
        beta = np.array([1.0, 2.0, 0.5])
        v = weight_matrix_v(model, beta, nu)
        v_image = weight_matrix_v(model, param_transform(pair, beta), pushforward_measure(nu, pair.g))
        np.testing.assert_allclose(v_image, pair.q @ v @ pair.q.T, rtol=1e-10)


class TransferTests(SimpleTestCase):
    def test_identity_transfer_keeps_design(self):
        model = one_factor()
        xi = Design([[0.0], [1.0]], [0.4, 0.6])
        result = transfer_optimal(model, xi, identity_pair(model), CriterionSpec.d())
        self.assertTrue(result.design.same_measure(xi))
        np.testing.assert_allclose(result.param_map([1.0, 2.0]), [1.0, 2.0])

    def test_shift_scale_transfer(self):
        model = one_factor()
        xi = Design.uniform([[0.0], [1.0]])
        pair = make_pair(model, shift_scale(1, 2.0, 3.0))
        result = transfer_optimal(model, xi, pair, CriterionSpec.d())
        np.testing.assert_allclose(result.design.support, [[2.0], [5.0]])
        np.testing.assert_allclose(result.design.weights, [0.5, 0.5])
        self.assertEqual(result.model.region, Box([2.0], [5.0]))

    @settings(max_examples=100, deadline=None)
    @given(beta=one_factor_betas(), shift=st.floats(min_value=-3.0, max_value=3.0),
           scale=st.floats(min_value=0.5, max_value=4.0), mode=st.sampled_from([LINEAR, INTERCEPT_RESCALED]))
    def test_transferred_optimum_is_certified(self, beta, shift, scale, mode):
        model = one_factor()
        pair = make_pair(model, shift_scale(1, shift, scale), mode)
        result = transfer_optimal(model, Design.uniform([[0.0], [1.0]]), pair, CriterionSpec.d())
        try:
            image_beta = result.param_map(beta)
        except RescaleUndefined:
            return
        certificate = equivalence_check(result.model, result.design, image_beta, result.criterion)
        self.assertTrue(certificate.passed)

    def test_uniform_measure_follows_the_region(self):
        model = one_factor()
        pair = make_pair(model, shift_scale(1, 2.0, 3.0))
        crit = CriterionSpec.imse(UniformMeasure(model.region))
        result = transfer_optimal(model, Design.uniform([[0.0], [1.0]]), pair, crit)
        self.assertEqual(result.nu.region, Box([2.0], [5.0]))

    def test_discrete_pushforward(self):
        nu = DiscreteMeasure([[0.25]], [1.0])
        image = pushforward_measure(nu, shift_scale(1, 2.0, 3.0))
        np.testing.assert_allclose(image.points, [[2.75]])


class TransformSerializerTests(SimpleTestCase):
    def test_named_transform(self):
        pair = load(TransformSerializer, {'name': 'reflect_all', 'param_mode': INTERCEPT_RESCALED},
                    model=two_factor())
        self.assertTrue(pair.rescaled)
        np.testing.assert_allclose(pair.q, [[1, 0, 0], [1, -1, 0], [1, 0, -1]], atol=1e-12)

    def test_matrix_transform(self):
        pair = load(TransformSerializer, {'a': [[3.0]], 'b': [2.0]}, model=one_factor())
        np.testing.assert_allclose(pair.q, [[1, 0], [2, 3]], atol=1e-12)

    def test_needs_exactly_one_form(self):
        serializer = TransformSerializer(data={'name': 'identity', 'a': [[1.0]]}, context={'model': one_factor()})
        self.assertFalse(serializer.is_valid())

    def test_needs_a_model(self):
        self.assertFalse(TransformSerializer(data={'name': 'identity'}).is_valid())
