import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import (
    CandidateSetNotClosed, GroupTooLarge, NotRegionPreserving, WeightSumViolation,
)
from core.serializers import load
from core.strategies import intercepts, random_designs, reduced_slopes
from criteria.local import CriterionSpec, local_criterion
from model_core.domain import Box, Design, ModelSpec, UniformMeasure
from transforms.equivariance import INTERCEPT_RESCALED, make_pair
from transforms.maps import full_reflection, reflection, shift_scale, swap

from .groups import (
    check_invariant_criterion, generate_group, invariant_design, is_invariant_design,
    is_region_preserving, orbit_weights, orbits, symmetrize, verify_group,
)
from .serializers import GroupSerializer, OrbitPartitionSerializer

UNIT_SQUARE = Box([0, 0], [1, 1])


def two_factor():
    return ModelSpec.builtin('additive', lower=[0.0, 0.0], upper=[1.0, 1.0])


def reflection_group(model):
    """{id, g3}: reflection of the first coordinate"""
    return generate_group(model, [make_pair(model, reflection(UNIT_SQUARE, 1))])


def swap_group(model):
    return generate_group(model, [make_pair(model, swap(2, 1, 2))])


class GroupGenerationTests(SimpleTestCase):
    def setUp(self):
        self.model = two_factor()

    def test_single_reflections_generate_four_elements(self):
        group = generate_group(self.model, [
            make_pair(self.model, reflection(UNIT_SQUARE, 1)),
            make_pair(self.model, reflection(UNIT_SQUARE, 2)),
        ])
        self.assertEqual(len(group), 4)

    def test_full_reflection_and_swap_generate_four_elements(self):
        group = generate_group(self.model, [
            make_pair(self.model, full_reflection(UNIT_SQUARE)),
            make_pair(self.model, swap(2, 1, 2)),
        ])
        self.assertEqual(len(group), 4)
        self.assertTrue(verify_group(self.model, group))

    def test_rescaled_group(self):
        group = generate_group(self.model, [
            make_pair(self.model, full_reflection(UNIT_SQUARE), INTERCEPT_RESCALED),
            make_pair(self.model, swap(2, 1, 2), INTERCEPT_RESCALED),
        ])
        self.assertEqual(len(group), 4)
        self.assertEqual(group.param_mode, INTERCEPT_RESCALED)

    def test_single_generator(self):
        self.assertEqual(len(reflection_group(self.model)), 2)

    def test_size_cap(self):
        with self.assertRaises(GroupTooLarge):
            generate_group(self.model, [make_pair(self.model, reflection(UNIT_SQUARE, 1))], max_size=1)

    def test_generators_must_preserve_the_region(self):
        g = shift_scale(2, 0.5, 1.0)
        self.assertFalse(is_region_preserving(self.model, g))
        with self.assertRaises(NotRegionPreserving):
            generate_group(self.model, [make_pair(self.model, g)])


class OrbitTests(SimpleTestCase):
    def setUp(self):
        self.model = two_factor()
        self.vertices = UNIT_SQUARE.extremal_points()

    def test_reflection_orbits(self):
        partition = orbits(reflection_group(self.model), self.vertices)
        self.assertEqual(partition.orbits, ((0, 2), (1, 3)))
        np.testing.assert_array_equal(partition.orbit_points(0), [[0, 0], [1, 0]])

    def test_equal_slopes_orbits(self):
        group = generate_group(self.model, [
            make_pair(self.model, full_reflection(UNIT_SQUARE)),
            make_pair(self.model, swap(2, 1, 2)),
        ])
        partition = orbits(group, self.vertices)
        self.assertEqual(partition.orbits, ((0, 3), (1, 2)))
        self.assertEqual(partition.sizes, [2, 2])

    def test_candidates_must_be_closed(self):
        with self.assertRaises(CandidateSetNotClosed) as ctx:
            orbits(reflection_group(self.model), [[0.0, 0.0], [0.0, 1.0]])
        self.assertIn([1.0, 0.0], ctx.exception.missing)

    def test_invariant_design(self):
        partition = orbits(reflection_group(self.model), self.vertices)
        xi = invariant_design(partition, [0.3, 0.2])
        np.testing.assert_allclose(xi.weights_on(self.vertices), [0.3, 0.2, 0.3, 0.2])
        self.assertTrue(is_invariant_design(xi, reflection_group(self.model)))
        np.testing.assert_allclose(orbit_weights(xi, partition), [[0.3, 0.3], [0.2, 0.2]])

    def test_zero_orbit_weight_drops_the_orbit(self):
        partition = orbits(reflection_group(self.model), self.vertices)
        self.assertEqual(len(invariant_design(partition, [0.5, 0.0])), 2)

    def test_orbit_weights_must_give_total_mass_one(self):
        partition = orbits(reflection_group(self.model), self.vertices)
        with self.assertRaises(WeightSumViolation):
            invariant_design(partition, [0.3, 0.3])
        with self.assertRaises(WeightSumViolation):
            invariant_design(partition, [0.5])


class InvariantCriterionTests(SimpleTestCase):
    def setUp(self):
        self.model = two_factor()

    def test_reflection_fixes_zero_first_slope(self):
        group = reflection_group(self.model)
        self.assertTrue(check_invariant_criterion(group, CriterionSpec.d(), [1.0, 0.0, 2.0]))
        self.assertFalse(check_invariant_criterion(group, CriterionSpec.d(), [1.0, 1.0, 2.0]))

    def test_swap_fixes_equal_slopes_and_uniform_measure(self):
        crit = CriterionSpec.imse(UniformMeasure(UNIT_SQUARE))
        self.assertTrue(check_invariant_criterion(swap_group(self.model), crit, [1.0, 2.0, 2.0]))


class SymmetrizationTests(SimpleTestCase):
    def setUp(self):
        self.model = two_factor()
        self.swaps = swap_group(self.model)
        self.reflections = reflection_group(self.model)

    def test_symmetrized_design_is_invariant(self):
        xi = Design([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [0.5, 0.3, 0.2])
        sym = symmetrize(xi, self.swaps, self.model)
        self.assertTrue(is_invariant_design(sym, self.swaps))
        self.assertAlmostEqual(sym.weight_at([1.0, 0.0]), 0.15)

    @settings(max_examples=200, deadline=None)
    @given(xi=random_designs(UNIT_SQUARE))
    def test_symmetrize_is_idempotent(self, xi):
        once = symmetrize(xi, self.reflections)
        self.assertTrue(symmetrize(once, self.reflections).same_measure(once, 1e-12))

    @settings(max_examples=200, deadline=None)
    @given(xi=random_designs(UNIT_SQUARE), beta0=intercepts, gamma=reduced_slopes)
    def test_symmetrization_does_not_increase_d(self, xi, beta0, gamma):
        beta = beta0 * np.array([1.0, 0.0, gamma])
        crit = CriterionSpec.d()
        before = local_criterion(self.model, xi, beta, crit)
        after = local_criterion(self.model, symmetrize(xi, self.reflections), beta, crit)
        self.assertLessEqual(after, before * (1.0 + 1e-9))

    @settings(max_examples=200, deadline=None)
    @given(xi=random_designs(UNIT_SQUARE), beta0=intercepts,
           gamma=st.floats(min_value=-0.4, max_value=5.0))
    def test_symmetrization_does_not_increase_imse(self, xi, beta0, gamma):
        beta = beta0 * np.array([1.0, gamma, gamma])
        crit = CriterionSpec.imse(UniformMeasure(UNIT_SQUARE))
        before = local_criterion(self.model, xi, beta, crit)
        after = local_criterion(self.model, symmetrize(xi, self.swaps), beta, crit)
        self.assertLessEqual(after, before * (1.0 + 1e-9))


class SerializerTests(SimpleTestCase):
    def test_group_from_names(self):
        group = load(GroupSerializer, {'generators': ['reflect:1', 'reflect:2']}, model=two_factor())
        self.assertEqual(len(group), 4)

    def test_group_needs_a_model(self):
        self.assertFalse(GroupSerializer(data={'generators': ['reflect:1']}).is_valid())

    def test_partition_rendering(self):
        model = two_factor()
        partition = orbits(reflection_group(model), UNIT_SQUARE.extremal_points())
        data = OrbitPartitionSerializer(partition).data
        self.assertEqual(data['orbits'], [[0, 2], [1, 3]])
        self.assertEqual(len(data['points']), 4)
