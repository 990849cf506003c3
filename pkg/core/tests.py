from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from core.conf import DEFAULTS, optdesign_setting
from core.exceptions import (
    EquivalenceCheckFailed, InvalidInput, NoConvergence, NonpositiveLinearComponent,
    OptDesignError, SingularInformation,
)
from core.serializers import DomainSerializer, PointField, load


class ExitCodeTests(SimpleTestCase):
    def test_input_errors_exit_with_one(self):
        self.assertEqual(InvalidInput('bad').exit_code, 1)
        self.assertEqual(NonpositiveLinearComponent('bad', index=2).exit_code, 1)

    def test_numerical_failures_exit_with_two(self):
        for exc_class in (SingularInformation, NoConvergence, EquivalenceCheckFailed):
            self.assertEqual(exc_class('failed').exit_code, 2)

    def test_context_is_kept(self):
        exc = NonpositiveLinearComponent('z <= 0', index=3, point=[1.0, 0.0])
        self.assertEqual(exc.index, 3)
        self.assertEqual(exc.context['point'], [1.0, 0.0])
        self.assertEqual(exc.as_dict(), {'error': 'NonpositiveLinearComponent', 'detail': 'z <= 0'})

    def test_no_convergence_reports_gap(self):
        exc = NoConvergence('stuck', gap=0.5, iterations=10)
        self.assertEqual(exc.gap, 0.5)
        self.assertEqual(exc.iterations, 10)


class SettingTests(SimpleTestCase):
    @override_settings(OPTDESIGN={'MAX_ITERS': 7})
    def test_configured_value_wins(self):
        self.assertEqual(optdesign_setting('MAX_ITERS'), 7)

    @override_settings(OPTDESIGN={})
    def test_falls_back_to_defaults(self):
        self.assertEqual(optdesign_setting('QUADRATURE_ORDER'), DEFAULTS['QUADRATURE_ORDER'])


class _PairSerializer(DomainSerializer):
    first = serializers.FloatField()
    second = serializers.FloatField()

    def build(self, attrs):
        if attrs['first'] > attrs['second']:
            raise InvalidInput('first must not exceed second')
        return attrs['first'], attrs['second']


class DomainSerializerTests(SimpleTestCase):
    def test_save_returns_domain_object(self):
        self.assertEqual(load(_PairSerializer, {'first': 1, 'second': 2}), (1.0, 2.0))

    def test_domain_errors_become_validation_errors(self):
        serializer = _PairSerializer(data={'first': 3, 'second': 2})
        self.assertFalse(serializer.is_valid())
        self.assertIn('first must not exceed second', str(serializer.errors))

    def test_domain_errors_are_optdesign_errors(self):
        with self.assertRaises(serializers.ValidationError):
            load(_PairSerializer, {'first': 3, 'second': 2})
        self.assertTrue(issubclass(InvalidInput, OptDesignError))

    def test_bare_number_is_one_factor_point(self):
        self.assertEqual(PointField().to_internal_value(0.5), [0.5])
