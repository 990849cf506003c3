from django.urls import reverse
from rest_framework import status
from rest_framework.test import APISimpleTestCase

ONE_FACTOR = {'dim_x': 1, 'basis': 'linear'}
TWO_FACTOR = {'dim_x': 2, 'basis': 'additive'}
ENDPOINTS = {'support': [[0], [1]], 'weights': [0.5, 0.5]}


class ApiTestCase(APISimpleTestCase):
    def post(self, name, payload):
        return self.client.post(reverse(name), payload, format='json')


class OptimizeViewTests(ApiTestCase):
    def test_d_optimum(self):
        response = self.post('optimize', {'model': ONE_FACTOR, 'beta': [1, 1]})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['support'], [[0.0], [1.0]])
        self.assertTrue(response.data['certificate']['passed'])
        self.assertEqual(response.data['criterion'], {'kind': 'D'})

    def test_imse_with_options(self):
        response = self.post('optimize', {
            'model': TWO_FACTOR, 'beta': [1, 3, 3],
            'criterion': {'kind': 'IMSE', 'nu': {'kind': 'uniform'}},
            'options': {'max_iters': 20000},
        })
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['certificate']['passed'])
        self.assertAlmostEqual(sum(response.data['weights']), 1.0)

    def test_missing_beta(self):
        response = self.post('optimize', {'model': ONE_FACTOR})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('beta', response.data)

    def test_invalid_model(self):
        response = self.post('optimize', {'model': {'dim_x': 1, 'kappa': -1}, 'beta': [1, 1]})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('model', response.data)

    def test_nonpositive_parameter(self):
        response = self.post('optimize', {'model': ONE_FACTOR, 'beta': [1, -2]})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data['error'], 'NonpositiveLinearComponent')

    def test_get_not_allowed(self):
        self.assertEqual(self.client.get(reverse('optimize')).status_code, status.HTTP_405_METHOD_NOT_ALLOWED)


class CheckViewTests(ApiTestCase):
    def test_certificate(self):
        response = self.post('check', {'model': ONE_FACTOR, 'beta': [1, 0], 'design': ENDPOINTS})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['passed'])

    def test_failing_design_still_returns_its_certificate(self):
        design = {'support': [[0], [0.5]], 'weights': [0.5, 0.5]}
        response = self.post('check', {'model': ONE_FACTOR, 'beta': [1, 0], 'design': design})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data['passed'])

    def test_singular_design(self):
        design = {'support': [[0.5]], 'weights': [1.0]}
        response = self.post('check', {'model': ONE_FACTOR, 'beta': [1, 0], 'design': design})
        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertEqual(response.data['error'], 'SingularInformation')

    def test_design_outside_region(self):
        design = {'support': [[0], [2]], 'weights': [0.5, 0.5]}
        response = self.post('check', {'model': ONE_FACTOR, 'beta': [1, 0], 'design': design})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('design', response.data)


class TransferViewTests(ApiTestCase):
    def test_reflection_with_certificate(self):
        response = self.post('transfer', {
            'model': ONE_FACTOR, 'beta': [1, 1], 'design': ENDPOINTS,
            'transform': {'name': 'reflect:1'}, 'assert_optimal': True,
        })
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['beta'], [2.0, -1.0])
        self.assertTrue(response.data['certificate']['passed'])

    def test_rescaled_reflection(self):
        response = self.post('transfer', {
            'model': ONE_FACTOR, 'beta': [1, 1], 'design': ENDPOINTS,
            'transform': {'name': 'reflect:1', 'param_mode': 'intercept_rescaled'},
        })
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertAlmostEqual(response.data['beta'][1], -0.5)
        self.assertNotIn('certificate', response.data)

    def test_unknown_transform(self):
        response = self.post('transfer', {
            'model': ONE_FACTOR, 'beta': [1, 1], 'design': ENDPOINTS, 'transform': {'name': 'rotate:1'},
        })
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
