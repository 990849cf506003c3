import inspect
import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.exceptions import InvalidInput

from .management.commands.optdesign import format_weight, parse_beta
from .reproduce import reduced_grid, reproduce, table1

ONE_FACTOR = json.dumps({'dim_x': 1, 'basis': 'linear'})
TWO_FACTOR = json.dumps({'dim_x': 2, 'basis': 'additive'})


def run(*args):
    out = StringIO()
    call_command('optdesign', *args, stdout=out, stderr=StringIO())
    return out.getvalue()


class HelperTests(SimpleTestCase):
    def test_format_weight(self):
        self.assertEqual(format_weight(0.3819), '0.382')
        self.assertEqual(format_weight(4e-4), '0.000')

    def test_parse_beta_accepts_fractions(self):
        self.assertEqual(parse_beta('1, -3/7, -3/7').tolist(), [1.0, -3 / 7, -3 / 7])

    def test_parse_beta_rejects_garbage(self):
        with self.assertRaises(InvalidInput):
            parse_beta('1,x')
        with self.assertRaises(InvalidInput):
            parse_beta('1,1/0')

    def test_reduced_grid_stays_in_parameter_region(self):
        grid = reduced_grid(10)
        self.assertTrue(((grid[:, 0] + grid[:, 1]) > -1).all())
        self.assertTrue((grid > -1).all())


class InfoCommandTests(SimpleTestCase):
    def test_region_label(self):
        payload = json.loads(run('info', '--model', TWO_FACTOR, '--beta=1,2,2'))
        self.assertEqual(payload['p'], 3)
        self.assertTrue(payload['in_parameter_region'])
        self.assertEqual(payload['region_label'], 'B1')
        self.assertEqual(payload['reduced_parameter'], [2.0, 2.0])

    def test_outside_parameter_region(self):
        payload = json.loads(run('info', '--model', ONE_FACTOR, '--beta=1,-2'))
        self.assertFalse(payload['in_parameter_region'])
        self.assertNotIn('region_label', payload)

    def test_group_orbits(self):
        payload = json.loads(run('info', '--model', TWO_FACTOR, '--generator', 'reflect:1', '--beta=1,0,2'))
        self.assertEqual(payload['group_size'], 2)
        self.assertEqual(payload['orbits'], [[0, 2], [1, 3]])
        self.assertEqual(payload['points'], payload['extremal_points'])
        self.assertTrue(payload['invariant_parameter'])

    def test_group_from_several_generators(self):
        payload = json.loads(run('info', '--model', TWO_FACTOR, '--generator', 'reflect:1',
                                 '--generator', 'reflect:2', '--beta=1,2,2'))
        self.assertEqual(payload['group_size'], 4)
        self.assertEqual(payload['orbits'], [[0, 1, 2, 3]])
        self.assertFalse(payload['invariant_parameter'])

    def test_unknown_generator(self):
        with self.assertRaises(CommandError) as ctx:
            run('info', '--model', TWO_FACTOR, '--generator', 'rotate:1')
        self.assertEqual(ctx.exception.returncode, 1)


class OptimizeCommandTests(SimpleTestCase):
    def test_one_factor_d_optimum(self):
        payload = json.loads(run('optimize', '--model', ONE_FACTOR, '--beta=1,1'))
        self.assertEqual(payload['support'], [[0.0], [1.0]])
        self.assertAlmostEqual(payload['weights'][0], 0.5, places=8)
        self.assertTrue(payload['certificate']['passed'])
        self.assertEqual(payload['criterion']['kind'], 'D')

    def test_table_format(self):
        output = run('optimize', '--model', TWO_FACTOR, '--beta=1,3,3', '--criterion', 'IMSE', '--format', 'table')
        self.assertIn('(0, 1)\t0.382', output)

    def test_writes_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'design.json'
            run('optimize', '--model', ONE_FACTOR, '--beta=1,1', '--out', str(path))
            self.assertEqual(json.loads(path.read_text())['support'], [[0.0], [1.0]])

    def test_nonpositive_parameter_is_an_input_error(self):
        with self.assertRaises(CommandError) as ctx:
            run('optimize', '--model', ONE_FACTOR, '--beta=1,-2')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_invalid_model_json(self):
        with self.assertRaises(CommandError) as ctx:
            run('optimize', '--model', json.dumps({'dim_x': 1, 'kappa': -1}), '--beta=1,1')
        self.assertEqual(ctx.exception.returncode, 1)


class CheckCommandTests(SimpleTestCase):
    def test_optimal_design_passes(self):
        design = json.dumps({'support': [[0], [1]], 'weights': [0.5, 0.5]})
        payload = json.loads(run('check', '--model', ONE_FACTOR, '--beta=1,0', '--design', design))
        self.assertTrue(payload['passed'])

    def test_interior_design_fails_with_exit_code_two(self):
        design = json.dumps({'support': [[0], [0.5]], 'weights': [0.5, 0.5]})
        with self.assertRaises(CommandError) as ctx:
            run('check', '--model', ONE_FACTOR, '--beta=1,0', '--design', design)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_design_outside_region(self):
        design = json.dumps({'support': [[0], [2]], 'weights': [0.5, 0.5]})
        with self.assertRaises(CommandError) as ctx:
            run('check', '--model', ONE_FACTOR, '--beta=1,0', '--design', design)
        self.assertEqual(ctx.exception.returncode, 1)


class TransferCommandTests(SimpleTestCase):
    def test_full_reflection_of_imse_design(self):
        design = json.dumps({'support': [[0, 0], [0, 1], [1, 0]], 'weights': [0.236, 0.382, 0.382]})
        payload = json.loads(run(
            'transfer', '--model', TWO_FACTOR, '--beta=1,3,3', '--criterion', 'IMSE', '--design', design,
            '--transform', 'reflect_all', '--param-mode', 'intercept_rescaled'))
        self.assertAlmostEqual(payload['beta'][0], 1.0)
        self.assertAlmostEqual(payload['beta'][1], -3 / 7)
        self.assertAlmostEqual(payload['beta'][2], -3 / 7)
        self.assertEqual(payload['design']['support'], [[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(payload['design']['weights'], [0.382, 0.382, 0.236])

    def test_transferred_optimum_is_recertified(self):
        design = json.dumps({'support': [[0], [1]], 'weights': [0.5, 0.5]})
        payload = json.loads(run(
            'transfer', '--model', ONE_FACTOR, '--beta=1,1', '--design', design,
            '--transform', 'reflect:1', '--assert-optimal'))
        self.assertTrue(payload['certificate']['passed'])

    def test_unknown_transform(self):
        design = json.dumps({'support': [[0], [1]], 'weights': [0.5, 0.5]})
        with self.assertRaises(CommandError) as ctx:
            run('transfer', '--model', ONE_FACTOR, '--beta=1,1', '--design', design, '--transform', 'rotate:1')
        self.assertEqual(ctx.exception.returncode, 1)


class MaximinCommandTests(SimpleTestCase):
    def test_maximin_with_limit(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'curve.csv'
            output = run('maximin', '--grid', '40', '--include-gamma-infinity-limit', '--out', str(path))
            payload = json.loads(output[output.index('{'):])
            self.assertAlmostEqual(payload['weight'], 0.21132, delta=1e-4)
            self.assertTrue(payload['limit_binding'])
            self.assertEqual(list(pd.read_csv(path).columns), ['param', 'value'])

    def test_grid_too_small(self):
        with self.assertRaises(CommandError) as ctx:
            run('maximin', '--grid', '1')
        self.assertEqual(ctx.exception.returncode, 1)


class ReproduceCommandTests(SimpleTestCase):
    def test_fig3(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = run('reproduce', 'fig3', '--out', tmp, '--grid', '5')
            self.assertIn('within tolerance', output)
            curve = pd.read_csv(Path(tmp) / 'fig3.csv')
            self.assertEqual(list(curve.columns), ['param', 'value'])
            self.assertEqual(len(curve), 5)
            self.assertTrue((Path(tmp) / 'fig3_checks.csv').exists())

    def test_table2(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = run('reproduce', 'table2', '--out', tmp)
            self.assertIn('table2: all 24 values within tolerance', output)
            table = pd.read_csv(Path(tmp) / 'table2.csv')
            self.assertEqual(len(table), 6)

    def test_table1_runs_the_full_grid_unless_lowered(self):
        self.assertEqual(inspect.signature(table1).parameters['grid'].default, 200)
        with tempfile.TemporaryDirectory() as tmp:
            report = reproduce('table1', tmp, grid=4)
            self.assertEqual(len(pd.read_csv(Path(tmp) / 'table1.csv')), len(reduced_grid(4)))
            self.assertEqual(len(report.checks), 16)
