import json
import logging
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from cli.reproduce import TARGETS, reproduce
from core.conf import optdesign_setting
from core.exceptions import InvalidInput, OptDesignError
from core.serializers import load
from criteria.equivalence import equivalence_check
from criteria.local import CriterionSpec
from criteria.serializers import CertificateSerializer, CriterionSerializer
from invariance.groups import check_invariant_criterion, orbits
from invariance.serializers import GroupSerializer, OrbitPartitionSerializer
from model_core.domain import Box, UniformMeasure
from model_core.information import in_parameter_region
from model_core.serializers import DesignSerializer, ModelSpecSerializer
from optimize.closed_forms import classify_region, reduced_parameter
from optimize.local import local_opt_design
from optimize.maximin import equal_slopes_gammas, equal_slopes_maximin, invariant_family_curve
from optimize.serializers import DesignResultSerializer
from optimize.weights import OptimizeOptions
from transforms.equivariance import PARAM_MODES, inverse_pair, transfer_optimal
from transforms.serializers import TransformSerializer

logger = logging.getLogger(__name__)

TABLE_ZERO = 5e-4
CURVE_POINTS = 400


def format_weight(w):
    """Three decimals; weights below 5e-4 print as 0.000"""
    return f'{0.0 if w < TABLE_ZERO else w:.3f}'


def parse_beta(text):
    """Comma-separated parameter vector; fractions such as -3/7 are accepted"""
    try:
        return np.array([float(Fraction(item.strip())) for item in text.split(',')])
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f'Cannot read beta from {text!r}.')


def read_json(value):
    """Inline JSON, or the path of a JSON file"""
    text = value if value.lstrip().startswith(('{', '[')) else Path(value).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f'Invalid JSON in {value!r}: {exc}')


class Command(BaseCommand):
    help = 'Locally optimal designs for gamma models: optimize, transfer, certify and reproduce'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        info = subparsers.add_parser('info', help='Summarize a model and a parameter value')
        self.add_model_arguments(info, beta_required=False)
        info.add_argument('--generator', action='append', dest='generators',
                          help='Named group generator, repeatable (reflect:1, reflect_all, swap:1,2)')
        info.add_argument('--param-mode', choices=PARAM_MODES, help='Parameter transform mode of the generators')

        optimize = subparsers.add_parser('optimize', help='Certified locally optimal design')
        self.add_model_arguments(optimize)
        self.add_criterion_argument(optimize)
        optimize.add_argument('--max-iters', type=int, help='Iteration cap of the weight optimizer')
        self.add_output_arguments(optimize)

        transfer = subparsers.add_parser('transfer', help='Push an optimal design through a transformation')
        self.add_model_arguments(transfer)
        self.add_criterion_argument(transfer)
        transfer.add_argument('--design', required=True, help='Design JSON file or inline JSON')
        transfer.add_argument('--transform', required=True,
                              help='Named transform (reflect:1, reflect_all, swap:1,2, shift_scale:a,c) '
                                   'or transform JSON')
        transfer.add_argument('--param-mode', choices=PARAM_MODES, help='Parameter transform mode')
        transfer.add_argument('--inverse', action='store_true', help='Apply the inverse transformation')
        transfer.add_argument('--assert-optimal', action='store_true',
                              help='Re-certify the transferred design on the image region')
        self.add_output_arguments(transfer)

        check = subparsers.add_parser('check', help='Equivalence-theorem check of a design')
        self.add_model_arguments(check)
        self.add_criterion_argument(check)
        check.add_argument('--design', required=True, help='Design JSON file or inline JSON')
        self.add_output_arguments(check)

        maximin = subparsers.add_parser('maximin', help='Maximin D-efficient invariant design, equal slopes')
        maximin.add_argument('--grid', type=int, default=200, help='Number of gamma values in the search grid')
        maximin.add_argument('--include-gamma-infinity-limit', action='store_true',
                             help='Include the analytic gamma -> infinity efficiency')
        maximin.add_argument('--weight', type=float, help='Evaluate this family weight instead of searching')
        maximin.add_argument('--out', help='CSV file for the efficiency curve')

        reproduce_parser = subparsers.add_parser('reproduce', help='Recompute a published table or figure')
        reproduce_parser.add_argument('target', choices=TARGETS)
        reproduce_parser.add_argument('--out', default='reproduction', help='Output directory')
        reproduce_parser.add_argument('--seed', type=int, help='Seed for randomized parameter sets')
        reproduce_parser.add_argument('--grid', type=int, help='Grid size or number of random cases')

    def add_model_arguments(self, parser, beta_required=True):
        parser.add_argument('--model', required=True, help='Model JSON file or inline JSON')
        parser.add_argument('--beta', required=beta_required, help='Comma-separated parameter, e.g. 1,-3/7,-3/7')

    def add_criterion_argument(self, parser):
        parser.add_argument('--criterion', default='D',
                            help='D, IMSE (uniform on the region), or criterion JSON')

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help='Write the JSON result to this file')
        parser.add_argument('--format', choices=['json', 'table'], default='json')

    def handle(self, *args, **options):
        handler = getattr(self, f'handle_{options["subcommand"]}')
        try:
            handler(options)
        except ValidationError as exc:
            raise CommandError(f'Invalid input: {exc.detail}', returncode=1)
        except OptDesignError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=exc.exit_code)
        except OSError as exc:
            raise CommandError(str(exc), returncode=1)

    # ============= INPUT =============

    def load_model(self, options):
        return load(ModelSpecSerializer, read_json(options['model']))

    def load_criterion(self, options, model):
        value = options['criterion']
        if value == 'D':
            return CriterionSpec.d()
        if value == 'IMSE':
            return CriterionSpec.imse(UniformMeasure(model.region))
        return load(CriterionSerializer, read_json(value), model=model)

    def load_design(self, options, model):
        return load(DesignSerializer, read_json(options['design']), model=model)

    def load_transform(self, options, model):
        value = options['transform']
        if value.lstrip().startswith('{') or Path(value).is_file():
            data = read_json(value)
        else:
            data = {'name': value}
        if options.get('param_mode'):
            data['param_mode'] = options['param_mode']
        return load(TransformSerializer, data, model=model)

    # ============= OUTPUT =============

    def emit(self, options, payload, table=None):
        text = json.dumps(payload, indent=2)
        if options.get('out'):
            Path(options['out']).write_text(text)
            self.stdout.write(self.style.SUCCESS(f'Wrote {options["out"]}'))
        if options.get('format') == 'table' and table is not None:
            self.stdout.write(table)
        elif not options.get('out'):
            self.stdout.write(text)

    def design_table(self, design):
        lines = ['x\tweight']
        for point, w in zip(design.support, design.weights):
            coords = ', '.join(f'{c:g}' for c in point)
            lines.append(f'({coords})\t{format_weight(w)}')
        return '\n'.join(lines)

    # ============= SUBCOMMANDS =============

    def handle_info(self, options):
        model = self.load_model(options)
        payload = {
            'model': model.as_dict(),
            'p': model.p,
            'extremal_points': model.region.extremal_points().tolist(),
        }
        if options.get('beta'):
            beta = parse_beta(options['beta'])
            inside = in_parameter_region(model, beta)
            payload['beta'] = beta.tolist()
            payload['in_parameter_region'] = inside
            if beta[0] != 0:
                payload['reduced_parameter'] = reduced_parameter(beta).tolist()
            unit_square = Box([0.0, 0.0], [1.0, 1.0])
            if inside and model.basis.name == 'additive' and model.region == unit_square and beta[0] > 0:
                payload['region_label'] = classify_region(*reduced_parameter(beta))
        if options.get('generators'):
            payload.update(self.group_summary(options, model))
        self.emit(options, payload)

    def group_summary(self, options, model):
        """Group size, orbits of the extremal points and whether beta is fixed"""
        data = {'generators': options['generators']}
        if options.get('param_mode'):
            data['param_mode'] = options['param_mode']
        group = load(GroupSerializer, data, model=model)
        partition = orbits(group, model.region.extremal_points())
        summary = {'group_size': len(group), **OrbitPartitionSerializer(partition).data}
        if options.get('beta'):
            beta = parse_beta(options['beta'])
            summary['invariant_parameter'] = check_invariant_criterion(group, CriterionSpec.d(), beta)
        return summary

    def handle_optimize(self, options):
        model = self.load_model(options)
        beta = parse_beta(options['beta'])
        crit = self.load_criterion(options, model)
        opts = OptimizeOptions.from_settings(max_iters=options.get('max_iters'))
        result = local_opt_design(model, beta, crit, opts=opts)
        payload = {
            'beta': beta.tolist(),
            'criterion': crit.as_dict(),
            **DesignResultSerializer(result).data,
        }
        self.emit(options, payload, self.design_table(result.design))

    def handle_check(self, options):
        model = self.load_model(options)
        beta = parse_beta(options['beta'])
        crit = self.load_criterion(options, model)
        design = self.load_design(options, model)
        certificate = equivalence_check(model, design, beta, crit)
        self.emit(options, CertificateSerializer(certificate).data)
        if not certificate.passed:
            raise CommandError(
                f'Design is not locally optimal: sensitivity {certificate.max_sensitivity:.10g} '
                f'exceeds {certificate.bound:.10g} at {list(certificate.argmax)}.', returncode=2)

    def handle_transfer(self, options):
        model = self.load_model(options)
        beta = parse_beta(options['beta'])
        crit = self.load_criterion(options, model)
        design = self.load_design(options, model)
        pair = self.load_transform(options, model)
        if options['inverse']:
            pair = inverse_pair(pair)
        result = transfer_optimal(model, design, pair, crit)
        image_beta = result.param_map(beta)
        image_design = result.design.canonical()
        payload = {
            'design': image_design.as_dict(),
            'beta': image_beta.tolist(),
            'region': result.model.region.as_dict(),
            'criterion': result.criterion.as_dict(),
            'transform': pair.as_dict(),
        }
        certificate = None
        if options['assert_optimal']:
            certificate = equivalence_check(result.model, image_design, image_beta, result.criterion)
            payload['certificate'] = CertificateSerializer(certificate).data
        self.emit(options, payload, self.design_table(image_design))
        if certificate is not None and not certificate.passed:
            raise CommandError(
                f'Transferred design fails re-certification: sensitivity {certificate.max_sensitivity:.10g} '
                f'exceeds {certificate.bound:.10g}.', returncode=2)

    def handle_maximin(self, options):
        if options['grid'] < 2:
            raise InvalidInput('The gamma grid needs at least two points.')
        result = equal_slopes_maximin(
            gammas=equal_slopes_gammas(options['grid']),
            include_limit=options['include_gamma_infinity_limit'],
            weight=options.get('weight'),
        )
        gammas = np.linspace(-0.5, 10.0, CURVE_POINTS + 1)[1:]
        curve = invariant_family_curve([result.weight], gammas)
        if options.get('out'):
            curve.to_csv(options['out'], index=False)
            self.stdout.write(self.style.SUCCESS(f'Wrote {options["out"]}'))
        payload = {**result.as_dict(), 'limit_binding': result.limit_binding}
        self.stdout.write(json.dumps(payload, indent=2))
        if result.at_grid_edge and not options['include_gamma_infinity_limit']:
            self.stdout.write(self.style.WARNING(
                'The worst efficiency sits at the largest gamma of the grid; '
                'consider --include-gamma-infinity-limit.'))

    def handle_reproduce(self, options):
        seed = options.get('seed')
        if seed is None:
            seed = optdesign_setting('SEED')
        report = reproduce(options['target'], options['out'], grid=options.get('grid'), seed=seed)
        if report.table is not None:
            self.stdout.write(report.table.to_string(
                index=False, float_format=format_weight))
        for path in report.files:
            self.stdout.write(f'Wrote {path}')
        if not report.passed:
            raise CommandError(
                f'{len(report.mismatches)} of {len(report.checks)} {options["target"]} values '
                f'miss their tolerance:\n{report.mismatches.to_string(index=False)}', returncode=2)
        self.stdout.write(self.style.SUCCESS(
            f'{options["target"]}: all {len(report.checks)} values within tolerance'))
