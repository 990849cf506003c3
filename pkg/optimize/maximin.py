"""
Maximin-efficient designs within a two-orbit family of invariant designs.

The family puts weight w on each point of the first orbit and
(1 - s1 w) / s2 on each point of the second, 0 < w < 1/s1. The minimal
efficiency over a parameter grid is concave in w, so the outer maximization
is a golden-section search.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.conf import optdesign_setting
from core.exceptions import EmptyGrid, InvalidInput
from criteria.efficiency import maximin_profile
from criteria.local import CriterionSpec, local_criterion
from invariance.groups import generate_group, invariant_design, orbits
from model_core.information import check_parameter, weight_matrix_v
from transforms.equivariance import make_pair
from transforms.maps import full_reflection, swap

from .closed_forms import equal_slopes_closed_form, equal_slopes_limit_efficiency, two_factor_model
from .local import local_opt_design

logger = logging.getLogger(__name__)

PHI = (1 + math.sqrt(5)) / 2


def golden_section_maximize(f, a, b, tol=1e-8):
    """Derivative-free maximization of a unimodal f on [a, b]"""
    c = b - (b - a) / PHI
    d = a + (b - a) / PHI
    fc = f(c)
    fd = f(d)
    while abs(b - a) > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + (b - a) / PHI
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - (b - a) / PHI
            fc = f(c)
    x_opt = (a + b) / 2
    return x_opt, f(x_opt)


@dataclass(frozen=True, eq=False)
class InvariantFamily:
    """Two-orbit invariant designs indexed by the per-point weight of the first orbit"""

    partition: object

    def __post_init__(self):
        if len(self.partition) != 2:
            raise InvalidInput(f'The invariant family needs exactly two orbits, got {len(self.partition)}.')

    @property
    def upper(self):
        return 1.0 / self.partition.sizes[0]

    def orbit_weights(self, w):
        s1, s2 = self.partition.sizes
        return [w, max(0.0, 1.0 - s1 * w) / s2]

    def design(self, w):
        if not 0 < w < self.upper:
            raise InvalidInput(f'Family weight {w} outside (0, {self.upper}).')
        return invariant_design(self.partition, self.orbit_weights(w))


@dataclass(frozen=True, eq=False)
class MaximinResult:
    design: object
    weight: float
    min_efficiency: float
    grid_min_efficiency: float
    limit_efficiency: float
    profile: object

    @property
    def limit_binding(self):
        return self.limit_efficiency is not None and self.limit_efficiency <= self.grid_min_efficiency

    @property
    def at_grid_edge(self):
        return self.profile.at_grid_edge

    def as_dict(self):
        return {
            'design': self.design.as_dict(),
            'weight': self.weight,
            'min_efficiency': self.min_efficiency,
            'grid_min_efficiency': self.grid_min_efficiency,
            'limit_efficiency': self.limit_efficiency,
            'at_grid_edge': self.at_grid_edge,
        }


class _GridEvaluator:
    """Efficiencies of family members against cached local optima"""

    def __init__(self, model, crit, param_grid, local_optima):
        self.model = model
        self.crit = crit
        self.param_grid = param_grid
        self.local_optima = local_optima
        self.v = [None if crit.is_d else weight_matrix_v(model, beta, crit.nu) for beta in param_grid]
        self.references = np.array([
            local_criterion(model, xi, beta, crit, v)
            for xi, beta, v in zip(local_optima, param_grid, self.v)
        ])

    def efficiencies(self, xi):
        values = np.array([
            local_criterion(self.model, xi, beta, self.crit, v)
            for beta, v in zip(self.param_grid, self.v)
        ])
        with np.errstate(divide='ignore'):
            return np.where(np.isfinite(values), self.references / values, 0.0)


def local_optima_for_grid(model, crit, param_grid, opts=None, solver=None):
    """Locally optimal design at every grid parameter, in grid order"""
    if solver is not None:
        return [solver(beta) for beta in param_grid]
    return [local_opt_design(model, beta, crit, opts=opts).design for beta in param_grid]


def maximin_invariant(model, crit, family, param_grid, opts=None, local_optima=None,
                      limit_efficiency=None, include_limit=False, weight=None, tol=None):
    """Maximin-efficient member of an invariant family over a parameter grid.

    ``limit_efficiency(w)`` is an optional analytic efficiency added to the grid
    minimum when ``include_limit`` is set. With ``weight`` given, that member is
    evaluated instead of searched for.
    """
    param_grid = [check_parameter(model, beta) for beta in param_grid]
    if not param_grid:
        raise EmptyGrid('Parameter grid is empty.')
    if local_optima is None:
        local_optima = local_optima_for_grid(model, crit, param_grid, opts)
    evaluator = _GridEvaluator(model, crit, param_grid, local_optima)
    use_limit = include_limit and limit_efficiency is not None

    def min_efficiency(w):
        worst = evaluator.efficiencies(family.design(w)).min()
        if use_limit:
            worst = min(worst, limit_efficiency(w))
        return worst

    if weight is None:
        tol = tol or optdesign_setting('GOLDEN_TOL')
        weight, best = golden_section_maximize(min_efficiency, 0.0, family.upper, tol)
        logger.info('Maximin family weight %.10f with minimal efficiency %.6f', weight, best)
    else:
        best = min_efficiency(weight)

    design = family.design(weight)
    profile = maximin_profile(model, design, crit, param_grid, local_optima)
    limit = limit_efficiency(weight) if use_limit else None
    return MaximinResult(design, float(weight), float(best), profile.min_efficiency, limit, profile)


# ============= EQUAL SLOPES FAMILY =============

def equal_slopes_gammas(n=200, gamma_max=1e4):
    """gamma in (-1/2, gamma_max]: log-spaced towards -1/2 and towards gamma_max, plus 0"""
    half = max(n // 2, 2)
    negative = -0.5 + np.logspace(-4, math.log10(0.5), half, endpoint=False)
    positive = np.logspace(-4, math.log10(gamma_max), half)
    return np.unique(np.concatenate([negative, [0.0], positive]))


def equal_slopes_grid(gammas):
    return [np.array([1.0, g, g]) for g in gammas]


def equal_slopes_family(model=None):
    """Orbits {(0,0),(1,1)} and {(0,1),(1,0)} of the group generated by the full reflection and the swap"""
    model = model or two_factor_model()
    group = generate_group(model, [
        make_pair(model, full_reflection(model.region)),
        make_pair(model, swap(2, 1, 2)),
    ])
    partition = orbits(group, model.region.extremal_points())
    return InvariantFamily(partition)


def equal_slopes_maximin(gammas=None, include_limit=True, weight=None, tol=None):
    """Maximin D-efficient invariant design over equal-slopes parameters"""
    model = two_factor_model()
    gammas = equal_slopes_gammas() if gammas is None else np.asarray(gammas, dtype=float)
    grid = equal_slopes_grid(gammas)
    optima = [equal_slopes_closed_form(g) for g in gammas]
    return maximin_invariant(
        model, CriterionSpec.d(), equal_slopes_family(model), grid, local_optima=optima,
        limit_efficiency=equal_slopes_limit_efficiency, include_limit=include_limit,
        weight=weight, tol=tol,
    )


def efficiency_curve(model, crit, xi, param_grid, local_optima):
    """Efficiency of ``xi`` at each grid parameter"""
    return _GridEvaluator(model, crit, [np.asarray(b, dtype=float) for b in param_grid], local_optima).efficiencies(xi)


def invariant_family_curve(weights, gammas):
    """D-efficiency of equal-slopes family members along gamma; one column per weight

    Columns are ``param`` (gamma), then ``value``, ``value2``, ... in the order of ``weights``.
    """
    model = two_factor_model()
    family = equal_slopes_family(model)
    gammas = np.asarray(gammas, dtype=float)
    grid = equal_slopes_grid(gammas)
    optima = [equal_slopes_closed_form(g) for g in gammas]
    columns = {'param': gammas}
    for k, w in enumerate(weights):
        name = 'value' if k == 0 else f'value{k + 1}'
        columns[name] = efficiency_curve(model, CriterionSpec.d(), family.design(w), grid, optima)
    return pd.DataFrame(columns)
