import logging
from dataclasses import dataclass

import numpy as np

from core.exceptions import EmptyGrid, InvalidInput

from .local import local_criterion

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EfficiencyReport:
    value: float
    criterion: object
    beta: tuple
    reference_design: object


@dataclass(frozen=True)
class MaximinProfile:
    """Per-parameter efficiencies of one design over a parameter grid"""

    efficiencies: np.ndarray
    worst_index: int
    at_grid_edge: bool

    @property
    def min_efficiency(self):
        return float(self.efficiencies[self.worst_index])

    @property
    def objective(self):
        worst = self.min_efficiency
        return np.inf if worst <= 0 else 1.0 / worst


def efficiency_value(model, xi, beta, crit, xi_opt):
    """Phi(xi*)/Phi(xi) with the homogeneous D-criterion; 0 for singular xi"""
    reference = local_criterion(model, xi_opt, beta, crit)
    value = local_criterion(model, xi, beta, crit)
    if not np.isfinite(value):
        return 0.0
    return float(reference / value)


def efficiency(model, xi, beta, crit, xi_opt):
    value = efficiency_value(model, xi, beta, crit, xi_opt)
    return EfficiencyReport(value, crit, tuple(np.asarray(beta, dtype=float).tolist()), xi_opt)


def _edge_index(param_set):
    """Index of the parameter with the largest reduced slope |beta_j / beta_0|"""
    reduced = [np.abs(np.asarray(b[1:], dtype=float) / b[0]).max() for b in param_set]
    return int(np.argmax(reduced))


def maximin_profile(model, xi, crit, param_set, local_optima):
    if len(param_set) == 0:
        raise EmptyGrid('Parameter grid is empty.')
    if len(param_set) != len(local_optima):
        raise InvalidInput('Need one local optimum per grid parameter.')
    efficiencies = np.array([
        efficiency_value(model, xi, beta, crit, xi_opt)
        for beta, xi_opt in zip(param_set, local_optima)
    ])
    worst = int(np.argmin(efficiencies))
    at_edge = len(param_set) > 1 and worst == _edge_index(param_set)
    if at_edge:
        logger.warning('Minimal efficiency %.6f sits at the largest grid slope; '
                       'the infimum may not be attained on the grid.', efficiencies[worst])
    return MaximinProfile(efficiencies, worst, bool(at_edge))


def maximin_objective(model, xi, crit, param_set, local_optima):
    """sup over the grid of Phi_beta(xi)/Phi_beta(xi*_beta), i.e. 1/min-efficiency"""
    return maximin_profile(model, xi, crit, param_set, local_optima).objective
