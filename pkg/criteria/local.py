"""Local D- and IMSE-criteria; singular information maps to +inf."""
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidInput, SingularInformation
from model_core.domain import UniformMeasure
from model_core.information import design_info, weight_matrix_v

PD_RELATIVE_TOL = 1e-12


@dataclass(frozen=True)
class CriterionSpec:
    """D-criterion, or IMSE with a weighting measure ``nu``"""

    kind: str
    nu: object = None

    def __post_init__(self):
        if self.kind not in ('D', 'IMSE'):
            raise InvalidInput(f'Unknown criterion {self.kind!r}.')
        if self.kind == 'IMSE' and self.nu is None:
            raise InvalidInput('The IMSE criterion needs a weighting measure.')

    @classmethod
    def d(cls):
        return cls('D')

    @classmethod
    def imse(cls, nu):
        return cls('IMSE', nu)

    @property
    def is_d(self):
        return self.kind == 'D'

    def on_region(self, region):
        """Same criterion with a uniform measure rebuilt on ``region``"""
        if isinstance(self.nu, UniformMeasure) and self.nu.region != region:
            return CriterionSpec('IMSE', UniformMeasure(region))
        return self

    def as_dict(self):
        if self.is_d:
            return {'kind': 'D'}
        return {'kind': 'IMSE', 'nu': self.nu.as_dict()}


def is_positive_definite(m):
    m = np.asarray(m, dtype=float)
    trace = np.trace(m)
    if not trace > 0:
        return False
    return bool(np.linalg.eigvalsh(m).min() > PD_RELATIVE_TOL * trace)


def require_positive_definite(m):
    if not is_positive_definite(m):
        raise SingularInformation('Information matrix is singular.')


def d_value(m):
    """det(M)^-1, +inf for singular M"""
    if not is_positive_definite(m):
        return np.inf
    return float(1.0 / np.linalg.det(m))


def d_homogeneous(m, p):
    """det(M)^(-1/p), +inf for singular M"""
    if not is_positive_definite(m):
        return np.inf
    sign, logdet = np.linalg.slogdet(m)
    return float(np.exp(-logdet / p))


def imse_value(model, xi, beta, nu, v=None):
    """trace(V M^-1)"""
    m = design_info(model, xi, beta)
    if not is_positive_definite(m):
        return np.inf
    if v is None:
        v = weight_matrix_v(model, beta, nu)
    return float(np.trace(np.linalg.solve(m, v)))


def local_criterion(model, xi, beta, crit, v=None):
    """Homogeneous criterion used for efficiencies: det^(-1/p) for D, IMSE as is"""
    if crit.is_d:
        return d_homogeneous(design_info(model, xi, beta), model.p)
    return imse_value(model, xi, beta, crit.nu, v)


def criterion_value(model, xi, beta, crit, v=None):
    """Raw criterion: det(M)^-1 for D, trace(V M^-1) for IMSE"""
    if crit.is_d:
        return d_value(design_info(model, xi, beta))
    return imse_value(model, xi, beta, crit.nu, v)
