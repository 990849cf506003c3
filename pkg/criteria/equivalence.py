"""
Sensitivity functions and equivalence-theorem certificates.

D:    psi(x) = lambda(f'beta) f' M^-1 f          bound p
IMSE: psi(x) = lambda(f'beta) f' M^-1 V M^-1 f   bound trace(V M^-1)

A design is locally optimal iff psi stays below its bound on the region,
with equality on the support.
"""
import logging
from dataclasses import dataclass

import numpy as np

from core.conf import optdesign_setting
from core.exceptions import SingularInformation
from model_core.domain import Box, as_points
from model_core.information import design_info, intensity_values, weight_matrix_v

from .local import is_positive_definite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    max_sensitivity: float
    bound: float
    argmax: tuple
    passed: bool
    points_checked: int = 0

    @property
    def gap(self):
        return self.max_sensitivity - self.bound

    def as_dict(self):
        return {
            'max_sensitivity': self.max_sensitivity,
            'bound': self.bound,
            'argmax': list(self.argmax),
            'passed': self.passed,
        }


def _inverse_information(model, xi, beta):
    m = design_info(model, xi, beta)
    if not is_positive_definite(m):
        raise SingularInformation(
            f'Information matrix of a {len(xi)}-point design is singular for p = {model.p}.')
    return np.linalg.inv(m)


def d_sensitivities(model, xi, beta, points, m_inv=None):
    """D sensitivity at each of ``points``"""
    if m_inv is None:
        m_inv = _inverse_information(model, xi, beta)
    values, lam = intensity_values(model, as_points(points, model.dim_x), beta)
    return lam * np.einsum('ij,jk,ik->i', values, m_inv, values)


def imse_sensitivities(model, xi, beta, nu, points, m_inv=None, v=None):
    """IMSE sensitivity at each of ``points``"""
    if m_inv is None:
        m_inv = _inverse_information(model, xi, beta)
    if v is None:
        v = weight_matrix_v(model, beta, nu)
    values, lam = intensity_values(model, as_points(points, model.dim_x), beta)
    kernel = m_inv @ v @ m_inv
    return lam * np.einsum('ij,jk,ik->i', values, kernel, values)


def d_sensitivity(model, xi, beta, x):
    return float(d_sensitivities(model, xi, beta, x)[0])


def imse_sensitivity(model, xi, beta, nu, x):
    return float(imse_sensitivities(model, xi, beta, nu, x)[0])


def sensitivities(model, xi, beta, crit, points, v=None):
    """Sensitivities at ``points`` together with their bound"""
    m_inv = _inverse_information(model, xi, beta)
    if crit.is_d:
        return d_sensitivities(model, xi, beta, points, m_inv), float(model.p)
    if v is None:
        v = weight_matrix_v(model, beta, crit.nu)
    bound = float(np.trace(v @ m_inv))
    return imse_sensitivities(model, xi, beta, crit.nu, points, m_inv, v), bound


def prediction_variance(model, xi, beta, points):
    """lambda^2 f' M^-1 f: asymptotic variance of the predicted mean response"""
    m_inv = _inverse_information(model, xi, beta)
    values, lam = intensity_values(model, as_points(points, model.dim_x), beta)
    return lam * lam * np.einsum('ij,jk,ik->i', values, m_inv, values)


def equivalence_points(model):
    """Extremal points followed by a uniform check grid"""
    region = model.region
    vertices = region.extremal_points()
    if not isinstance(region, Box):
        return vertices
    grid = region.grid(optdesign_setting('CHECK_GRID_POINTS'), cap=optdesign_setting('CHECK_GRID_CAP'))
    return np.vstack([vertices, grid])


def equivalence_check(model, xi, beta, crit, points=None, tol=None, v=None):
    """Certify local optimality of ``xi`` by the equivalence theorem"""
    tol = optdesign_setting('SENSITIVITY_TOL') if tol is None else tol
    points = equivalence_points(model) if points is None else as_points(points, model.dim_x)
    values, bound = sensitivities(model, xi, beta, crit, points, v)
    worst = int(np.argmax(values))
    certificate = Certificate(
        max_sensitivity=float(values[worst]),
        bound=bound,
        argmax=tuple(points[worst].tolist()),
        passed=bool(values[worst] <= bound * (1.0 + tol)),
        points_checked=points.shape[0],
    )
    logger.debug('%s check on %d points: max %.10g, bound %.10g',
                 crit.kind, certificate.points_checked, certificate.max_sensitivity, bound)
    return certificate
