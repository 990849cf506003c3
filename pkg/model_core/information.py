"""
Basis evaluation, intensities and information matrices.

M(x; beta) = lambda(f(x)'beta) f(x) f(x)'
M(xi; beta) = sum_i w_i M(x_i; beta)
V(beta; nu) = int lambda(f(x)'beta)^2 f(x) f(x)' nu(dx)
"""
import functools
import logging

import numpy as np

from core.conf import optdesign_setting
from core.exceptions import InvalidInput, NonpositiveLinearComponent

from .domain import Box, DiscreteMeasure, UniformMeasure, as_points, check_points_in_region

logger = logging.getLogger(__name__)


def basis_matrix(model, points):
    """Rows f(x_i)' for every point, no region check"""
    return model.basis(as_points(points, model.dim_x))


def eval_basis(model, x):
    """f(x) for a single covariate vector inside the region"""
    point = check_points_in_region(model, as_points(x, model.dim_x))
    return model.basis(point)[0]


def intensity(model, z):
    """lambda(z) for one value of the linear component"""
    return float(np.asarray(model.intensity(np.asarray([float(z)])))[0])


def linear_predictor(model, points, beta):
    return basis_matrix(model, points) @ np.asarray(beta, dtype=float)


def intensity_values(model, points, beta):
    """Basis rows and intensities at ``points``; raises on nonpositive f'beta"""
    points = as_points(points, model.dim_x)
    values = model.basis(points)
    z = values @ np.asarray(beta, dtype=float)
    if model.intensity.requires_positive_predictor and np.any(z <= 0):
        index = int(np.flatnonzero(z <= 0)[0])
        raise NonpositiveLinearComponent(
            f'f(x)\'beta = {z[index]:.6g} <= 0 at x = {points[index].tolist()} (index {index}).',
            index=index, point=points[index].tolist())
    return values, model.intensity(z)


def elemental_infos(model, points, beta):
    """Stack of lambda(f(x_i)'beta) f(x_i) f(x_i)', one p x p slice per point"""
    values, lam = intensity_values(model, points, beta)
    return lam[:, None, None] * np.einsum('ij,ik->ijk', values, values)


def elemental_info(model, x, beta):
    """Information of a single observation at x: lambda(f(x)'beta) f(x) f(x)'.

    Raises NonpositiveLinearComponent when f(x)'beta <= 0 under the gamma
    inverse link.
    """
    return elemental_infos(model, as_points(x, model.dim_x), beta)[0]


def design_info(model, xi, beta):
    """Information matrix of an approximate design"""
    m = np.tensordot(xi.weights, elemental_infos(model, xi.support, beta), axes=1)
    return (m + m.T) / 2


@functools.lru_cache(maxsize=32)
def _tensor_gauss_legendre(lower, upper, order):
    nodes_1d, weights_1d = np.polynomial.legendre.leggauss(order)
    axes, axis_weights = [], []
    for lo, hi in zip(lower, upper):
        axes.append(lo + (hi - lo) * (nodes_1d + 1.0) / 2.0)
        axis_weights.append(weights_1d / 2.0)
    mesh = np.meshgrid(*axes, indexing='ij')
    nodes = np.column_stack([m.ravel() for m in mesh])
    weight_mesh = np.meshgrid(*axis_weights, indexing='ij')
    weights = np.prod(np.stack([w.ravel() for w in weight_mesh]), axis=0)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def uniform_quadrature(box, order=None):
    """Tensor Gauss-Legendre nodes and probability weights for the uniform measure on a box"""
    order = int(order or optdesign_setting('QUADRATURE_ORDER'))
    if order < 1:
        raise InvalidInput('Quadrature order must be at least 1.')
    return _tensor_gauss_legendre(tuple(box.lower), tuple(box.upper), order)


def measure_atoms(nu, order=None):
    """Points and weights representing ``nu`` exactly or by quadrature"""
    if isinstance(nu, DiscreteMeasure):
        return nu.points, nu.weights
    if isinstance(nu, UniformMeasure):
        return uniform_quadrature(nu.region, order)
    raise InvalidInput(f'Unsupported weighting measure {nu!r}.')


def weight_matrix_v(model, beta, nu, order=None):
    """Weighted moment matrix V(beta; nu) of the IMSE criterion"""
    points, weights = measure_atoms(nu, order)
    if isinstance(nu, DiscreteMeasure):
        check_points_in_region(model, points, what='weighting point')
    values, lam = intensity_values(model, points, beta)
    v = values.T @ ((weights * lam * lam)[:, None] * values)
    logger.debug('V computed from %d atoms', weights.size)
    return (v + v.T) / 2


def positivity_points(model):
    """Points at which positivity of f(x)'beta is checked"""
    region = model.region
    if not isinstance(region, Box):
        return region.extremal_points()
    if model.basis.affine:
        return region.extremal_points()
    return region.grid(optdesign_setting('POSITIVITY_GRID_POINTS'),
                       cap=optdesign_setting('POSITIVITY_GRID_CAP'))


def check_parameter(model, beta):
    """Validate beta and return it as a float vector"""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.ndim != 1 or beta.size != model.p:
        raise InvalidInput(f'beta must have {model.p} entries, got {beta.size}.')
    if not np.all(np.isfinite(beta)):
        raise InvalidInput('beta must be finite.')
    if model.intensity.requires_positive_predictor:
        intensity_values(model, positivity_points(model), beta)
    return beta


def in_parameter_region(model, beta):
    try:
        check_parameter(model, beta)
    except NonpositiveLinearComponent:
        return False
    return True


def mean_response(model, x, beta):
    """Mean 1/(f(x)'beta) of the gamma model with inverse link, up to sign"""
    z = linear_predictor(model, x, beta)
    return 1.0 / z


def sample_parameters(model, n, rng, max_tries=1000):
    """Random parameters inside the parameter region, intercepts in [0.5, 2]"""
    span = float(np.abs(np.vstack([model.region.lower, model.region.upper])).max()) or 1.0
    found = []
    for _ in range(max_tries * n):
        beta = np.empty(model.p)
        beta[0] = rng.uniform(0.5, 2.0)
        beta[1:] = beta[0] * rng.uniform(-1.0, 3.0, model.p - 1) / (span * (model.p - 1))
        if in_parameter_region(model, beta):
            found.append(beta)
            if len(found) == n:
                return found
    raise InvalidInput(f'Could not sample {n} parameters inside the parameter region.')
