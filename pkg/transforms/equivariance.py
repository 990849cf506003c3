"""
Equivariance of gamma GLM designs.

For an affine point map g with f(g(x)) = Q_g f(x) the parameter map is either
linear, beta -> Q_g^-T beta, or intercept rescaled,
beta -> c(beta) Q_g^-T beta with c(beta) = beta_0 / (Q_g^-T beta)_0.
Under either, M(xi^g; g~(beta)) is a congruence of M(xi; beta) by Q_g,
scaled by c(beta)^-2 in the rescaled mode.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.conf import optdesign_setting
from core.exceptions import (
    DegenerateSample, InvalidInput, NonAxisAlignedImage, NotEquivariant, RescaleUndefined,
)
from criteria.local import CriterionSpec
from model_core.domain import Box, Design, DiscreteMeasure, UniformMeasure, check_points_in_region
from model_core.information import design_info

from .maps import AffinePointMap

logger = logging.getLogger(__name__)

LINEAR = 'linear'
INTERCEPT_RESCALED = 'intercept_rescaled'
PARAM_MODES = (LINEAR, INTERCEPT_RESCALED)

RESIDUAL_TOL = 1e-9
VERIFICATION_POINTS = 50
SELECTION_GRID_POINTS = 11


@dataclass(frozen=True, eq=False)
class TransformPair:
    """Point map g, its basis matrix Q_g and the parameter transform mode"""

    g: AffinePointMap
    q: np.ndarray
    param_mode: str = LINEAR

    def __post_init__(self):
        if self.param_mode not in PARAM_MODES:
            raise InvalidInput(f'Unknown parameter mode {self.param_mode!r}.')
        q = np.array(self.q, dtype=float, ndmin=2)
        if q.shape[0] != q.shape[1] or abs(np.linalg.det(q)) <= 1e-12:
            raise InvalidInput('Q_g must be a nonsingular square matrix.')
        q.setflags(write=False)
        object.__setattr__(self, 'q', q)

    def __repr__(self):
        return f'TransformPair(g={self.g!r}, q={self.q.tolist()}, param_mode={self.param_mode!r})'

    @property
    def rescaled(self):
        return self.param_mode == INTERCEPT_RESCALED

    def as_dict(self):
        data = self.g.as_dict()
        data['q'] = self.q.tolist()
        data['param_mode'] = self.param_mode
        return data


def _selection_points(model):
    region = model.region
    points = region.extremal_points()
    if isinstance(region, Box):
        points = np.vstack([points, region.grid(SELECTION_GRID_POINTS, cap=optdesign_setting('CHECK_GRID_CAP'))])
    return points


def derive_q(model, g):
    """Solve f(g(x)) = Q f(x) on p well-conditioned region points and verify it"""
    if g.dim != model.dim_x:
        raise InvalidInput(f'Point map dimension {g.dim} does not match the model ({model.dim_x}).')
    points = _selection_points(model)
    values = model.basis(points).T
    _, r, pivots = scipy.linalg.qr(values, pivoting=True, mode='economic')
    p = model.p
    diagonal = np.abs(np.diag(r))
    if diagonal.size < p or diagonal[p - 1] <= 1e-10 * diagonal[0]:
        raise DegenerateSample('No nonsingular set of basis values found on the region.')
    chosen = points[pivots[:p]]
    f_x = model.basis(chosen).T
    f_gx = model.basis(g(chosen)).T
    q = np.linalg.solve(f_x.T, f_gx.T).T

    rng = np.random.default_rng(optdesign_setting('SEED'))
    sample = model.region.sample(VERIFICATION_POINTS, rng)
    mapped = model.basis(g(sample))
    predicted = model.basis(sample) @ q.T
    scale = np.maximum(1.0, np.abs(mapped).max(axis=1))
    residual = float((np.abs(mapped - predicted).max(axis=1) / scale).max())
    if residual >= RESIDUAL_TOL:
        raise NotEquivariant(
            f'Basis {model.basis.name!r} is not linearly equivariant under {g!r} '
            f'(residual {residual:.3g}).', residual=residual)
    logger.debug('Derived Q_g with residual %.3g', residual)
    return q


def check_param_mode(model, param_mode):
    """Intercept rescaling needs an intercept and lambda(c z) = c^-2 lambda(z)"""
    if param_mode not in PARAM_MODES:
        raise InvalidInput(f'Unknown parameter mode {param_mode!r}.')
    if param_mode != INTERCEPT_RESCALED:
        return
    if not model.basis.has_intercept:
        raise InvalidInput('Intercept rescaling needs a basis with an intercept.')
    if not model.is_gamma:
        raise InvalidInput('Intercept rescaling is only defined for the gamma inverse link.')


def make_pair(model, g, param_mode=LINEAR):
    """TransformPair with Q_g derived from the model's basis"""
    check_param_mode(model, param_mode)
    return TransformPair(g, derive_q(model, g), param_mode)


def identity_pair(model, param_mode=LINEAR):
    return TransformPair(AffinePointMap.identity(model.dim_x), np.eye(model.p), param_mode)


def linear_image(pair, beta):
    """Q_g^-T beta"""
    return np.linalg.solve(pair.q.T, np.asarray(beta, dtype=float))


def rescale_factor(pair, beta):
    """c(beta) = beta_0 / (Q_g^-T beta)_0; 1 in linear mode"""
    if not pair.rescaled:
        return 1.0
    beta = np.asarray(beta, dtype=float)
    intercept = linear_image(pair, beta)[0]
    if intercept <= 0:
        raise RescaleUndefined(
            f'(Q^-T beta)_0 = {intercept:.6g} is not positive; the intercept cannot be preserved.')
    return float(beta[0] / intercept)


def param_transform(pair, beta):
    beta = np.asarray(beta, dtype=float)
    return rescale_factor(pair, beta) * linear_image(pair, beta)


def compose(first, second):
    """Pair for ``second`` applied after ``first``"""
    if first.param_mode != second.param_mode:
        raise InvalidInput('Cannot compose pairs with different parameter modes.')
    return TransformPair(first.g.then(second.g), second.q @ first.q, first.param_mode)


def inverse_pair(pair):
    return TransformPair(pair.g.inverse(), np.linalg.inv(pair.q), pair.param_mode)


def design_image(xi, pair, model=None):
    """xi^g: support mapped pointwise, weights kept, coincident images merged"""
    support = pair.g(xi.support)
    if model is not None:
        check_points_in_region(model, support, what='image point')
    return Design(support, xi.weights)


def image_model(model, g):
    """The model on the image region g(X)"""
    return model.with_region(g.image_region(model.region))


def pushforward_measure(nu, g):
    """nu^g: atoms mapped with weights kept, uniform mapped to the image box"""
    if isinstance(nu, DiscreteMeasure):
        return DiscreteMeasure(g(nu.points), nu.weights)
    if isinstance(nu, UniformMeasure):
        if not g.is_coordinatewise:
            raise NonAxisAlignedImage('A uniform measure can only be pushed through a coordinatewise map.')
        return UniformMeasure(g.image_region(nu.region))
    raise InvalidInput(f'Unsupported weighting measure {nu!r}.')


def verify_info_equivariance(model, xi, beta, pair):
    """Max relative entrywise residual of M(xi^g; g~(beta)) against c^-2 Q M Q'"""
    beta = np.asarray(beta, dtype=float)
    expected = pair.q @ design_info(model, xi, beta) @ pair.q.T
    expected = expected / rescale_factor(pair, beta) ** 2
    mapped = design_info(model, design_image(xi, pair), param_transform(pair, beta))
    return float(np.abs(mapped - expected).max() / np.abs(expected).max())


@dataclass(frozen=True, eq=False)
class TransferResult:
    """Image of a locally optimal design with its parameter and measure maps"""

    design: Design
    model: object
    pair: TransformPair
    criterion: object

    def param_map(self, beta):
        return param_transform(self.pair, beta)

    @property
    def nu(self):
        return self.criterion.nu


def transfer_optimal(model, xi_opt, pair, crit):
    """Transfer a locally optimal design to the image region"""
    check_param_mode(model, pair.param_mode)
    target = image_model(model, pair.g)
    image = design_image(xi_opt, pair, target)
    if crit.is_d:
        target_crit = crit
    else:
        target_crit = CriterionSpec.imse(pushforward_measure(crit.nu, pair.g))
    return TransferResult(image, target, pair, target_crit)
