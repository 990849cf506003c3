"""
Closed-form locally optimal designs for the gamma model on [0,1] and [0,1]^2.

Vertices of the unit square are reported in lexicographic order
(0,0), (0,1), (1,0), (1,1).
"""
import math

import numpy as np

from core.exceptions import OutOfParameterRegion, WrongModelShape
from model_core.domain import Design, DiscreteMeasure, ModelSpec, UniformMeasure

UNIFORM_CONTINUOUS = 'uniform_continuous'
UNIFORM_ENDPOINTS = 'uniform_endpoints'
MIDPOINT_MASS = 'midpoint_mass'
NU_VARIANTS = (UNIFORM_CONTINUOUS, UNIFORM_ENDPOINTS, MIDPOINT_MASS)

ORIGIN, TOP, RIGHT, CORNER = (0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)

B1, B2, B3, B4, INTERIOR = 'B1', 'B2', 'B3', 'B4', 'Interior'

# minimally supported locally D-optimal designs on the unit square, by region
REGION_SUPPORTS = {
    B1: (ORIGIN, TOP, RIGHT),
    B2: (TOP, RIGHT, CORNER),
    B3: (ORIGIN, RIGHT, CORNER),
    B4: (ORIGIN, TOP, CORNER),
}


def one_factor_model():
    return ModelSpec.builtin('linear', lower=[0.0], upper=[1.0])


def two_factor_model():
    return ModelSpec.builtin('additive', lower=[0.0, 0.0], upper=[1.0, 1.0])


def prop1_measure(nu_variant, model=None):
    """Weighting measure of each closed-form case on [0,1]"""
    model = model or one_factor_model()
    if nu_variant == UNIFORM_CONTINUOUS:
        return UniformMeasure(model.region)
    if nu_variant == UNIFORM_ENDPOINTS:
        return DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    if nu_variant == MIDPOINT_MASS:
        return DiscreteMeasure([[0.5]], [1.0])
    raise WrongModelShape(f'Unknown weighting variant {nu_variant!r}; expected one of {NU_VARIANTS}.')


def _check_one_factor(beta):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (2,):
        raise WrongModelShape('Closed form needs a one-factor beta = (beta0, beta1).')
    if not (beta[0] > 0 and beta[0] + beta[1] > 0):
        raise OutOfParameterRegion(f'beta = {beta.tolist()} is not positive on [0, 1].')
    return beta


def prop1_weights(beta, nu_variant):
    """Weights at 0 and 1 of the locally IMSE-optimal endpoint design"""
    b0, b1 = _check_one_factor(beta)
    if nu_variant == UNIFORM_CONTINUOUS:
        return 0.5, 0.5
    if nu_variant == UNIFORM_ENDPOINTS:
        return (b0 + b1) / (2 * b0 + b1), b0 / (2 * b0 + b1)
    if nu_variant == MIDPOINT_MASS:
        return b0 / (2 * b0 + b1), (b0 + b1) / (2 * b0 + b1)
    raise WrongModelShape(f'Unknown weighting variant {nu_variant!r}; expected one of {NU_VARIANTS}.')


def prop1_closed_form(beta, nu_variant):
    return Design([[0.0], [1.0]], prop1_weights(beta, nu_variant))


def _check_gamma(value, lower, name):
    if not (np.isfinite(value) and value > lower):
        raise OutOfParameterRegion(f'{name} = {value} must exceed {lower}.')


def w_star_beta1_zero(gamma2):
    """Optimal orbit weight of the invariant design at beta = (beta0, 0, gamma2*beta0)

    Maximizes w^2 (1/2 - w) + w (1/2 - w)^2 / u with u = (1 + gamma2)^2, the
    root of 3(u-1) w^2 - (u-2) w - 1/4 = 0 in (0, 1/2).
    """
    gamma2 = float(gamma2)
    _check_gamma(gamma2, -1.0, 'gamma2')
    if gamma2 == 0.0:
        return 0.25
    u = (1.0 + gamma2) ** 2
    return 1.0 / (2.0 * (math.sqrt(u * u - u + 1.0) + 2.0 - u))


def det_beta1_zero(w, gamma2, beta0=1.0):
    """det M of the invariant design with weight w on (0,0),(1,0) and 1/2-w on (0,1),(1,1)"""
    lam1 = 1.0 / beta0 ** 2
    lam3 = 1.0 / (beta0 * (1.0 + gamma2)) ** 2
    v = 0.5 - w
    return 2.0 * (lam1 ** 2 * lam3 * w * w * v + lam1 * lam3 ** 2 * w * v * v)


def beta1_zero_design(gamma2):
    w = w_star_beta1_zero(gamma2)
    return Design([ORIGIN, TOP, RIGHT, CORNER], [w, 0.5 - w, w, 0.5 - w])


def equal_slopes_weights(gamma):
    """Weights on (0,0), (0,1), (1,0), (1,1) of the locally D-optimal design at beta = (1, gamma, gamma)"""
    gamma = float(gamma)
    _check_gamma(gamma, -0.5, 'gamma')
    third = 1.0 / 3.0
    if gamma >= 1.0:
        return third, third, third, 0.0
    if gamma <= -third:
        return 0.0, third, third, third
    w1 = (3 * gamma + 1) / (4 * (2 * gamma + 1))
    w2 = (gamma + 1) ** 2 / (4 * (2 * gamma + 1))
    w3 = (1 - gamma) / 4
    return w1, w2, w2, w3


def equal_slopes_closed_form(gamma):
    weights = np.asarray(equal_slopes_weights(gamma))
    vertices = np.array([ORIGIN, TOP, RIGHT, CORNER])
    keep = weights > 0
    return Design(vertices[keep], weights[keep] / weights[keep].sum())


def equal_slopes_det(w, gamma, beta0=1.0):
    """det M of the invariant design with weight w on (0,0),(1,1) and 1/2-w on (0,1),(1,0)"""
    s = 1.0 - 2.0 * w
    numerator = w * s * ((1 + gamma) ** 2 + gamma ** 2 * s)
    return numerator / (2 * beta0 ** 6 * (1 + gamma) ** 4 * (1 + 2 * gamma) ** 2)


def equal_slopes_efficiency_cubed(w, gamma):
    """Cubed D-efficiency of the invariant design for gamma >= 1"""
    s = 1.0 - 2.0 * w
    return 27.0 * w * s * ((1 + gamma) ** 2 + gamma ** 2 * s) / (2 * (1 + 2 * gamma) ** 2)


def equal_slopes_limit_efficiency(w):
    """D-efficiency of the invariant design as gamma tends to infinity"""
    return (27.0 * w * (1 - 2 * w) * (1 - w) / 4.0) ** (1.0 / 3.0)


MAXIMIN_EQUAL_SLOPES_WEIGHT = (3.0 - math.sqrt(3.0)) / 6.0


def classify_region(gamma1, gamma2):
    """Optimality region of the reduced parameter (gamma1, gamma2); ties go to the lowest index"""
    g1, g2 = float(gamma1), float(gamma2)
    if not (g1 > -1 and g2 > -1 and g1 + g2 > -1):
        raise OutOfParameterRegion(f'(gamma1, gamma2) = ({g1}, {g2}) is outside the parameter region.')
    if 1 - g1 * g2 <= 0:
        return B1
    if (1 + g1 + g2) ** 2 - g1 * g2 <= 0:
        return B2
    if (1 + g1) ** 2 + g1 * g2 <= 0:
        return B3
    if (1 + g2) ** 2 + g1 * g2 <= 0:
        return B4
    return INTERIOR


def region_design(label):
    """Equal-weight minimally supported design of a region label"""
    if label not in REGION_SUPPORTS:
        raise OutOfParameterRegion(f'No minimally supported design for region {label!r}.')
    return Design.uniform(REGION_SUPPORTS[label])


def reduced_parameter(beta):
    """gamma_j = beta_j / beta_0"""
    beta = np.asarray(beta, dtype=float)
    if beta[0] == 0:
        raise OutOfParameterRegion('The intercept must be nonzero to reduce beta.')
    return beta[1:] / beta[0]
