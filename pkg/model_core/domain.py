"""
Domain types for gamma GLM design problems.

Regions, regression bases, intensity functions, model specifications,
approximate designs and IMSE weighting measures. All values are immutable
after construction; numpy arrays handed out are read-only views.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from core.conf import optdesign_setting
from core.exceptions import InvalidInput, NonpositiveLinearComponent, OutOfRegion

REGION_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
DEDUP_TOL = 1e-9


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def as_points(points, dim_x=None):
    """Coerce a point or list of points to an (n, dim_x) float array"""
    points = np.asarray(points, dtype=float)
    if points.ndim == 0:
        points = points.reshape(1, 1)
    elif points.ndim == 1:
        points = points.reshape(1, -1) if dim_x is None or points.size == dim_x else points.reshape(-1, 1)
    if dim_x is not None and points.shape[1] != dim_x:
        raise InvalidInput(f'Expected points of dimension {dim_x}, got {points.shape[1]}.')
    return points


# ============= REGIONS =============

class Box:
    """Hyperrectangle [lower, upper] in dim_x coordinates"""

    kind = 'box'

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1 or lower.size == 0:
            raise InvalidInput('Region bounds must be two vectors of equal length.')
        if np.any(upper <= lower):
            raise InvalidInput('Every upper bound must exceed its lower bound.')
        self.lower = _frozen(lower)
        self.upper = _frozen(upper)

    def __repr__(self):
        return f'Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})'

    def __eq__(self, other):
        return (isinstance(other, Box) and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __hash__(self):
        return hash((tuple(self.lower), tuple(self.upper)))

    @property
    def dim(self):
        return self.lower.size

    def extremal_points(self):
        """Vertices in lexicographic order, e.g. (0,0), (0,1), (1,0), (1,1)"""
        corners = itertools.product(*zip(self.lower, self.upper))
        return np.array(list(corners), dtype=float)

    def contains(self, points, tol=REGION_TOL):
        points = as_points(points, self.dim)
        return np.all((points >= self.lower - tol) & (points <= self.upper + tol), axis=1)

    def grid(self, points_per_axis, cap=None):
        """Uniform tensor grid, thinned so that it has at most ``cap`` points"""
        n = int(points_per_axis)
        if cap is not None:
            while n > 2 and n ** self.dim > cap:
                n -= 1
        axes = [np.linspace(lo, hi, n) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.column_stack([m.ravel() for m in mesh])

    def sample(self, n, rng):
        return self.lower + (self.upper - self.lower) * rng.random((n, self.dim))

    def interior_sample(self, n, rng):
        """Random points strictly inside the box"""
        return self.lower + (self.upper - self.lower) * rng.uniform(0.05, 0.95, (n, self.dim))

    def as_dict(self):
        return {'lower': self.lower.tolist(), 'upper': self.upper.tolist()}


class CandidateSet:
    """Finite experimental region given by an explicit list of points"""

    kind = 'candidates'

    def __init__(self, points):
        points = as_points(points)
        if points.shape[0] == 0:
            raise InvalidInput('A candidate region needs at least one point.')
        self.points = _frozen(points)

    def __repr__(self):
        return f'CandidateSet({self.points.tolist()})'

    def __eq__(self, other):
        return isinstance(other, CandidateSet) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def lower(self):
        return self.points.min(axis=0)

    @property
    def upper(self):
        return self.points.max(axis=0)

    def extremal_points(self):
        return np.array(self.points)

    def contains(self, points, tol=DEDUP_TOL):
        points = as_points(points, self.dim)
        gaps = np.abs(points[:, None, :] - self.points[None, :, :]).max(axis=2)
        return gaps.min(axis=1) <= tol

    def grid(self, points_per_axis=None, cap=None):
        return np.array(self.points)

    def sample(self, n, rng):
        return self.points[rng.integers(0, self.points.shape[0], size=n)]

    def interior_sample(self, n, rng):
        return self.sample(n, rng)

    def as_dict(self):
        return {'candidates': self.points.tolist()}


# ============= BASES =============

def _linear(points):
    return np.hstack([np.ones((points.shape[0], 1)), points])


def _quadratic(points):
    x = points[:, 0]
    return np.column_stack([np.ones_like(x), x, x * x])


@dataclass(frozen=True)
class Basis:
    """Regression functions f(x) = (f_0(x), ..., f_{p-1}(x))"""

    name: str
    dim_x: int
    p: int
    func: object = field(repr=False, compare=False)
    affine: bool = False
    has_intercept: bool = True

    def __call__(self, points):
        values = np.asarray(self.func(as_points(points, self.dim_x)), dtype=float)
        if values.ndim != 2 or values.shape[1] != self.p:
            raise InvalidInput(f'Basis {self.name!r} must return {self.p} values per point.')
        return values


def builtin_basis(name, dim_x):
    """Look up one of the built-in bases by name"""
    if name in ('linear', 'additive'):
        return Basis(name, dim_x, dim_x + 1, _linear, affine=True)
    if name == 'quadratic':
        if dim_x != 1:
            raise InvalidInput('The quadratic basis is defined for one factor only.')
        return Basis(name, 1, 3, _quadratic)
    raise InvalidInput(f'Unknown basis {name!r}; expected linear, additive or quadratic.')


# ============= INTENSITIES =============

@dataclass(frozen=True)
class GammaInverseLink:
    """lambda(z) = kappa / z**2, defined for z > 0"""

    kappa: float = 1.0
    requires_positive_predictor = True

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidInput('kappa must be positive.')

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            bad = int(np.flatnonzero(np.atleast_1d(z) <= 0)[0])
            raise NonpositiveLinearComponent(
                'Linear component must be positive under the gamma inverse link.', index=bad)
        return self.kappa / (z * z)


@dataclass(frozen=True)
class CustomIntensity:
    """User supplied positive intensity of the linear component"""

    func: object = field(compare=False)
    name: str = 'custom'
    requires_positive_predictor = False

    def __call__(self, z):
        values = np.asarray(self.func(np.asarray(z, dtype=float)), dtype=float)
        if np.any(values <= 0):
            raise InvalidInput('Custom intensity must be positive.')
        return values


# ============= MODEL =============

@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Regression basis, intensity and experimental region"""

    basis: Basis
    region: object
    intensity: object = None

    def __post_init__(self):
        if self.intensity is None:
            object.__setattr__(self, 'intensity', GammaInverseLink(optdesign_setting('KAPPA')))
        if self.basis.dim_x != self.region.dim:
            raise InvalidInput(
                f'Basis dimension {self.basis.dim_x} does not match region dimension {self.region.dim}.')
        if self.p < 2:
            raise InvalidInput('A model needs at least two regression functions.')
        self._check_basis_rank()

    @classmethod
    def builtin(cls, basis='linear', lower=(0.0,), upper=(1.0,), kappa=None, candidates=None):
        """Build a model from a built-in basis name and box bounds or candidates"""
        region = CandidateSet(candidates) if candidates is not None else Box(lower, upper)
        intensity = GammaInverseLink(kappa) if kappa is not None else None
        return cls(builtin_basis(basis, region.dim), region, intensity)

    @property
    def dim_x(self):
        return self.basis.dim_x

    @property
    def p(self):
        return self.basis.p

    @property
    def kappa(self):
        return getattr(self.intensity, 'kappa', None)

    def with_region(self, region):
        """Same basis and intensity on another region"""
        return ModelSpec(self.basis, region, self.intensity)

    def _check_basis_rank(self):
        needed = self.p + math.ceil(self.p / 2)
        rng = np.random.default_rng(optdesign_setting('SEED'))
        points = self.region.extremal_points()
        if points.shape[0] < needed and self.region.kind == 'box':
            points = np.vstack([points, self.region.interior_sample(needed - points.shape[0], rng)])
        values = self.basis(points)
        if np.linalg.matrix_rank(values.T @ values) < self.p:
            raise InvalidInput('Basis functions are linearly dependent on the region.')

    @property
    def is_gamma(self):
        return isinstance(self.intensity, GammaInverseLink)

    def as_dict(self):
        """JSON form read back by ModelSpecSerializer; gamma models only"""
        if not self.is_gamma:
            raise InvalidInput(
                f'A model with intensity {getattr(self.intensity, "name", self.intensity)!r} '
                'cannot be written as JSON.')
        data = {'dim_x': self.dim_x, 'basis': self.basis.name}
        data['region'] = self.region.as_dict()
        data['kappa'] = self.kappa
        return data


# ============= DESIGNS =============

@dataclass(frozen=True, eq=False)
class Design:
    """Approximate design: distinct support points with positive weights"""

    support: np.ndarray
    weights: np.ndarray

    def __init__(self, support, weights, merge_tol=DEDUP_TOL):
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if np.ndim(support) == 1 and len(support) == weights.size:
            support = np.reshape(support, (-1, 1))
        support = as_points(support)
        if support.shape[0] != weights.size:
            raise InvalidInput('Support and weights must have the same length.')
        if weights.size == 0:
            raise InvalidInput('A design needs at least one support point.')
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise InvalidInput('Design weights must be positive.')
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInput(f'Design weights sum to {weights.sum():.15g}, not 1.')
        support, weights = _merge_points(support, weights, merge_tol)
        object.__setattr__(self, 'support', _frozen(support))
        object.__setattr__(self, 'weights', _frozen(weights))

    @classmethod
    def normalized(cls, support, weights, prune=0.0):
        """Drop weights at or below ``prune`` and rescale the rest to sum 1"""
        support = as_points(support)
        weights = np.asarray(weights, dtype=float)
        keep = weights > prune
        if not np.any(keep):
            raise InvalidInput('All design weights were pruned.')
        kept = weights[keep]
        return cls(support[keep], kept / kept.sum())

    @classmethod
    def uniform(cls, support):
        support = as_points(support)
        return cls(support, np.full(support.shape[0], 1.0 / support.shape[0]))

    def __len__(self):
        return self.weights.size

    def __repr__(self):
        pairs = ', '.join(f'{pt.tolist()}: {w:.6g}' for pt, w in zip(self.support, self.weights))
        return f'Design({pairs})'

    @property
    def dim_x(self):
        return self.support.shape[1]

    def canonical(self):
        """Same measure with support in lexicographic order"""
        order = np.lexsort(self.support.T[::-1])
        return Design(self.support[order], self.weights[order])

    def weight_at(self, point, tol=DEDUP_TOL):
        gaps = np.abs(self.support - as_points(point, self.dim_x)).max(axis=1)
        hits = np.flatnonzero(gaps <= tol)
        return float(self.weights[hits[0]]) if hits.size else 0.0

    def weights_on(self, points, tol=DEDUP_TOL):
        """Weights at each of ``points``, zero where a point is not in the support"""
        return np.array([self.weight_at(pt, tol) for pt in as_points(points, self.dim_x)])

    def same_measure(self, other, tol=1e-12):
        if self.dim_x != other.dim_x or len(self) != len(other):
            return False
        points = np.vstack([self.support, other.support])
        return bool(np.allclose(self.weights_on(points), other.weights_on(points), atol=tol, rtol=0))

    def as_dict(self):
        return {'support': self.support.tolist(), 'weights': self.weights.tolist()}


def _merge_points(support, weights, tol):
    kept_points, kept_weights = [], []
    for point, weight in zip(support, weights):
        for i, existing in enumerate(kept_points):
            if np.max(np.abs(existing - point)) <= tol:
                kept_weights[i] += weight
                break
        else:
            kept_points.append(point)
            kept_weights.append(weight)
    return np.array(kept_points), np.array(kept_weights)


def mixture(designs, coefficients=None):
    """Convex combination of designs with coincident points merged"""
    designs = list(designs)
    if coefficients is None:
        coefficients = np.full(len(designs), 1.0 / len(designs))
    support = np.vstack([xi.support for xi in designs])
    weights = np.concatenate([c * xi.weights for c, xi in zip(coefficients, designs)])
    return Design(support, weights / weights.sum())


# ============= WEIGHTING MEASURES =============

class DiscreteMeasure:
    """Weighting measure with finitely many atoms"""

    kind = 'discrete'

    def __init__(self, points, weights):
        points = as_points(points)
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if points.shape[0] != weights.size:
            raise InvalidInput('Measure points and weights must have the same length.')
        if np.any(weights <= 0):
            raise InvalidInput('Measure weights must be positive.')
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInput('Measure weights must sum to 1.')
        self.points = _frozen(points)
        self.weights = _frozen(weights)

    def __repr__(self):
        return f'DiscreteMeasure(points={self.points.tolist()}, weights={self.weights.tolist()})'

    @property
    def dim(self):
        return self.points.shape[1]

    def same_measure(self, other, tol=1e-9):
        if not isinstance(other, DiscreteMeasure) or other.dim != self.dim:
            return False
        left = Design(self.points, self.weights)
        right = Design(other.points, other.weights)
        return left.same_measure(right, tol)

    def as_dict(self):
        return {'kind': 'discrete', 'points': self.points.tolist(), 'weights': self.weights.tolist()}


class UniformMeasure:
    """Continuous uniform probability measure on a box"""

    kind = 'uniform'

    def __init__(self, region):
        if not isinstance(region, Box):
            raise InvalidInput('Continuous uniform weighting is supported on box regions only.')
        self.region = region

    def __repr__(self):
        return f'UniformMeasure({self.region!r})'

    @property
    def dim(self):
        return self.region.dim

    def same_measure(self, other, tol=1e-10):
        return (isinstance(other, UniformMeasure)
                and np.allclose(self.region.lower, other.region.lower, atol=tol, rtol=0)
                and np.allclose(self.region.upper, other.region.upper, atol=tol, rtol=0))

    def as_dict(self):
        return {'kind': 'uniform'}


def check_points_in_region(model, points, what='point'):
    """Raise OutOfRegion listing every point outside the model's region"""
    points = as_points(points, model.dim_x)
    outside = ~model.region.contains(points)
    if np.any(outside):
        bad = points[outside].tolist()
        raise OutOfRegion(f'{what.capitalize()}s outside the experimental region: {bad}', points=bad)
    return points
