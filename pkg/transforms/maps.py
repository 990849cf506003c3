"""
Affine point maps g(x) = b + A x on the experimental region.
"""
import numpy as np

from core.exceptions import InvalidInput, NonAxisAlignedImage
from model_core.domain import Box, CandidateSet, as_points

SINGULAR_DET = 1e-12
SAME_MAP_TOL = 1e-10


class AffinePointMap:
    """g(x) = b + A x with nonsingular A"""

    def __init__(self, a_matrix, b_offset=None):
        a_matrix = np.array(a_matrix, dtype=float, ndmin=2)
        if a_matrix.shape[0] != a_matrix.shape[1]:
            raise InvalidInput('The matrix of a point map must be square.')
        if b_offset is None:
            b_offset = np.zeros(a_matrix.shape[0])
        b_offset = np.array(b_offset, dtype=float, ndmin=1)
        if b_offset.shape != (a_matrix.shape[0],):
            raise InvalidInput('Offset length must match the matrix size.')
        if abs(np.linalg.det(a_matrix)) <= SINGULAR_DET:
            raise InvalidInput('The matrix of a point map must be nonsingular.')
        self.a_matrix = a_matrix
        self.b_offset = b_offset
        self.a_matrix.setflags(write=False)
        self.b_offset.setflags(write=False)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    def __repr__(self):
        return f'AffinePointMap(a={self.a_matrix.tolist()}, b={self.b_offset.tolist()})'

    def __call__(self, points):
        points = as_points(points, self.dim)
        return points @ self.a_matrix.T + self.b_offset

    @property
    def dim(self):
        return self.b_offset.size

    def inverse(self):
        a_inv = np.linalg.inv(self.a_matrix)
        return AffinePointMap(a_inv, -a_inv @ self.b_offset)

    def then(self, other):
        """``other`` applied after ``self``"""
        return AffinePointMap(other.a_matrix @ self.a_matrix, other.a_matrix @ self.b_offset + other.b_offset)

    def close_to(self, other, tol=SAME_MAP_TOL):
        return (self.dim == other.dim
                and np.allclose(self.a_matrix, other.a_matrix, atol=tol, rtol=0)
                and np.allclose(self.b_offset, other.b_offset, atol=tol, rtol=0))

    @property
    def is_identity(self):
        return self.close_to(AffinePointMap.identity(self.dim))

    @property
    def is_coordinatewise(self):
        """Each image coordinate depends on exactly one input coordinate"""
        nonzero = np.abs(self.a_matrix) > 0
        return bool(np.all(nonzero.sum(axis=1) == 1) and np.all(nonzero.sum(axis=0) == 1))

    def image_region(self, region):
        """Image of a box or candidate set"""
        if isinstance(region, CandidateSet):
            return CandidateSet(self(region.points))
        if not self.is_coordinatewise:
            raise NonAxisAlignedImage(f'{self!r} does not map boxes onto boxes.')
        corners = self(region.extremal_points())
        return Box(corners.min(axis=0), corners.max(axis=0))

    def as_dict(self):
        return {'a': self.a_matrix.tolist(), 'b': self.b_offset.tolist()}


def reflection(region, coordinate):
    """x_i -> lower_i + upper_i - x_i, other coordinates fixed (``coordinate`` is 1-based)"""
    dim = region.dim
    if not 1 <= coordinate <= dim:
        raise InvalidInput(f'Coordinate {coordinate} out of range 1..{dim}.')
    i = coordinate - 1
    a_matrix = np.eye(dim)
    a_matrix[i, i] = -1.0
    b_offset = np.zeros(dim)
    b_offset[i] = region.lower[i] + region.upper[i]
    return AffinePointMap(a_matrix, b_offset)


def full_reflection(region):
    """Reflection of every coordinate, i.e. x -> lower + upper - x"""
    dim = region.dim
    return AffinePointMap(-np.eye(dim), np.asarray(region.lower) + np.asarray(region.upper))


def swap(dim, first, second):
    """Exchange of two coordinates (1-based)"""
    if not (1 <= first <= dim and 1 <= second <= dim) or first == second:
        raise InvalidInput(f'Cannot swap coordinates {first} and {second} in dimension {dim}.')
    order = list(range(dim))
    order[first - 1], order[second - 1] = order[second - 1], order[first - 1]
    return AffinePointMap(np.eye(dim)[order])


def shift_scale(dim, shift, scale):
    """x -> shift + scale * x in every coordinate"""
    if scale == 0:
        raise InvalidInput('Scale of a shift_scale map must be nonzero.')
    return AffinePointMap(scale * np.eye(dim), np.full(dim, float(shift)))


def canonical_transform(beta):
    """Shift and scale z = beta_0 + beta_1 x mapping a one-factor beta to (0, 1)"""
    beta = np.asarray(beta, dtype=float)
    if beta.size != 2:
        raise InvalidInput('The canonical transformation is defined for one factor only.')
    if beta[1] == 0:
        raise InvalidInput('The canonical transformation needs a nonzero slope.')
    return shift_scale(1, beta[0], beta[1])


def parse_named_map(name, region):
    """Build a map from ``identity``, ``reflect:i``, ``reflect_all``, ``swap:i,j`` or ``shift_scale:a,c``"""
    head, _, tail = str(name).strip().partition(':')
    args = [item.strip() for item in tail.split(',')] if tail else []
    try:
        if head == 'identity' and not args:
            return AffinePointMap.identity(region.dim)
        if head == 'reflect' and len(args) == 1:
            return reflection(region, int(args[0]))
        if head == 'reflect_all' and not args:
            return full_reflection(region)
        if head == 'swap' and len(args) == 2:
            return swap(region.dim, int(args[0]), int(args[1]))
        if head == 'shift_scale' and len(args) == 2:
            return shift_scale(region.dim, float(args[0]), float(args[1]))
    except ValueError as exc:
        raise InvalidInput(f'Bad arguments in transform {name!r}: {exc}')
    raise InvalidInput(f'Unknown transform {name!r}.')
