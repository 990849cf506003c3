"""
Finite transformation groups acting on the experimental region.

Group elements are identified by their action on a probe set (region
vertices plus a few seeded interior points), not by matrix equality.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from core.conf import optdesign_setting
from core.exceptions import (
    CandidateSetNotClosed, GroupTooLarge, InvalidInput, NonAxisAlignedImage,
    NotRegionPreserving, RescaleUndefined, WeightSumViolation,
)
from model_core.domain import Design, as_points, check_points_in_region, mixture
from model_core.information import sample_parameters
from transforms.equivariance import (
    compose, design_image, identity_pair, inverse_pair, param_transform, pushforward_measure,
)

logger = logging.getLogger(__name__)

PROBE_INTERIOR_POINTS = 8
ACTION_TOL = 1e-10
MATCH_TOL = 1e-9
PARAM_TOL = 1e-9
VERIFICATION_PARAMETERS = 20


@dataclass(frozen=True, eq=False)
class TransformGroup:
    elements: tuple
    probe: np.ndarray

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def param_mode(self):
        return self.elements[0].param_mode

    def index_of(self, pair):
        """Position of the element acting like ``pair`` on the probe set, or None"""
        image = pair.g(self.probe)
        for i, element in enumerate(self.elements):
            if np.allclose(element.g(self.probe), image, atol=ACTION_TOL, rtol=0):
                return i
        return None


@dataclass(frozen=True)
class OrbitPartition:
    orbits: tuple
    points: np.ndarray

    def __len__(self):
        return len(self.orbits)

    @property
    def sizes(self):
        return [len(orbit) for orbit in self.orbits]

    def orbit_points(self, k):
        return self.points[list(self.orbits[k])]


def probe_points(model):
    rng = np.random.default_rng(optdesign_setting('SEED'))
    region = model.region
    return np.vstack([region.extremal_points(), region.interior_sample(PROBE_INTERIOR_POINTS, rng)])


def _match_indices(images, points, tol=MATCH_TOL):
    """Index in ``points`` of each image, -1 where there is none"""
    gaps = np.abs(images[:, None, :] - points[None, :, :]).max(axis=2)
    nearest = gaps.argmin(axis=1)
    return np.where(gaps[np.arange(images.shape[0]), nearest] <= tol, nearest, -1)


def is_region_preserving(model, g):
    """g maps the extremal points of the region onto themselves"""
    vertices = model.region.extremal_points()
    matches = _match_indices(g(vertices), vertices, ACTION_TOL)
    return bool(np.all(matches >= 0) and np.unique(matches).size == matches.size)


def generate_group(model, generators, max_size=None):
    """Closure of ``generators`` under composition, identity included"""
    max_size = max_size or optdesign_setting('MAX_GROUP_SIZE')
    generators = list(generators)
    if not generators:
        raise InvalidInput('A group needs at least one generator.')
    modes = {pair.param_mode for pair in generators}
    if len(modes) > 1:
        raise InvalidInput('All generators must use the same parameter mode.')
    for pair in generators:
        if not is_region_preserving(model, pair.g):
            raise NotRegionPreserving(f'{pair.g!r} does not map the region onto itself.')

    group = TransformGroup((identity_pair(model, modes.pop()),), probe_points(model))
    frontier = list(group.elements)
    while frontier:
        next_frontier = []
        for element in frontier:
            for generator in generators:
                candidate = compose(element, generator)
                if group.index_of(candidate) is not None:
                    continue
                group = TransformGroup(group.elements + (candidate,), group.probe)
                if len(group) > max_size:
                    raise GroupTooLarge(f'Group closure exceeds {max_size} elements.')
                next_frontier.append(candidate)
        frontier = next_frontier
    logger.info('Generated a group of size %d from %d generators', len(group), len(generators))
    verify_group(model, group)
    return group


def verify_group(model, group, n_parameters=VERIFICATION_PARAMETERS):
    """Check closure and inverses on points and on random parameters"""
    rng = np.random.default_rng(optdesign_setting('SEED'))
    betas = sample_parameters(model, n_parameters, rng)
    for first in group:
        if group.index_of(inverse_pair(first)) is None:
            raise InvalidInput('Group is missing an inverse element.')
        for second in group:
            product = compose(first, second)
            index = group.index_of(product)
            if index is None:
                raise InvalidInput('Group is not closed under composition.')
            element = group.elements[index]
            for beta in betas:
                try:
                    left = param_transform(product, beta)
                    right = param_transform(element, beta)
                except RescaleUndefined:
                    continue
                if not np.allclose(left, right, atol=PARAM_TOL, rtol=PARAM_TOL):
                    raise InvalidInput('Parameter maps of the group do not compose consistently.')
    return True


def orbits(group, candidates):
    """Partition candidate points into orbits of the group"""
    points = as_points(candidates, group.probe.shape[1])
    n = points.shape[0]
    rows, cols = [], []
    for element in group:
        matches = _match_indices(element.g(points), points)
        if np.any(matches < 0):
            missing = element.g(points)[matches < 0].tolist()
            raise CandidateSetNotClosed(f'Candidate images missing from the set: {missing}', missing=missing)
        rows.extend(range(n))
        cols.extend(matches.tolist())
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups = {}
    for index, label in enumerate(labels):
        groups.setdefault(label, []).append(index)
    ordered = sorted(groups.values(), key=lambda members: members[0])
    return OrbitPartition(tuple(tuple(members) for members in ordered), points)


def symmetrize(xi, group, model=None):
    """Average of the images xi^g over the group"""
    images = [design_image(xi, pair) for pair in group]
    if model is not None:
        for image in images:
            check_points_in_region(model, image.support, what='symmetrized point')
    return mixture(images)


def is_invariant_design(xi, group, tol=1e-12):
    return symmetrize(xi, group).same_measure(xi, tol)


def invariant_design(partition, orbit_weights):
    """Design putting ``orbit_weights[k]`` on every point of orbit k"""
    orbit_weights = np.asarray(orbit_weights, dtype=float)
    if orbit_weights.size != len(partition):
        raise WeightSumViolation(f'Expected {len(partition)} orbit weights, got {orbit_weights.size}.')
    if np.any(orbit_weights < 0):
        raise WeightSumViolation('Orbit weights must be nonnegative.')
    total = float(np.dot(partition.sizes, orbit_weights))
    if abs(total - 1.0) > 1e-12:
        raise WeightSumViolation(f'Orbit weights give total mass {total:.15g}, not 1.')
    support, weights = [], []
    for k, weight in enumerate(orbit_weights):
        if weight > 0:
            support.extend(partition.orbit_points(k))
            weights.extend([weight] * partition.sizes[k])
    weights = np.asarray(weights)
    return Design(np.asarray(support), weights / weights.sum()).canonical()


def orbit_weights(xi, partition):
    """Per-point weights of ``xi`` on each orbit"""
    return [xi.weights_on(partition.orbit_points(k)) for k in range(len(partition))]


def check_invariant_criterion(group, crit, beta, nu=None):
    """True iff every group element fixes beta (and nu for IMSE)"""
    beta = np.asarray(beta, dtype=float)
    nu = nu if nu is not None else getattr(crit, 'nu', None)
    for pair in group:
        try:
            mapped = param_transform(pair, beta)
        except RescaleUndefined:
            return False
        if not np.allclose(mapped, beta, atol=PARAM_TOL, rtol=0):
            return False
        if not crit.is_d:
            try:
                image = pushforward_measure(nu, pair.g)
            except NonAxisAlignedImage:
                return False
            if not image.same_measure(nu):
                return False
    return True
