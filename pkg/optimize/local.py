import logging
from dataclasses import replace

import numpy as np

from core.conf import optdesign_setting
from core.exceptions import EquivalenceCheckFailed
from criteria.equivalence import equivalence_check
from model_core.domain import Box, as_points
from model_core.information import basis_matrix, check_parameter

from .weights import optimal_weights_fixed_support

logger = logging.getLogger(__name__)

FALLBACK_GRID_POINTS = 11


def default_candidates(model):
    """Extremal points, extended by a coarse grid when they cannot carry a nonsingular design"""
    candidates = model.region.extremal_points()
    if np.linalg.matrix_rank(basis_matrix(model, candidates)) < model.p and isinstance(model.region, Box):
        grid = model.region.grid(FALLBACK_GRID_POINTS, cap=optdesign_setting('CHECK_GRID_CAP'))
        candidates = _append_new(candidates, grid)
    return candidates


def _append_new(candidates, points, tol=1e-9):
    for point in as_points(points, candidates.shape[1]):
        if np.abs(candidates - point).max(axis=1).min() > tol:
            candidates = np.vstack([candidates, point])
    return candidates


def local_opt_design(model, beta, crit, candidates=None, opts=None, check_points=None):
    """Locally optimal design certified on the whole region.

    Weights are optimized on the candidate points; while the region-wide
    equivalence check fails, its worst point joins the candidates.
    """
    beta = check_parameter(model, beta)
    candidates = default_candidates(model) if candidates is None else as_points(candidates, model.dim_x)
    max_augmentations = optdesign_setting('MAX_AUGMENTATIONS')
    certificate = None
    for augmentation in range(max_augmentations + 1):
        result = optimal_weights_fixed_support(model, beta, crit, candidates, opts)
        certificate = equivalence_check(
            model, result.design, beta, crit, points=check_points,
            tol=opts.sensitivity_tol if opts else None)
        if certificate.passed:
            if augmentation:
                logger.info('Certified after %d candidate augmentations', augmentation)
            return replace(result, certificate=certificate)
        worst = np.asarray(certificate.argmax, dtype=float)
        if np.abs(candidates - worst).max(axis=1).min() <= 1e-9:
            break
        logger.debug('Adding candidate %s (sensitivity %.10g > %.10g)',
                     certificate.argmax, certificate.max_sensitivity, certificate.bound)
        candidates = np.vstack([candidates, worst])
    raise EquivalenceCheckFailed(
        f'Equivalence check fails at {list(certificate.argmax)}: '
        f'sensitivity {certificate.max_sensitivity:.10g} exceeds {certificate.bound:.10g}.',
        max_sensitivity=certificate.max_sensitivity, bound=certificate.bound,
        location=list(certificate.argmax))
