"""
Optimal weights on a fixed support.

Multiplicative updates
    D:    w <- w * psi(x) / p
    IMSE: w <- w * (psi(x) / trace(V M^-1))^(1/2), renormalized
stop once the sensitivity on the support is below its bound and the weights
have settled. A constrained SLSQP polish runs when the multiplicative phase
runs out of iterations. Every result is certified by the equivalence check
restricted to the support.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, minimize

from core.conf import optdesign_setting
from core.exceptions import InvalidInput, NoConvergence, SingularInformation
from criteria.equivalence import Certificate
from model_core.domain import Design, as_points, check_points_in_region
from model_core.information import check_parameter, intensity_values, weight_matrix_v

logger = logging.getLogger(__name__)

MONOTONE_CHECK_EVERY = 100
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class OptimizeOptions:
    max_iters: int = 10000
    weight_tol: float = 1e-10
    sensitivity_tol: float = 1e-6
    prune_threshold: float = 1e-8

    def __post_init__(self):
        for name in ('max_iters', 'weight_tol', 'sensitivity_tol', 'prune_threshold'):
            if not getattr(self, name) > 0:
                raise InvalidInput(f'{name} must be positive.')

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'max_iters': optdesign_setting('MAX_ITERS'),
            'weight_tol': optdesign_setting('WEIGHT_TOL'),
            'sensitivity_tol': optdesign_setting('SENSITIVITY_TOL'),
            'prune_threshold': optdesign_setting('PRUNE_THRESHOLD'),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    design: Design
    criterion_value: float
    certificate: Certificate
    iterations: int
    method: str = 'multiplicative'

    def as_dict(self):
        return {
            'design': self.design.as_dict(),
            'criterion_value': self.criterion_value,
            'certificate': self.certificate.as_dict(),
            'iterations': self.iterations,
        }


class _WeightProblem:
    """Criterion, sensitivities and gradient as functions of the weight vector"""

    def __init__(self, model, beta, crit, support):
        self.p = model.p
        self.is_d = crit.is_d
        self.values, self.lam = intensity_values(model, support, beta)
        if np.linalg.matrix_rank(self.values) < self.p:
            raise SingularInformation(
                f'{support.shape[0]} support points do not span the {self.p} regression functions.')
        self.v = None if crit.is_d else weight_matrix_v(model, beta, crit.nu)

    def information(self, w):
        return self.values.T @ ((w * self.lam)[:, None] * self.values)

    def evaluate(self, w):
        """(criterion value, sensitivities, bound)"""
        m = self.information(w)
        try:
            m_inv = np.linalg.inv(m)
        except np.linalg.LinAlgError:
            return np.inf, None, None
        if self.is_d:
            sens = self.lam * np.einsum('ij,jk,ik->i', self.values, m_inv, self.values)
            sign, logdet = np.linalg.slogdet(m)
            value = np.inf if sign <= 0 else -logdet
            return value, sens, float(self.p)
        kernel = m_inv @ self.v @ m_inv
        sens = self.lam * np.einsum('ij,jk,ik->i', self.values, kernel, self.values)
        bound = float(np.trace(self.v @ m_inv))
        return bound, sens, bound

    def update(self, w, sens, bound):
        """D: w psi/p. IMSE: w sqrt(psi/bound), same fixed points and exact in one step on p points"""
        if self.is_d:
            new = w * sens / self.p
        else:
            new = w * np.sqrt(np.maximum(sens, 0.0) / bound)
        return new / new.sum()

    def report_value(self, w):
        """det(M)^-1 for D, trace(V M^-1) for IMSE"""
        value, _, _ = self.evaluate(w)
        return float(np.exp(value)) if self.is_d else float(value)


def _certificate(problem, support, w, tol):
    _, sens, bound = problem.evaluate(w)
    if sens is None:
        return Certificate(np.inf, np.nan, (), False, support.shape[0])
    worst = int(np.argmax(sens))
    return Certificate(
        max_sensitivity=float(sens[worst]),
        bound=bound,
        argmax=tuple(support[worst].tolist()),
        passed=bool(sens[worst] <= bound * (1.0 + tol)),
        points_checked=support.shape[0],
    )


def _polish(problem, w):
    """SLSQP on the simplex starting from the multiplicative weights"""
    def objective(x):
        value, _, _ = problem.evaluate(np.maximum(x, 0.0))
        return 1e10 if not np.isfinite(value) else value

    def gradient(x):
        _, sens, _ = problem.evaluate(np.maximum(x, 0.0))
        return np.zeros_like(x) if sens is None else -sens

    m = w.size
    result = minimize(
        objective, w, jac=gradient, method='SLSQP',
        bounds=Bounds(np.zeros(m), np.ones(m)),
        constraints=[LinearConstraint(np.ones((1, m)), 1.0, 1.0)],
        options={'maxiter': 500, 'ftol': 1e-15},
    )
    polished = np.maximum(result.x, 0.0)
    return polished / polished.sum()


def optimal_weights_fixed_support(model, beta, crit, support, opts=None):
    """Locally optimal weights on the given support points"""
    opts = opts or OptimizeOptions.from_settings()
    beta = check_parameter(model, beta)
    support = check_points_in_region(model, as_points(support, model.dim_x), what='support point')
    problem = _WeightProblem(model, beta, crit, support)

    w = np.full(support.shape[0], 1.0 / support.shape[0])
    checkpoint, _, _ = problem.evaluate(w)
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iters + 1):
        value, sens, bound = problem.evaluate(w)
        if sens is None:
            break
        new = problem.update(w, sens, bound)
        settled = np.abs(new - w).max() <= opts.weight_tol
        certified = sens.max() <= bound * (1.0 + opts.sensitivity_tol)
        w = new
        if iterations % MONOTONE_CHECK_EVERY == 0:
            if value > checkpoint + MONOTONE_SLACK * max(1.0, abs(checkpoint)):
                logger.warning('Criterion increased from %.15g to %.15g at iteration %d',
                               checkpoint, value, iterations)
            checkpoint = value
        if settled and certified:
            converged = True
            break

    method = 'multiplicative'
    if not converged:
        logger.info('Multiplicative phase stopped after %d iterations; polishing with SLSQP', iterations)
        w = _polish(problem, w)
        method = 'multiplicative+slsqp'

    certificate = _certificate(problem, support, w, opts.sensitivity_tol)
    pruned = np.where(w > opts.prune_threshold, w, 0.0)
    pruned = pruned / pruned.sum()
    pruned_certificate = _certificate(problem, support, pruned, opts.sensitivity_tol)
    if pruned_certificate.passed or not certificate.passed:
        w, certificate = pruned, pruned_certificate
    if not certificate.passed:
        raise NoConvergence(
            f'Weights not certified after {iterations} iterations '
            f'(max sensitivity {certificate.max_sensitivity:.10g}, bound {certificate.bound:.10g}).',
            gap=certificate.gap, iterations=iterations)

    design = Design.normalized(support, w).canonical()
    return OptimizationResult(design, problem.report_value(w), certificate, iterations, method)
