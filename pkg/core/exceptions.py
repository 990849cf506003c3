"""Error hierarchy shared by every optdesign app."""


class OptDesignError(Exception):
    """Base class for design computation errors"""

    #: exit code used by the ``optdesign`` management command
    exit_code = 1

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def as_dict(self):
        """JSON-friendly description"""
        return {'error': type(self).__name__, 'detail': str(self)}


class InvalidInput(OptDesignError):
    """Malformed model, design, criterion or transform input"""


class OutOfRegion(OptDesignError):
    """Covariate point outside the experimental region"""

    def __init__(self, message, points=None, **context):
        super().__init__(message, points=points, **context)
        self.points = points or []


class NonpositiveLinearComponent(OptDesignError):
    """Linear predictor f(x)'beta is not positive under the gamma intensity"""

    def __init__(self, message, index=None, point=None, **context):
        super().__init__(message, index=index, point=point, **context)
        self.index = index
        self.point = point


class SingularInformation(OptDesignError):
    """Information matrix is not positive definite"""

    exit_code = 2


class NotEquivariant(OptDesignError):
    """Basis does not transform linearly under the point map"""

    def __init__(self, message, residual=None, **context):
        super().__init__(message, residual=residual, **context)
        self.residual = residual


class DegenerateSample(OptDesignError):
    """No nonsingular basis matrix could be selected from region points"""


class RescaleUndefined(OptDesignError):
    """Intercept of the linearly mapped parameter is not positive"""


class NonAxisAlignedImage(OptDesignError):
    """Uniform measure pushed through a map that is not coordinatewise"""


class GroupTooLarge(OptDesignError):
    """Group closure exceeded the configured size"""


class NotRegionPreserving(OptDesignError):
    """Group generator does not map the region onto itself"""


class CandidateSetNotClosed(OptDesignError):
    """Candidate set is not closed under the group action"""

    def __init__(self, message, missing=None, **context):
        super().__init__(message, missing=missing, **context)
        self.missing = missing or []


class WeightSumViolation(OptDesignError):
    """Orbit weights do not yield a probability measure"""


class NoConvergence(OptDesignError):
    """Weight optimization stopped before certification"""

    exit_code = 2

    def __init__(self, message, gap=None, iterations=None, **context):
        super().__init__(message, gap=gap, iterations=iterations, **context)
        self.gap = gap
        self.iterations = iterations


class EquivalenceCheckFailed(OptDesignError):
    """Sensitivity exceeds its bound somewhere on the region"""

    exit_code = 2

    def __init__(self, message, max_sensitivity=None, bound=None, location=None, **context):
        super().__init__(message, max_sensitivity=max_sensitivity, bound=bound,
                         location=location, **context)
        self.max_sensitivity = max_sensitivity
        self.bound = bound
        self.location = location


class OutOfParameterRegion(OptDesignError):
    """Parameter outside the domain of a closed form"""


class WrongModelShape(OptDesignError):
    """Closed form requested for a model of the wrong shape"""


class EmptyGrid(OptDesignError):
    """Parameter grid for a maximin search is empty"""
