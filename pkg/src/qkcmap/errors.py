"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by qkcmap."""


class DomainError(GeometryError):
    """A point lies outside the chart domain of a field or map."""


class SingularMetric(GeometryError):
    """The metric is (numerically) degenerate at the evaluation point."""


class EigenFailure(GeometryError):
    pass


class TwistSingularity(GeometryError):
    """A twist Hamiltonian (f_Z or f_H) vanishes at the evaluation point."""


class ValidationError(GeometryError):
    pass


class ClosureError(GeometryError):
    """Vector fields do not close under the Lie bracket."""


class InsufficientSamples(GeometryError):
    pass
