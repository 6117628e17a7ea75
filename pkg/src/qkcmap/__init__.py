"""Numerical verification engine for the HK/QK correspondence and the one-loop deformed c-map."""

__version__ = "0.1.0"

from .errors import (
    ClosureError,
    DomainError,
    EigenFailure,
    GeometryError,
    InsufficientSamples,
    SingularMetric,
    TwistSingularity,
    ValidationError,
)
from .fields import ChartMap, Point, TensorFieldSpec

__all__ = [
    "__version__",
    "ChartMap",
    "ClosureError",
    "DomainError",
    "EigenFailure",
    "GeometryError",
    "InsufficientSamples",
    "Point",
    "SingularMetric",
    "TensorFieldSpec",
    "TwistSingularity",
    "ValidationError",
]
