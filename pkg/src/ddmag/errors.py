"""Exception types shared across the ddmag package."""


class DdmagError(Exception):
    """Base class for all ddmag errors."""


class GeometryOverlap(DdmagError):
    """Two region rectangles intersect with positive area."""


class MeshResolutionError(DdmagError):
    """Requested edge length is too coarse for the geometry."""


class ParseError(DdmagError):
    """Malformed input file (CSV or config)."""


class ValidationError(DdmagError):
    """Data violates a declared invariant (e.g. non-monotone BH curve)."""


class NonPositiveWeight(DdmagError):
    """A reluctivity-like coefficient was zero or negative."""


class NoConvergence(DdmagError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NewtonDiverged(DdmagError):
    """Newton line search could not reduce the residual."""


class MeshMismatch(DdmagError):
    """Two solutions do not live on the same mesh."""


class EmptyRegion(DdmagError):
    """An integral was requested over a region with no elements."""


class ReferenceDegenerate(DdmagError):
    """Reference quantity is zero, relative error undefined."""


class DegenerateFit(DdmagError):
    """Log-log slope fit impossible (identical abscissae or too few points)."""


class ConfigError(DdmagError):
    """Invalid run configuration."""
