"""Exception and warning types shared across the package."""


class KazlabError(Exception):
    """Base class for every error raised by this package."""

    code = "COMPUTATION"


class DomainError(KazlabError):
    """Operation applied to a measure living on the wrong group dual."""


class NotProbabilityError(KazlabError):
    """A probability measure was required."""


class ConvolutionError(KazlabError):
    """The requested convolution cannot be represented exactly."""


class ResolutionError(KazlabError):
    """A grid is too coarse for the requested construction."""


class WeightScheduleError(KazlabError):
    """Weights for a two-point convolution product are not admissible."""


class HorizonError(KazlabError):
    """A sequence was asked for more terms than its horizon."""


class PrecisionError(KazlabError):
    """Fixed-point representation cannot carry the requested products exactly."""


class ConsistencyError(KazlabError):
    """An inequality that holds as a theorem failed numerically: this is a bug."""

    code = "CONSISTENCY"


class WitnessSearchError(KazlabError):
    """No witness was found below the search bound."""


class AmbiguousClusterError(KazlabError):
    """Eigenvalues sit too close to the clustering tolerance to be classified."""


class DecompositionError(KazlabError):
    """A block decomposition does not match its representation."""


class RepresentationError(KazlabError):
    """Generators are not unitary, do not commute, or have mismatched shapes."""


class DimensionError(KazlabError):
    """A tensor product would exceed the configured dimension cap."""


class ElementarySpecError(KazlabError):
    """An elementary tensor specification is malformed."""


class SupportError(KazlabError):
    """A window function leaves the sampling grid or crosses a forbidden point."""


class SchemaError(KazlabError):
    """Scenario or input file does not match its schema."""

    code = "SCHEMA"


class NyquistWarning(UserWarning):
    """A density coefficient was requested above the grid Nyquist frequency."""
