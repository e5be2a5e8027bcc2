"""Exception types raised by the genus engine."""


class GeneraError(Exception):
    """Base class for every error raised by this package"""


class ConfigurationError(GeneraError):
    """config.yaml or an environment override holds an unusable value"""


class ResourceLimitExceeded(GeneraError):
    """Requested dimension is above the configured max_n"""


class NonSymmetricInput(GeneraError):
    """A polynomial handed to the symmetric reduction is not symmetric"""


class NonHomogeneous(GeneraError):
    """A polynomial handed to the symmetric reduction mixes degrees"""


class ReductionDidNotTerminate(GeneraError):
    """Leading-term elimination exceeded its iteration cap"""


class WeightMismatch(GeneraError):
    """Chern combination weight differs from the manifold dimension"""


class NotDecidable(GeneraError):
    """The question cannot be answered from the data the model carries"""


class IncompleteChernData(GeneraError):
    """Raw Chern data lacks a Chern number an evaluation needs"""


class ModelSpecError(GeneraError):
    """A manifold model specification string could not be parsed"""
