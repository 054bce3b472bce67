"""Exception hierarchy shared by all sbo modules."""


class SboError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SboError):
    """Lengths of keywords, bids, clicks or model parameters disagree."""


class ValidationError(SboError):
    """Input data violates a structural invariant (bad pmf, bad weight, ...)."""


class InvalidWeightError(ValidationError):
    """A keyword weight is zero or negative."""


class ModelMismatchError(SboError):
    """An evaluator or optimizer was called with the wrong click model."""


class ParameterError(SboError):
    """An algorithm parameter (epsilon, n, c, ...) is out of its domain."""


class SizeError(SboError):
    """The instance exceeds a configured size cap."""


class OracleTooLargeError(SizeError):
    """Joint support too large for exact enumeration; use the PTAS instead."""
