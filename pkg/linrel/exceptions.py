"""
Error taxonomy shared by the library, the CLI and the experiment driver.

Every error carries the CLI exit code it maps to: 1 for malformed input,
2 for a violated precondition, 3 for a failed conclusion check.
"""

import warnings


class LinrelError(Exception):
    """Base class for all library errors"""
    exit_code = 2


class InvalidMatrix(LinrelError):
    """Matrix is non-finite, ragged, unparsable or has the wrong field"""
    exit_code = 1


class FormatError(LinrelError):
    """Malformed header, trailer or config line"""
    exit_code = 1


class DimensionMismatch(LinrelError):
    pass


class InvalidArgument(LinrelError):
    pass


class KindViolation(LinrelError):
    """Matrix does not have the symmetry its declared kind requires"""
    pass


class DegenerateForm(LinrelError):
    pass


class InvalidScalar(LinrelError):
    pass


class IllDefinedForm(LinrelError):
    """Multivalued part not contained in the right annihilator of the domain"""
    pass


class NotIsotropic(LinrelError):
    pass


class NotSkewAdjoint(LinrelError):
    pass


class IndexNonzero(LinrelError):
    pass


class SplitFailure(LinrelError):
    pass


class PreconditionViolated(LinrelError):
    pass


class NotNested(LinrelError):
    pass


class SingularRestriction(LinrelError):
    pass


class RelativeBoundUnverified(LinrelError):
    pass


class NotUnitary(LinrelError):
    pass


class ParityMismatch(LinrelError):
    pass


class ConclusionFailure(LinrelError):
    """A certified hypothesis was followed by a failed conclusion"""
    exit_code = 3


class ToleranceWarning(UserWarning):
    """Eigenvalue fell inside the tolerance band; the decision is left open"""
    pass


def warn_tolerance(message: str):
    warnings.warn(message, ToleranceWarning, stacklevel=3)
