"""Exception hierarchy shared by every hellygrid module."""


class HellyGridError(Exception):
    """Base class for all library errors."""


class EmptyRangeError(HellyGridError, ValueError):
    pass


class InvertedRangeError(HellyGridError, ValueError):
    pass


class SequenceParseError(HellyGridError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MonotonicityError(SequenceParseError):
    """Elements are not strictly increasing.

    ``index`` is the zero-based position of the offending element and
    ``line`` its line number when the data came from a file.
    """

    def __init__(self, message, index, line=None):
        super().__init__(message, line)
        self.index = index


class ResourceError(HellyGridError):
    """A configured size cap would be exceeded."""


class DegenerateHullError(HellyGridError, ValueError):
    pass


class RunMismatchError(HellyGridError, ValueError):
    """A RatioRun does not describe a valid window of the given sequence."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class CoverageError(HellyGridError):
    """A query falls outside the materialized bounds of a grid."""


class CertificateError(HellyGridError):
    pass


class CertificateFormatError(CertificateError, ValueError):
    pass


class UnknownGridKindError(CertificateError):
    pass


class VersionMismatchError(CertificateError):
    pass
