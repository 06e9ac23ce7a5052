"""Exception types shared across the toolkit."""


class CertificateError(ValueError):
    """Base class for all certificate computation failures."""


class ParameterError(CertificateError):
    """A parameter lies outside its admissible range."""


class InvalidInputError(CertificateError):
    """Structurally invalid input data (counts, assignments, dimensions)."""


class LossCapError(CertificateError):
    """An observed loss exceeds the declared supremum ``c_sup``."""


class AlphaValidityError(ParameterError):
    """``alpha`` exceeds the admissible ceiling for the given (n, K, gamma)."""


class RangeError(ParameterError):
    """A verification check was requested outside the admissible range of its inequality."""


class CsvFormatError(InvalidInputError):
    """Malformed CSV input; the message carries the file and line number."""
