"""Exception hierarchy shared by all modules."""


class MixIdError(ValueError):
    """Base class for every error raised by this package."""


class InvalidBandwidthError(MixIdError):
    pass


class DegenerateColumnError(MixIdError):
    """A column carries no spread, so no kernel width can be derived from it."""

    def __init__(self, message, variable=None):
        super().__init__(message)
        self.variable = variable


class DegenerateSpectrumError(MixIdError):
    pass


class ShapeError(MixIdError):
    pass


class SampleTooSmallError(MixIdError):
    pass


class ConfigurationError(MixIdError):
    pass


class EmptyClusterError(MixIdError):
    pass


class ParseError(MixIdError):
    """Malformed CSV input; carries the 1-based row and column when known."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class AlignmentError(MixIdError):
    pass
