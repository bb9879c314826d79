"""Exception hierarchy shared by every module.

The CLI maps :class:`BanzhafError` subclasses to exit code 1 and prints the
message verbatim.
"""


class BanzhafError(Exception):
    """Base class for domain errors."""


class ArgumentError(BanzhafError, ValueError):
    pass


class CapacityError(BanzhafError):
    """Raised when an exhaustive or DP computation exceeds its size cap."""


class PrecisionError(BanzhafError):
    """A weight is not integral after scaling, so conversion would have to round."""


class ModelParseError(BanzhafError):
    pass


class DataParseError(BanzhafError):
    pass


class TrainingError(BanzhafError):
    pass
