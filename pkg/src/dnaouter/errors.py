"""Exception hierarchy shared across the package."""


class OuterChannelError(Exception):
    """Base class for every error raised by :mod:`dnaouter`."""


class ParamError(OuterChannelError, ValueError):
    pass


class SumNotOne(ParamError):
    pass


class ConstraintViolated(ParamError):
    pass


class BadLength(ParamError):
    pass


class BadArgs(ParamError):
    pass


class DimensionMismatch(OuterChannelError, ValueError):
    pass


class OutOfRange(OuterChannelError, ValueError):
    pass


class ParseError(OuterChannelError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegreeMismatch(ParseError):
    pass


class ConflictingPin(OuterChannelError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"position {position} already pinned with different values")


class NotUnique(OuterChannelError):
    pass


class Inconsistent(OuterChannelError):
    pass


class TooLarge(OuterChannelError, ValueError):
    pass


class ConfigError(OuterChannelError, ValueError):
    pass
