"""Exception types shared across the package."""


class InvalidDistribution(ValueError):
    pass


class ZeroMeanDegree(InvalidDistribution):
    pass


class NoGiantComponentPossible(ValueError):
    """Raised when <p^2> <= <p>: no coverage level makes the event percolate."""


class InfeasibleSequence(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InvalidPublisher(ValueError):
    pass


class TooLarge(ValueError):
    pass


class ConfigError(ValueError):
    pass
