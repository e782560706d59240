"""Exception hierarchy shared by all twistkit modules."""


class TwistkitError(ValueError):
    """Base class for every error raised on invalid input."""


class DimensionError(TwistkitError):
    pass


class CapExceededError(TwistkitError):
    """A configured size cap (dimension, degree, set size) was exceeded."""


class NotSelfAdjointError(TwistkitError):
    pass


class NormBoundError(TwistkitError):
    pass


class NotATwistError(TwistkitError):
    pass


class YBEViolationError(TwistkitError):
    pass


class StandardnessError(TwistkitError):
    pass


class ModularConditionError(TwistkitError):
    pass


class CompatibilityError(TwistkitError):
    pass


class KernelNotPreservedError(TwistkitError):
    pass


class LevelCapError(TwistkitError):
    pass


class MalformedTableError(TwistkitError):
    pass


class ParseError(TwistkitError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    pass


class PoleError(TwistkitError):
    """Evaluation hit a division pole or overflowed."""


class InputFormatError(TwistkitError):
    pass
