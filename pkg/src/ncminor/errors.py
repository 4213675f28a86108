"""Exception hierarchy shared by every module."""


class NCMinorError(Exception):
    """Base class for all library errors."""


class ParseError(NCMinorError):
    """Input text does not describe a valid network or graph."""


class MalformedInputError(ParseError):
    pass


class UnknownNodeError(ParseError):
    pass


class SelfLoopError(ParseError):
    pass


class SourceAsReceiverError(ParseError):
    pass


class PreconditionError(NCMinorError):
    """An operation was called on an input outside its domain."""


class NotTwoMinimalError(PreconditionError):
    def __init__(self, condition: str):
        super().__init__(f"network is not 2-minimal: {condition}")
        self.condition = condition


class CyclicNetworkError(PreconditionError):
    pass


class RateTooLowError(PreconditionError):
    pass


class UnreachableNodeError(PreconditionError):
    pass


class SizeBoundError(NCMinorError):
    """An exact/exhaustive routine was asked to handle an input above its bound."""
