"""Exception hierarchy shared by every module."""


class RDPairError(Exception):
    """Base class for all library errors."""


class UnknownFixture(RDPairError):
    pass


class ParameterOutOfRange(RDPairError):
    pass


class MalformedKey(RDPairError):
    pass


class EmbeddingInvalid(RDPairError):
    pass


class ModelMismatch(RDPairError):
    pass


class ModeMismatch(RDPairError):
    pass


class NegativeEntry(RDPairError):
    pass


class NotEnumerated(RDPairError):
    pass


class SupportNotEnumerated(NotEnumerated):
    pass


class WindowTooSmall(RDPairError):
    pass


class BallInsufficient(RDPairError):
    pass


class NotNormal(RDPairError):
    pass


class MissingRho(RDPairError):
    pass


class CapExceeded(RDPairError):
    """A computation hit a configured size cap.

    ``completed`` is the last fully completed radius / power, so callers can
    keep partial results.
    """

    def __init__(self, message, completed=None):
        super().__init__(message)
        self.completed = completed


class BallTooLarge(CapExceeded):
    pass


class GraphTooLarge(CapExceeded):
    pass


class PowerOverflow(CapExceeded):
    pass


class TruncationOverflow(RDPairError):
    """An operator application would leave the enumerated part of a graph."""
