"""Exception hierarchy shared by all misoid modules."""


class MisoidError(Exception):
    """Base class for all errors raised by misoid."""


class DimensionError(MisoidError):
    """Vector/matrix shapes do not line up."""


class ParameterError(MisoidError):
    """A scalar parameter is outside its admissible range."""


class SingularMatrixError(MisoidError):
    """A matrix that must be inverted is (numerically) singular."""


class NumericError(MisoidError):
    """A non-finite value or impossible division showed up mid-update."""


class ProtocolError(MisoidError):
    """A fusion round received a malformed set of node messages."""
