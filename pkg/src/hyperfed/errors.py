"""Exception types raised across the package."""


class HyperfedError(Exception):
    """Base class for all package errors."""


class ValidationError(HyperfedError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid hypergraph")


class EmptyGraph(HyperfedError, ValueError):
    pass


class DimensionMismatch(HyperfedError, ValueError):
    pass


class TooLarge(HyperfedError, ValueError):
    pass


class NoLabels(HyperfedError, ValueError):
    pass


class RatioOverflow(HyperfedError, ValueError):
    pass


class EmptyMask(HyperfedError, ValueError):
    pass


class ShapeMismatch(HyperfedError, ValueError):
    pass


# federation protocol

class ProtocolError(HyperfedError):
    pass


class MissingLayer(ProtocolError):
    pass


class LayerSkew(ProtocolError):
    pass


class IncompleteRound(ProtocolError):
    pass


class CountMismatch(ProtocolError):
    pass


class DuplicateUpload(ProtocolError):
    pass


# wire codec

class MalformedFrame(HyperfedError, ValueError):
    pass


class UnknownTag(MalformedFrame):
    pass


class LengthMismatch(MalformedFrame):
    pass


class ParseError(HyperfedError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
