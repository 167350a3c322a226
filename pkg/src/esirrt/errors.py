"""Exception types shared across the package."""


class EsirrtError(Exception):
    """Base class for all package errors."""


class ParseError(EsirrtError):
    """Malformed input file (PGM map, config)."""


class EmptyFreeSpace(EsirrtError):
    """Operation requires at least one free cell."""


class InvalidEndpoint(EsirrtError):
    """Start or goal is occupied, out of bounds, or degenerate."""


class DisconnectedGraph(EsirrtError):
    """Goal not reachable from start in the node graph/tree."""

    def __init__(self, message, components=None):
        super().__init__(message)
        self.components = components


class InvalidParameter(EsirrtError):
    """Parameter outside its valid range."""


class InvalidPath(EsirrtError):
    """Path violates a structural precondition."""


class InvalidRegion(EsirrtError):
    """Informed sampling region with c_best < c_min."""


class InvalidInput(EsirrtError):
    """Empty or inconsistent data passed to an aggregate operation."""
