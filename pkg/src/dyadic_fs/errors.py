"""Exception hierarchy shared by the package and mapped to CLI exit codes."""


class DyadicError(Exception):
    """Base class for all package errors."""


class ParameterError(DyadicError, ValueError):
    """A numeric parameter lies outside its admissible range (CLI exit 3)."""


class GridError(DyadicError, ValueError):
    """Invalid cube, grid specification, or mismatched grids."""


class RootHasNoParent(GridError):
    pass


class LeafHasNoChildren(GridError):
    pass


class SpecMismatch(GridError):
    pass


class GridParseError(DyadicError):
    """Malformed grid or set file (CLI exit 2)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PackingViolation(DyadicError, AssertionError):
    """A packing subfamily failed its post-hoc property check."""
