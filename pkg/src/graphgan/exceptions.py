"""Exception types raised across the package."""


class GraphFormatError(ValueError):
    """Malformed edge-list, label or embedding file."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NotInComponentError(ValueError):
    """A vertex is not reachable from the root of a BFS-tree."""


class IsolatedRootError(ValueError):
    """The root of a tree has no tree neighbours, so nothing can be sampled."""


class NonFiniteUpdateError(FloatingPointError):
    """A parameter update produced NaN or Inf."""


class SamplingError(RuntimeError):
    """The online random walk exceeded its step cap."""
