"""Shared exception types."""


class GraphonError(Exception):
    """Base class for errors raised by this package."""


class InputError(GraphonError):
    """Invalid or inconsistent input (bad weights, mismatched shapes, ...)."""


class CapExceeded(GraphonError):
    """A size or work cap was exceeded; raise instead of approximating."""
