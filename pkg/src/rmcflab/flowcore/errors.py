"""Exceptions raised by the flow integrators."""


class FlowError(RuntimeError):
    """Base class; carries the flow time at which the failure occurred."""

    def __init__(self, message, time=None):
        suffix = "" if time is None else f" (at time {time:.9g})"
        super().__init__(message + suffix)
        self.time = time


class FlowInstability(FlowError):
    """A step destroyed convexity or positivity even after repeated halving of dt."""


class NearExtinction(FlowError):
    """The shape became too small to resolve on the current grid."""


class DomainError(FlowError):
    """The solution left the computational domain (grid end or axis blow-up)."""
