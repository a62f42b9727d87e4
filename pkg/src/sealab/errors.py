"""Shared exception types.

Every domain error raised by this package derives from SealabError so the
CLI and the HTTP layer can map them to exit status 1 / 4xx uniformly.
"""


class SealabError(Exception):
    """Base class for all domain errors."""


class AliasingError(SealabError):
    """Sampling rate too low for the dynamics being discretized."""


class SimulationError(SealabError):
    """Experiment run rejected (bad sizes, unstable discretization, ...)."""


class EstimationError(SealabError):
    """Frequency-response estimation could not produce a valid result."""


class DesignInfeasibleError(SealabError):
    """Requested phase lead cannot be produced by a single lead section."""


class PrerequisiteError(SealabError):
    """A design question was graded before its prerequisites were accepted."""


class UnrealizableError(SealabError):
    """Interaction spec admits no winning controller strategy."""

    def __init__(self, message, counter_trace=None):
        super().__init__(message)
        self.counter_trace = counter_trace or []


class ProtocolViolationError(SealabError):
    """Environment action not admissible from the current engine state."""

    def __init__(self, message, assumption=None):
        super().__init__(message)
        self.assumption = assumption


class SchedulingError(SealabError):
    """Reservation rejected (conflict, window, gating, ownership)."""


class AuthError(SealabError):
    """Missing or invalid credentials/token."""


class NotFoundError(SealabError):
    """Referenced entity does not exist."""
