"""Exception types shared across the package."""

import numpy as np


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericalFailure(FloatingPointError):
    """A computation produced non-finite values.

    ``theta`` holds the parameter vector at which the failure was observed,
    ``iteration`` is filled in by the run loops when known.
    """

    def __init__(self, message, theta=None, iteration=None):
        super().__init__(message)
        self.theta = None if theta is None else np.array(theta, dtype=float)
        self.iteration = iteration


class DivergenceError(NumericalFailure):
    """A first-order baseline produced a non-finite cost."""


class StepFailure(RuntimeError):
    """A VA-Flow step could not satisfy the n* floor within the retry budget."""

    def __init__(self, message, diagnostics=None, iteration=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
        self.iteration = iteration


class Converged(Exception):
    """Signal (not a failure) that a flow cannot or need not move further.

    ``reason`` is ``"vtol"`` when the field vanished and ``"stalled"`` when the
    probe step fell below the floating-point resolution of theta.
    """

    def __init__(self, reason="vtol"):
        super().__init__(reason)
        self.reason = reason
