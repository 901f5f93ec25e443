"""Exception hierarchy shared by all seatlot modules."""


class ApportionmentError(Exception):
    """Base class for all seatlot errors."""


class InputError(ApportionmentError, ValueError):
    """Malformed input: bad vectors, length mismatches, unparsable files."""


class InfeasibleError(ApportionmentError):
    """No allocation exists under the requested constraints.

    Carries structured diagnostics so callers (notably the CLI) can report
    which condition failed and for which states.
    """

    def __init__(self, message, *, diagnostics=None, trace=None):
        super().__init__(message)
        self.diagnostics = diagnostics
        self.trace = trace


class CapacityError(ApportionmentError):
    """An exact-enumeration routine was asked to exceed its size limit."""


class ConvergenceError(ApportionmentError):
    """A retry-capped randomized routine exhausted its attempt budget."""
