"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Rejected input: parameter out of range or inconsistent."""


class DomainError(ValueError):
    """Function evaluated outside its mathematical domain."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class IntegrationError(RuntimeError):
    """Time integration could not meet its accuracy targets.

    ``tau_reached`` holds the time up to which the trajectory is valid.
    """

    def __init__(self, message, tau_reached=None):
        super().__init__(message)
        self.tau_reached = tau_reached
