"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the operation's domain."""


class ContractViolation(ValueError):
    """A precondition of a structural operation (e.g. a rotation) does not hold."""


class CapacityError(RuntimeError):
    """An exact computation was requested beyond its configured size cap."""


class RegimeError(ValueError):
    """Parameters fall inside a regime the threshold law excludes."""

    def __init__(self, message, branch="excluded_band"):
        super().__init__(message)
        self.branch = branch


class InfeasibleError(ValueError):
    """No probability in (0, 1) satisfies the threshold equation."""
