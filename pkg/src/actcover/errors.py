"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed instance, edge set or parameter."""


class InfeasibleInstance(Exception):
    """No r-edge-cover exists (the full edge set does not cover some node)."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class InfeasibleAtThisM(InfeasibleInstance):
    """The cost ceiling M removed too many edges; try the next M."""


class OracleTooLarge(Exception):
    """An exact solver was asked to handle more edges than its guard allows."""


class TauTooSmall(Exception):
    """The budget estimate was rejected by the potential-reduction test."""

    def __init__(self, tau, record=None):
        super().__init__(f"tau={tau} rejected")
        self.tau = tau
        self.record = record
