"""Exception types shared across the package."""


class HetnetError(Exception):
    """Base class for all package errors."""


class OutsideCluster(HetnetError):
    """A point lies outside the service disk."""


class QuadratureFailure(HetnetError):
    """A numerical integral did not converge to the requested tolerance."""


class DivisionByZero(HetnetError):
    """A rate or time that must be positive is zero."""


class StateSpaceTooLarge(HetnetError):
    """The occupancy state space exceeds the configured cap."""

    def __init__(self, count, cap):
        super().__init__(f"state space has at least {count} states, cap is {cap}")
        self.count = count
        self.cap = cap


class ReducibleChain(HetnetError):
    """The transition graph is not strongly connected."""

    def __init__(self, components):
        super().__init__(
            f"chain is reducible: {len(components)} strongly connected components"
        )
        self.components = components


class SolverFailure(HetnetError):
    """Stationary solve did not reach the residual target."""

    def __init__(self, residual, target):
        super().__init__(f"residual {residual:.3e} exceeds target {target:.3e}")
        self.residual = residual
        self.target = target


class ConfigInvalid(HetnetError):
    """Configuration file failed validation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class IoFailure(HetnetError):
    """Result emission failed."""
