"""Exception types raised across the package."""


class JointsLabError(Exception):
    """Base class for all package errors."""


class DivisionByZero(JointsLabError, ZeroDivisionError):
    pass


class MixedFields(JointsLabError, ValueError):
    pass


class DegenerateConstruction(JointsLabError):
    """A generic construction produced an unexpected coincidence."""


class DependentDirections(JointsLabError, ValueError):
    pass


class InvalidOrders(JointsLabError, ValueError):
    pass


class HypothesesViolated(JointsLabError):
    """Vanishing orders fail one of the clauses (a), (b) or (c).

    ``clause`` names the failed clause and ``detail`` locates it.
    """

    def __init__(self, clause, detail):
        self.clause = clause
        self.detail = detail
        super().__init__(f"hypothesis ({clause}) violated: {detail}")


class NotConnected(JointsLabError):
    pass


class NoConvergence(JointsLabError):
    def __init__(self, message, best_spread=None, iterations=None):
        self.best_spread = best_spread
        self.iterations = iterations
        super().__init__(message)


class EmptyLine(JointsLabError, ValueError):
    pass


class InfeasibleInput(JointsLabError, ValueError):
    pass


class ConfigParseError(JointsLabError, ValueError):
    """Malformed document; ``path`` points at the offending JSON node."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
