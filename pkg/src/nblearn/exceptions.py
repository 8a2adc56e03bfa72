"""Exception and warning types raised across the package."""


class ModelError(Exception):
    """Base class for errors raised by nblearn."""


class NotStronglyConnected(ModelError, ValueError):
    def __init__(self, source, target):
        self.source = source
        self.target = target
        super().__init__(f"graph is not strongly connected: node {target} is unreachable from node {source}")


class NoConvergence(ModelError, RuntimeError):
    def __init__(self, max_iter, residual):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(f"power iteration did not converge in {max_iter} iterations (residual {residual:.3e})")


class AllZero(ModelError, ValueError):
    pass


class NonFinite(ModelError, ValueError):
    pass


class TruncationError(ModelError, ValueError):
    pass


class SpaceMismatch(ModelError, ValueError):
    pass


class DegenerateUpdate(ModelError, ArithmeticError):
    """The normalizing integral of an update vanished (or diverged).

    ``round`` is the round being produced when the failure happened and
    ``trajectory`` holds the rounds completed before it, when available.
    """

    def __init__(self, message, round=None, agent=None, trajectory=None):
        self.round = round
        self.agent = agent
        self.trajectory = trajectory
        super().__init__(message)


class SpecOutsideCatalog(ModelError, ValueError):
    pass


class BBCMNotConverged(ModelError, RuntimeError):
    pass


class ConfigError(ModelError, ValueError):
    """Malformed scenario configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class TailMassWarning(UserWarning):
    """Probability mass is piling up at the edge of a truncated space."""


class PrecisionWarning(UserWarning):
    """Exact path counts were too large and were converted to floats."""
