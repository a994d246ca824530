"""Exception hierarchy shared across the package."""


class ChainInjectError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(ChainInjectError, ValueError):
    pass


class ChainSelectionError(ChainInjectError, ValueError):
    pass


class AdjacentRowsError(ChainSelectionError):
    pass


class TooManyChainsError(ChainSelectionError):
    pass


class DuplicateRowError(ChainSelectionError):
    pass


class ZeroAcceptanceError(ChainInjectError, ArithmeticError):
    """The post-selected branch has zero amplitude and can never pass."""


class ConvergenceError(ChainInjectError, RuntimeError):
    pass


class RegisterTooLargeError(ChainInjectError, MemoryError):
    pass


class ImpossibleOutcomeError(ChainInjectError):
    def __init__(self, message, probability=0.0):
        super().__init__(message)
        self.probability = probability


class AncillaNotResetError(ChainInjectError, RuntimeError):
    pass


class ModeMismatchError(ChainInjectError, ValueError):
    pass


class OutOfSubspaceError(ChainInjectError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class ConfigError(ChainInjectError, ValueError):
    pass
