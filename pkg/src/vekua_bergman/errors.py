"""Exception types raised across the package."""


class VekuaBergmanError(Exception):
    """Base class for all package errors."""


class DomainError(VekuaBergmanError, ValueError):
    """Invalid domain parameters or quadrature orders."""


class DomainMismatchError(VekuaBergmanError, ValueError):
    """Two grid functions (or a grid function and a domain) disagree on the domain."""


class EvaluationRegionError(VekuaBergmanError, ValueError):
    """A point lies outside the margin-shrunk evaluation region."""


class EmptyLatticeError(VekuaBergmanError, ValueError):
    """No lattice point survived the interior/margin restriction."""


class SampleError(VekuaBergmanError, ValueError):
    """An evaluator failed or returned a non-finite value at a node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConvergenceError(VekuaBergmanError, RuntimeError):
    """Fixed-point iteration stopped without reaching its tolerance."""

    def __init__(self, message, history=(), final_update=None, index=None):
        super().__init__(message)
        self.history = list(history)
        self.final_update = final_update
        self.index = index


class DivergenceError(ConvergenceError):
    """Update norms grew for three consecutive iterations."""


class OrthonormalizationError(VekuaBergmanError, ValueError):
    """Gram-Schmidt left no surviving candidates."""


class UncertifiedTargetError(VekuaBergmanError, ValueError):
    """A reproduction target is not a solution for the configured coefficients."""
