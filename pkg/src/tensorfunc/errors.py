"""Exception hierarchy shared by all modules."""


class TensorFuncError(Exception):
    """Base class for errors raised by :mod:`tensorfunc`."""


class DimensionError(TensorFuncError, ValueError):
    """Operands have incompatible or invalid shapes."""


class RealCastError(TensorFuncError, ValueError):
    """A supposedly real result carries a non-negligible imaginary part."""


class DecompositionError(TensorFuncError, ArithmeticError):
    """A facewise eigendecomposition could not be computed reliably."""


class MatrixFunctionError(TensorFuncError, ArithmeticError):
    """A dense matrix function could not be evaluated.

    ``face`` is set when the failure happened on one Fourier-domain face.
    """

    def __init__(self, message, face=None):
        if face is not None:
            message = f"face {face}: {message}"
        super().__init__(message)
        self.face = face


class BreakdownError(TensorFuncError, ArithmeticError):
    """Block Arnoldi could not normalize a new basis block."""

    def __init__(self, reason, step=None):
        prefix = "breakdown" if step is None else f"breakdown at step {step}"
        super().__init__(f"{prefix}: {reason}")
        self.reason = reason
        self.step = step


class KrylovConvergenceError(TensorFuncError, RuntimeError):
    """Base for restarted Krylov failures; carries the best iterate."""

    def __init__(self, message, cycle, approximation=None, history=None):
        super().__init__(message)
        self.cycle = cycle
        self.approximation = approximation
        self.history = history


class QuadratureSaturationError(KrylovConvergenceError):
    """The adaptive quadrature for the error update hit its node cap."""


class NonConvergenceError(KrylovConvergenceError):
    """The restart loop reached ``max_cycles`` before meeting the tolerance."""


class BackendError(TensorFuncError, RuntimeError):
    """Wraps a failure inside a t-function backend, tagging the backend."""

    def __init__(self, backend, cause):
        super().__init__(f"[{backend}] {cause}")
        self.backend = backend
        self.cause = cause


class AdjacencyError(TensorFuncError, ValueError):
    """An adjacency tensor violates symmetry, zero-diagonal or binary entries."""

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} at (i, j, k) = {index}"
        super().__init__(message)
        self.index = index
