"""Exception types shared across the package."""

import numpy as np


class ShapeError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class ParameterError(ValueError):
    """A hyperparameter is outside its admissible range."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization or update hit a nonpositive pivot.

    The offending pivot index is stored in ``pivot``.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class SingularMatrixError(np.linalg.LinAlgError):
    """Triangular solve with a zero diagonal entry."""


class SingularFilterError(ValueError):
    """Filter evaluation would divide by zero (lambda = 0 at a zero eigenvalue)."""


class DegenerateError(ValueError):
    """Degenerate input: all-zero sampling weights, rank-0 matrix, and the like."""


class UntrainedError(RuntimeError):
    """Prediction requested from a model that has seen no data."""


class NonContiguousLabelError(ValueError):
    """A streamed class label skips ahead of the next unseen class index."""


class SelectionError(ValueError):
    """Model selection received an empty or unusable validation set."""


class ParseError(ValueError):
    """A data file could not be parsed; ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(ValueError):
    """A run configuration is invalid; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
