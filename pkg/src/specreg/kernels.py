"""Kernel evaluation and Gram / cross-Gram assembly.

Rows are samples throughout.  Supported families: linear, polynomial
(x.y + 1)^degree, and Gaussian exp(-||x - y||^2 / (2 sigma^2)).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError

FAMILIES = ("linear", "polynomial", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    degree: int | None = None
    bandwidth: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown kernel family {self.family!r}")
        if self.family == "polynomial":
            if self.degree is None or int(self.degree) < 1:
                raise ParameterError("polynomial kernel needs degree >= 1")
            if self.bandwidth is not None:
                raise ParameterError("polynomial kernel takes no bandwidth")
        elif self.family == "gaussian":
            if self.bandwidth is None or self.bandwidth <= 0:
                raise ParameterError("gaussian kernel needs bandwidth > 0")
            if self.degree is not None:
                raise ParameterError("gaussian kernel takes no degree")
        elif self.degree is not None or self.bandwidth is not None:
            raise ParameterError("linear kernel takes no parameters")

    def to_dict(self):
        out = {"family": self.family}
        if self.degree is not None:
            out["degree"] = int(self.degree)
        if self.bandwidth is not None:
            out["bandwidth"] = float(self.bandwidth)
        return out

    @staticmethod
    def from_dict(d):
        return KernelSpec(
            family=d["family"],
            degree=d.get("degree"),
            bandwidth=d.get("bandwidth"),
        )


def linear_kernel():
    return KernelSpec("linear")


def polynomial_kernel(degree):
    return KernelSpec("polynomial", degree=degree)


def gaussian_kernel(bandwidth):
    return KernelSpec("gaussian", bandwidth=bandwidth)


def kernel_eval(spec, x, x2):
    """Kernel value between two single points."""
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape:
        raise ShapeError(f"point dimensions differ: {x.shape} vs {x2.shape}")
    if spec.family == "linear":
        return float(x @ x2)
    if spec.family == "polynomial":
        return float((x @ x2 + 1.0) ** spec.degree)
    d2 = max(float(x @ x) + float(x2 @ x2) - 2.0 * float(x @ x2), 0.0)
    return float(np.exp(-d2 / (2.0 * spec.bandwidth**2)))


def _sqdist(x, c):
    # ||x_i - c_j||^2 via the expanded product, clamped against round-off.
    g = x @ c.T
    if c is x:
        g = (g + g.T) / 2.0
        s = np.diag(g).copy()
        d2 = s[:, None] + s[None, :] - 2.0 * g
        np.fill_diagonal(d2, 0.0)
    else:
        d2 = (x * x).sum(axis=1)[:, None] + (c * c).sum(axis=1)[None, :] - 2.0 * g
    return np.maximum(d2, 0.0)


def cross_gram(spec, x, c):
    """Matrix of kernel values between the rows of x (n) and the rows of c (m)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    c = x if c is x else np.atleast_2d(np.asarray(c, dtype=float))
    if x.shape[1] != c.shape[1]:
        raise ShapeError(
            f"row dimensions differ: {x.shape[1]} vs {c.shape[1]}"
        )
    if spec.family == "linear":
        return x @ c.T
    if spec.family == "polynomial":
        return (x @ c.T + 1.0) ** spec.degree
    return np.exp(-_sqdist(x, c) / (2.0 * spec.bandwidth**2))


def gram(spec, x):
    """Symmetric PSD kernel matrix of the rows of x."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return cross_gram(spec, x, x)
