"""Dense symmetric linear algebra: eigendecomposition, Cholesky factors,
rank-one Cholesky up/downdates, triangular solves, economic QR.

All factors are plain float64 ndarrays wrapped in small immutable
containers.  Rank-one updates use Givens-style rotations with O(p^2) cost;
the inner loop is JIT-compiled when numba is available.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefiniteError, ShapeError, SingularMatrixError

# Relative threshold under which singular/eigen values count as zero.
RANK_RTOL = 1e-12

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


def _cholup_python(r, x, sgn):
    # Fallback used when numba is missing: same algorithm, row-vectorized.
    p = r.shape[0]
    for k in range(p):
        rkk = r[k, k]
        r2 = rkk * rkk + sgn * x[k] * x[k]
        if r2 <= 0.0:
            return k
        rho = np.sqrt(r2)
        r[k, k] = rho
        if k + 1 < p:
            c = rho / rkk
            s = x[k] / rkk
            row = r[k, k + 1 :]
            row += sgn * s * x[k + 1 :]
            row /= c
            x[k + 1 :] = c * x[k + 1 :] - s * row
    return -1


def _border_step_python(rbuf, t, c, gamma):
    # grow the factor in rbuf[:t-1, :t-1] to rbuf[:t, :t]
    view = rbuf[:t, :t]
    view[:, t - 1] = 0.0
    view[t - 1, :] = 0.0
    g = np.sqrt(1.0 + gamma)
    bad = _cholup_kernel(view, np.append(c / (1.0 + g), g), 1.0)
    if bad >= 0:
        return bad
    return _cholup_kernel(view, np.append(c / (1.0 + g), -1.0), -1.0)


if _HAVE_NUMBA:

    @_njit(cache=True, nogil=True)
    def _cholup_kernel(r, x, sgn):  # pragma: no cover - compiled
        p = r.shape[0]
        for k in range(p):
            rkk = r[k, k]
            r2 = rkk * rkk + sgn * x[k] * x[k]
            if r2 <= 0.0:
                return k
            rho = np.sqrt(r2)
            r[k, k] = rho
            if k + 1 < p:
                c = rho / rkk
                s = x[k] / rkk
                for j in range(k + 1, p):
                    r[k, j] = (r[k, j] + sgn * s * x[j]) / c
                    x[j] = c * x[j] - s * r[k, j]
        return -1

    @_njit(cache=True, nogil=True)
    def _border_step_kernel(rbuf, t, c, gamma):  # pragma: no cover - compiled
        # fused zero-pad + rank-one update + downdate, one call per path step
        for k in range(t):
            rbuf[k, t - 1] = 0.0
            rbuf[t - 1, k] = 0.0
        g = np.sqrt(1.0 + gamma)
        x = np.empty(t)
        for sgn in (1.0, -1.0):
            for j in range(t - 1):
                x[j] = c[j] / (1.0 + g)
            x[t - 1] = g if sgn > 0 else -1.0
            for k in range(t):
                rkk = rbuf[k, k]
                r2 = rkk * rkk + sgn * x[k] * x[k]
                if r2 <= 0.0:
                    return k
                rho = np.sqrt(r2)
                rbuf[k, k] = rho
                if k + 1 < t:
                    cos = rho / rkk
                    sin = x[k] / rkk
                    for j in range(k + 1, t):
                        rbuf[k, j] = (rbuf[k, j] + sgn * sin * x[j]) / cos
                        x[j] = cos * x[j] - sin * rbuf[k, j]
        return -1

else:
    _cholup_kernel = _cholup_python
    _border_step_kernel = _border_step_python


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition M = Q diag(eigvals) Q^T, eigenvalues descending."""

    eigvecs: np.ndarray
    eigvals: np.ndarray

    @property
    def dim(self):
        return self.eigvals.shape[0]


@dataclass(frozen=True)
class CholFactor:
    """Upper-triangular R with R^T R equal to the factored matrix."""

    r: np.ndarray

    @property
    def dim(self):
        return self.r.shape[0]


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


def _check_symmetric(m, rtol=1e-10):
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > rtol * scale:
        raise ShapeError("matrix is not symmetric within tolerance")


def eigh_sym(m):
    """Symmetric eigendecomposition with eigenvalues sorted descending.

    Tiny negative eigenvalues (magnitude below RANK_RTOL times the largest)
    are clamped to zero so that nominally PSD inputs stay PSD.
    """
    m = _as_square(m)
    _check_symmetric(m)
    vals, vecs = np.linalg.eigh(m)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    if vals.size:
        top = abs(vals[0])
        tiny = (vals < 0) & (np.abs(vals) < RANK_RTOL * top)
        vals[tiny] = 0.0
    return SymEig(eigvecs=vecs, eigvals=vals)


def cholesky(a):
    """Upper-triangular Cholesky factor of a symmetric positive-definite matrix."""
    a = _as_square(a)
    _check_symmetric(a)
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (pivot {_failing_pivot(a)})",
            pivot=_failing_pivot(a),
        ) from None
    return CholFactor(r=np.ascontiguousarray(lower.T))


def _failing_pivot(a):
    # Locate the first nonpositive pivot by running a plain column Cholesky.
    a = a.copy()
    p = a.shape[0]
    for k in range(p):
        if a[k, k] <= 0:
            return k
        a[k, k] = np.sqrt(a[k, k])
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k + 1 :, k])
    return p - 1


def cholup_inplace(r, x, sign):
    """Rank-one update of an upper-triangular factor, overwriting ``r`` and ``x``.

    After the call R^T R has gained (sign) x x^T.  Raises on a downdate that
    would destroy positive definiteness.
    """
    sgn = {"plus": 1.0, "+": 1.0, "minus": -1.0, "-": -1.0}.get(sign)
    if sgn is None:
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    bad = _cholup_kernel(r, x, sgn)
    if bad >= 0:
        raise NotPositiveDefiniteError(
            f"rank-one {'downdate' if sgn < 0 else 'update'} lost positive "
            f"definiteness at pivot {bad}",
            pivot=bad,
        )


def cholup(r, x, sign):
    """Pure rank-one update: returns a new factor of R^T R +/- x x^T."""
    x = np.asarray(x, dtype=float)
    if x.shape != (r.dim,):
        raise ShapeError(f"update vector has shape {x.shape}, factor dim {r.dim}")
    out = r.r.copy()
    cholup_inplace(out, x.copy(), sign)
    return CholFactor(r=out)


def chol_append(r, c, gamma):
    """Grow a factor of G to the factor of [[G, c], [c^T, gamma]].

    The bordered matrix is reached with one rank-one update and one
    downdate of the zero-padded factor, using
    u = (c/(1+g), g), v = (c/(1+g), -1), g = sqrt(1+gamma), for which
    u u^T - v v^T equals the border contribution exactly.
    """
    t = r.dim + 1
    out = np.zeros((t, t))
    out[: t - 1, : t - 1] = r.r
    c = np.asarray(c, dtype=float)
    if c.shape != (t - 1,):
        raise ShapeError(f"border column has shape {c.shape}, expected ({t - 1},)")
    g = np.sqrt(1.0 + gamma)
    u = np.append(c / (1.0 + g), g)
    v = np.append(c / (1.0 + g), -1.0)
    cholup_inplace(out, u, "plus")
    cholup_inplace(out, v, "minus")
    return CholFactor(r=out)


def tri_solve(r, b, transpose=False):
    """Solve R X = b (or R^T X = b when ``transpose``) for a CholFactor ``r``."""
    b = np.asarray(b, dtype=float)
    rows = b.shape[0] if b.ndim else None
    if rows != r.dim:
        raise ShapeError(f"right-hand side has {rows} rows, factor dim {r.dim}")
    if np.any(np.diag(r.r) == 0.0):
        raise SingularMatrixError("triangular factor has a zero diagonal entry")
    return scipy.linalg.solve_triangular(
        r.r, b, trans="T" if transpose else "N", lower=False
    )


def chol_solve(r, b):
    """Solve (R^T R) X = b with two triangular passes."""
    return tri_solve(r, tri_solve(r, b, transpose=True))


def economic_qr(a):
    """Rank-revealing economic QR: a = s @ d with orthonormal s (p x k).

    k is the numerical rank (pivoted-QR diagonal above RANK_RTOL times the
    leading pivot).  The second factor d is the pivoted triangular block with
    the column permutation folded back in.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    q, rr, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(rr))
    if diag.size == 0 or diag[0] == 0.0:
        k = 0
    else:
        k = int(np.sum(diag > RANK_RTOL * diag[0]))
    s = q[:, :k]
    d = np.zeros((k, a.shape[1]))
    d[:, piv] = rr[:k, :]
    return s, d, k
