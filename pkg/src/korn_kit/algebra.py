"""Pointwise algebra of 3x3 matrices and their 9-vector identifications.

Conventions used throughout the package:

* ``vec`` flattens a 3x3 matrix row-major, so entry (i, j) sits at index
  3*i + j; ``mat`` is its inverse.
* For a skew-symmetric matrix A the axial vector a = axl(A) satisfies
  A @ x == cross(a, x) for every x, and smat is the inverse map.
* The row-built 9x9 operators L_diag, L_skew, L_sym and L = L_skew + L_sym
  are assembled from smat of the rows of a 3x3 matrix Y.  L is symmetric
  and det L == -2 * det(Y)**3, so L is invertible exactly when Y is.
* A "grad27" value collects the nine entry gradients of a matrix field,
  shape (9, 3): row k is the spatial gradient of vec(X)[k].

All functions broadcast over leading axes, so they apply equally to a
single matrix or to a whole grid of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DeterminantTooSmall

DEFAULT_MIN_DET = 1e-12

# vec indices of the diagonal, strictly-upper and strictly-lower entries,
# with signs, as consumed by the three extraction maps.
_DVEC_IDX = (0, 4, 8)
_SKEWVEC_IDX = (5, 2, 1)
_SKEWVEC_SIGN = (-1.0, 1.0, -1.0)
_SYMVEC_IDX = (7, 6, 3)
_SYMVEC_SIGN = (1.0, -1.0, 1.0)


def _as_float_array(a, shape_suffix, name):
    arr = np.asarray(a, dtype=float)
    if arr.shape[len(arr.shape) - len(shape_suffix):] != shape_suffix:
        raise ValueError(f"{name} must have trailing shape {shape_suffix}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def mat_of_vec(v):
    """Reshape a 9-vector into a 3x3 matrix, row-major."""
    v = _as_float_array(v, (9,), "v")
    return v.reshape(v.shape[:-1] + (3, 3))


def vec_of_mat(m):
    """Flatten a 3x3 matrix into a 9-vector, row-major."""
    m = _as_float_array(m, (3, 3), "m")
    return m.reshape(m.shape[:-2] + (9,))


def smat(a):
    """Skew-symmetric matrix of a 3-vector: smat(a) @ x == cross(a, x)."""
    a = _as_float_array(a, (3,), "a")
    out = np.zeros(a.shape[:-1] + (3, 3), dtype=float)
    out[..., 0, 1] = -a[..., 2]
    out[..., 0, 2] = a[..., 1]
    out[..., 1, 0] = a[..., 2]
    out[..., 1, 2] = -a[..., 0]
    out[..., 2, 0] = -a[..., 1]
    out[..., 2, 1] = a[..., 0]
    return out


def axl(a):
    """Axial vector of a skew-symmetric matrix (inverse of smat).

    Accepts a SkewMat3 or an exactly skew-symmetric array; rejects
    anything whose transpose is not the exact negative, because the
    extraction is meaningless off so(3).
    """
    if isinstance(a, SkewMat3):
        return a.axial.copy()
    m = _as_float_array(a, (3, 3), "a")
    if not np.array_equal(np.swapaxes(m, -1, -2), -m):
        raise ValueError("axl requires an exactly skew-symmetric matrix")
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


@dataclass(frozen=True)
class SkewMat3:
    """Skew-symmetric 3x3 matrix stored by its axial vector.

    Storing the three independent entries makes skew-symmetry a structural
    fact rather than a numerical one; the curl-of-product shortcut for skew
    factors is only valid on exactly skew input.
    """

    axial: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axial", _as_float_array(self.axial, (3,), "axial"))

    @classmethod
    def from_matrix(cls, m, tol=0.0):
        """Build from a 3x3 matrix whose symmetric part is within tol."""
        m = _as_float_array(m, (3, 3), "m")
        sym = 0.5 * (m + np.swapaxes(m, -1, -2))
        worst = float(np.max(np.abs(sym)))
        if worst > tol:
            raise ValueError(f"matrix is not skew-symmetric (|sym part| = {worst:g} > {tol:g})")
        skew = 0.5 * (m - np.swapaxes(m, -1, -2))
        return cls(np.stack([skew[..., 2, 1], skew[..., 0, 2], skew[..., 1, 0]], axis=-1))

    @property
    def matrix(self) -> np.ndarray:
        return smat(self.axial)


def dvec(m):
    """Diagonal entries of a 3x3 matrix as a 3-vector."""
    m = _as_float_array(m, (3, 3), "m")
    return np.stack([m[..., 0, 0], m[..., 1, 1], m[..., 2, 2]], axis=-1)


def skewvec(m):
    """Strictly-upper entry data (-m23, m13, -m12); equals axl on so(3)."""
    m = _as_float_array(m, (3, 3), "m")
    return np.stack([-m[..., 1, 2], m[..., 0, 2], -m[..., 0, 1]], axis=-1)


def symvec(m):
    """Strictly-lower entry data (m32, -m31, m21); equals axl on so(3)."""
    m = _as_float_array(m, (3, 3), "m")
    return np.stack([m[..., 2, 1], -m[..., 2, 0], m[..., 1, 0]], axis=-1)


@dataclass(frozen=True)
class LOperators:
    """The four row-built 9x9 operators of a 3x3 matrix."""

    diag: np.ndarray
    skew: np.ndarray
    sym: np.ndarray
    full: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.full is None:
            object.__setattr__(self, "full", self.skew + self.sym)


def build_l_operators(y) -> LOperators:
    """Assemble L_diag, L_skew, L_sym and L = L_skew + L_sym from Y.

    The blocks are smat of the rows of Y placed in the fixed sparsity
    pattern; L is symmetric by construction and L = L_skew + L_sym holds
    exactly because ``full`` is formed as that sum.
    """
    y = _as_float_array(y, (3, 3), "y")
    s = [smat(y[..., n, :]) for n in range(3)]
    batch = y.shape[:-2]

    diag = np.zeros(batch + (9, 9), dtype=float)
    skew = np.zeros(batch + (9, 9), dtype=float)
    sym = np.zeros(batch + (9, 9), dtype=float)
    for n in range(3):
        diag[..., 3 * n:3 * n + 3, 3 * n:3 * n + 3] = -s[n]
    skew[..., 0:3, 3:6] = -s[2]
    skew[..., 0:3, 6:9] = s[1]
    skew[..., 3:6, 0:3] = s[2]
    sym[..., 3:6, 6:9] = -s[0]
    sym[..., 6:9, 0:3] = -s[1]
    sym[..., 6:9, 3:6] = s[0]
    return LOperators(diag=diag, skew=skew, sym=sym)


def invert_l(y, min_det: float = DEFAULT_MIN_DET) -> np.ndarray:
    """Inverse of L built from Y, guarded by a determinant floor.

    Raises DeterminantTooSmall if |det Y| < min_det (det L = -2 det(Y)**3,
    so L degenerates exactly with Y), or if the computed inverse fails the
    residual bound max|L @ Linv - I| <= 1e-12 * max|L|, which signals that
    Y is effectively singular at working precision.
    """
    y = _as_float_array(y, (3, 3), "y")
    if min_det <= 0.0:
        raise ValueError("min_det must be positive")
    det_y = np.linalg.det(y)
    if np.any(np.abs(det_y) < min_det):
        worst = float(np.min(np.abs(det_y)))
        raise DeterminantTooSmall(f"|det Y| = {worst:g} < min_det = {min_det:g}")
    l_full = build_l_operators(y).full
    l_inv = np.linalg.inv(l_full)
    eye = np.eye(9)
    residual = np.max(np.abs(l_full @ l_inv - eye), axis=(-2, -1))
    scale = np.max(np.abs(l_full), axis=(-2, -1))
    if np.any(residual > 1e-12 * np.maximum(scale, 1.0)):
        raise DeterminantTooSmall(
            "L inverse residual exceeds 1e-12 * |L|; Y is numerically singular")
    return l_inv


def _hat_select(grad27, idx, sign):
    rows = np.stack([s * grad27[..., k, :] for k, s in zip(idx, sign)], axis=-2)
    return rows.reshape(rows.shape[:-2] + (9,))


def hat_dvec(grad27):
    """Stacked gradient of the diagonal extraction, from entry gradients."""
    grad27 = _as_float_array(grad27, (9, 3), "grad27")
    return _hat_select(grad27, _DVEC_IDX, (1.0, 1.0, 1.0))


def hat_skewvec(grad27):
    """Stacked gradient of the strictly-upper extraction."""
    grad27 = _as_float_array(grad27, (9, 3), "grad27")
    return _hat_select(grad27, _SKEWVEC_IDX, _SKEWVEC_SIGN)


def hat_symvec(grad27):
    """Stacked gradient of the strictly-lower extraction."""
    grad27 = _as_float_array(grad27, (9, 3), "grad27")
    return _hat_select(grad27, _SYMVEC_IDX, _SYMVEC_SIGN)


def curl_product_pointwise(grad_x, x, y, curl_y) -> np.ndarray:
    """Row-wise curl of the product X @ Y from pointwise data.

    Evaluates mat(L_diag @ g_d + L_skew @ g_s + L_sym @ g_m) + X @ curl(Y),
    where g_d, g_s, g_m are the stacked gradients of the diagonal,
    strictly-upper and strictly-lower extractions of X, read off grad_x.
    """
    grad_x = _as_float_array(grad_x, (9, 3), "grad_x")
    x = _as_float_array(x, (3, 3), "x")
    y = _as_float_array(y, (3, 3), "y")
    curl_y = _as_float_array(curl_y, (3, 3), "curl_y")
    ops = build_l_operators(y)
    combo = (
        np.einsum("...pq,...q->...p", ops.diag, hat_dvec(grad_x))
        + np.einsum("...pq,...q->...p", ops.skew, hat_skewvec(grad_x))
        + np.einsum("...pq,...q->...p", ops.sym, hat_symvec(grad_x))
    )
    return mat_of_vec(combo) + x @ curl_y


def curl_product_skew_pointwise(grad_axl, a, y, curl_y) -> np.ndarray:
    """Row-wise curl of A @ Y for skew A, from the gradient of its axial vector.

    grad_axl is the 3x3 Jacobian of the axial vector (row i is the gradient
    of component i); the result is mat(L @ vec(grad_axl)) + A @ curl(Y).
    """
    grad_axl = _as_float_array(grad_axl, (3, 3), "grad_axl")
    if not isinstance(a, SkewMat3):
        a = SkewMat3.from_matrix(a)
    y = _as_float_array(y, (3, 3), "y")
    curl_y = _as_float_array(curl_y, (3, 3), "curl_y")
    l_full = build_l_operators(y).full
    combo = np.einsum("...pq,...q->...p", l_full, vec_of_mat(grad_axl))
    return mat_of_vec(combo) + a.matrix @ curl_y
