"""Manufactured fields with exact derivatives, used as verification oracles.

Each family evaluates both the field and its analytic derivatives, so tests
and experiments can measure discretization error directly.  Polynomial
families expose per-axis degree control: second-order stencils are exact on
per-axis quadratics, which makes "formula holds up to roundoff" cases
possible alongside genuine O(h^2) convergence cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownKind
from .fields import GridSpec, MatrixField, VectorField


def _monomials(points, exponents):
    # points (..., 3), exponents (T, 3) -> (..., T)
    return np.prod(points[..., None, :] ** exponents[None, :, :], axis=-1)


def _monomial_derivatives(points, exponents):
    # d/dx_j of each monomial -> (..., T, 3)
    out = np.zeros(points.shape[:-1] + exponents.shape, dtype=float)
    for j in range(3):
        e = exponents[:, j]
        mask = e > 0
        if not np.any(mask):
            continue
        lowered = exponents[mask].copy()
        lowered[:, j] -= 1
        vals = _monomials(points, lowered) * e[mask]
        out[..., mask, j] = vals
    return out


@dataclass(frozen=True)
class PolynomialVectorField:
    """Vector field with polynomial components: coeffs (3, T), exponents (T, 3)."""

    coeffs: np.ndarray
    exponents: np.ndarray

    def value(self, points):
        return np.einsum("ct,...t->...c", self.coeffs, _monomials(points, self.exponents))

    def jacobian(self, points):
        d = _monomial_derivatives(points, self.exponents)
        return np.einsum("ct,...tj->...cj", self.coeffs, d)

    def sample(self, grid: GridSpec) -> VectorField:
        return VectorField(grid, self.value(grid.points()))

    def sample_jacobian(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.jacobian(grid.points()))


@dataclass(frozen=True)
class PolynomialMatrixField:
    """Matrix field with polynomial entries: coeffs (3, 3, T), exponents (T, 3)."""

    coeffs: np.ndarray
    exponents: np.ndarray

    def value(self, points):
        return np.einsum("rct,...t->...rc", self.coeffs, _monomials(points, self.exponents))

    def entry_jacobian(self, points):
        d = _monomial_derivatives(points, self.exponents)
        grad = np.einsum("rct,...tj->...rcj", self.coeffs, d)
        return grad.reshape(grad.shape[:-3] + (9, 3))

    def curl(self, points):
        return _curl_from_entry_jacobian(self.entry_jacobian(points))

    def sample(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.value(grid.points()))

    def sample_curl(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.curl(grid.points()))


def _curl_from_entry_jacobian(grad27):
    # row l of the curl from vec-ordered entry gradients
    shape = grad27.shape[:-2]
    out = np.empty(shape + (3, 3), dtype=float)
    for l in range(3):
        d = [grad27[..., 3 * l + c, :] for c in range(3)]  # d[c][..., j] = d_j M_lc
        out[..., l, 0] = d[2][..., 1] - d[1][..., 2]
        out[..., l, 1] = d[0][..., 2] - d[2][..., 0]
        out[..., l, 2] = d[1][..., 0] - d[0][..., 1]
    return out


@dataclass(frozen=True)
class TrigMatrixField:
    """Matrix field with entries amp * sin(wave . x + phase)."""

    amplitude: np.ndarray  # (3, 3)
    wave: np.ndarray       # (3, 3, 3)
    phase: np.ndarray      # (3, 3)

    def value(self, points):
        arg = np.einsum("rcj,...j->...rc", self.wave, points) + self.phase
        return self.amplitude * np.sin(arg)

    def entry_jacobian(self, points):
        arg = np.einsum("rcj,...j->...rc", self.wave, points) + self.phase
        grad = (self.amplitude * np.cos(arg))[..., None] * self.wave
        return grad.reshape(grad.shape[:-3] + (9, 3))

    def curl(self, points):
        return _curl_from_entry_jacobian(self.entry_jacobian(points))

    def sample(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.value(grid.points()))

    def sample_curl(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.curl(grid.points()))


@dataclass(frozen=True)
class TrigVectorField:
    """Vector field with components amp * sin(wave . x + phase)."""

    amplitude: np.ndarray  # (3,)
    wave: np.ndarray       # (3, 3)
    phase: np.ndarray      # (3,)

    def value(self, points):
        arg = np.einsum("cj,...j->...c", self.wave, points) + self.phase
        return self.amplitude * np.sin(arg)

    def jacobian(self, points):
        arg = np.einsum("cj,...j->...c", self.wave, points) + self.phase
        return (self.amplitude * np.cos(arg))[..., None] * self.wave

    def sample(self, grid: GridSpec) -> VectorField:
        return VectorField(grid, self.value(grid.points()))

    def sample_jacobian(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.jacobian(grid.points()))


@dataclass(frozen=True)
class RotationMatrixField:
    """Rotation-valued field R(theta(x)) about a fixed unit axis.

    theta(x) = base + lin . x + amp * sin(freq . x + phase), so the entry
    gradients follow from dR/dtheta = cos(theta) K + sin(theta) K^2 with
    K = smat(axis).
    """

    axis: np.ndarray
    base: float = 0.0
    lin: np.ndarray = (0.0, 0.0, 0.0)
    amp: float = 0.0
    freq: np.ndarray = (0.0, 0.0, 0.0)
    phase: float = 0.0

    def _theta(self, points):
        lin = np.asarray(self.lin, dtype=float)
        freq = np.asarray(self.freq, dtype=float)
        theta = self.base + points @ lin + self.amp * np.sin(points @ freq + self.phase)
        dtheta = np.broadcast_to(lin, points.shape).copy()
        dtheta = dtheta + (self.amp * np.cos(points @ freq + self.phase))[..., None] * freq
        return theta, dtheta

    def _k(self):
        axis = np.asarray(self.axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        k = np.array([[0, -axis[2], axis[1]],
                      [axis[2], 0, -axis[0]],
                      [-axis[1], axis[0], 0]])
        return k, k @ k

    def value(self, points):
        theta, _ = self._theta(points)
        k, k2 = self._k()
        eye = np.eye(3)
        return (eye + np.sin(theta)[..., None, None] * k
                + (1.0 - np.cos(theta))[..., None, None] * k2)

    def entry_jacobian(self, points):
        theta, dtheta = self._theta(points)
        k, k2 = self._k()
        dr_dtheta = (np.cos(theta)[..., None, None] * k
                     + np.sin(theta)[..., None, None] * k2)
        grad = dr_dtheta[..., :, :, None] * dtheta[..., None, None, :]
        return grad.reshape(grad.shape[:-3] + (9, 3))

    def curl(self, points):
        return _curl_from_entry_jacobian(self.entry_jacobian(points))

    def sample(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.value(grid.points()))

    def sample_curl(self, grid: GridSpec) -> MatrixField:
        return MatrixField(grid, self.curl(grid.points()))


def _quadratic_exponents(per_axis_degree, total_degree):
    exps = []
    d = per_axis_degree
    for e1 in range(d + 1):
        for e2 in range(d + 1):
            for e3 in range(d + 1):
                if e1 + e2 + e3 <= total_degree:
                    exps.append((e1, e2, e3))
    return np.array(exps, dtype=int)


def random_polynomial_matrix(seed, per_axis_degree=1, total_degree=2,
                             scale=1.0) -> PolynomialMatrixField:
    """Seeded polynomial matrix field; per-axis degree 1 keeps products
    stencil-exact under second-order differences."""
    rng = np.random.default_rng(seed)
    exps = _quadratic_exponents(per_axis_degree, total_degree)
    coeffs = rng.uniform(-scale, scale, (3, 3, len(exps)))
    return PolynomialMatrixField(coeffs, exps)


def random_polynomial_vector(seed, per_axis_degree=1, total_degree=2,
                             scale=1.0) -> PolynomialVectorField:
    rng = np.random.default_rng(seed)
    exps = _quadratic_exponents(per_axis_degree, total_degree)
    coeffs = rng.uniform(-scale, scale, (3, len(exps)))
    return PolynomialVectorField(coeffs, exps)


def random_trig_matrix(seed, amplitude=1.0, wavenumber=1.0) -> TrigMatrixField:
    rng = np.random.default_rng(seed)
    amp = amplitude * rng.uniform(0.5, 1.0, (3, 3))
    wave = wavenumber * rng.uniform(-1.0, 1.0, (3, 3, 3))
    phase = rng.uniform(0.0, 2.0 * np.pi, (3, 3))
    return TrigMatrixField(amp, wave, phase)


def random_trig_vector(seed, amplitude=1.0, wavenumber=1.0) -> TrigVectorField:
    rng = np.random.default_rng(seed)
    amp = amplitude * rng.uniform(0.5, 1.0, 3)
    wave = wavenumber * rng.uniform(-1.0, 1.0, (3, 3))
    phase = rng.uniform(0.0, 2.0 * np.pi, 3)
    return TrigVectorField(amp, wave, phase)


_KINDS = ("polynomial", "trigonometric", "rotation-valued")


def make_analytic_field(kind: str, shape: str = "matrix", **params):
    """Factory for the manufactured-field families.

    kind is one of 'polynomial', 'trigonometric' or 'rotation-valued';
    shape selects 'matrix' or 'vector' (rotation fields are matrix-only).
    Remaining keyword arguments are forwarded to the family constructor;
    families named by a seed are deterministic in it.
    """
    if kind not in _KINDS:
        raise UnknownKind(f"unknown analytic field kind {kind!r}; choose from {_KINDS}")
    if shape not in ("matrix", "vector"):
        raise UnknownKind(f"shape must be 'matrix' or 'vector', got {shape!r}")
    if kind == "polynomial":
        if "coeffs" in params:
            cls = PolynomialMatrixField if shape == "matrix" else PolynomialVectorField
            return cls(np.asarray(params["coeffs"], dtype=float),
                       np.asarray(params["exponents"], dtype=int))
        maker = random_polynomial_matrix if shape == "matrix" else random_polynomial_vector
        return maker(**params)
    if kind == "trigonometric":
        if "amplitude" in params and np.ndim(params["amplitude"]) > 0:
            cls = TrigMatrixField if shape == "matrix" else TrigVectorField
            return cls(np.asarray(params["amplitude"], dtype=float),
                       np.asarray(params["wave"], dtype=float),
                       np.asarray(params["phase"], dtype=float))
        maker = random_trig_matrix if shape == "matrix" else random_trig_vector
        return maker(**params)
    if shape != "matrix":
        raise UnknownKind("rotation-valued fields are matrix-valued")
    return RotationMatrixField(**params)
