"""Regular-grid vector and matrix fields on cuboids, with finite differences.

Grids are uniform with spacing h on every axis.  Gradients use second-order
central stencils in the interior and second-order one-sided stencils on the
boundary faces, so differentiating any polynomial of per-axis degree <= 2 is
exact up to roundoff.  The row-wise curl of a matrix field applies the usual
vector curl to each row.

Verification of the curl-of-product identity compares the finite-difference
curl of X @ Y against the pointwise formula fed with finite-difference entry
gradients; on smooth data the interior discrepancy shrinks like h**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import DimensionMismatch, GridTooSmall

POINT_CAP = 2 ** 24


@dataclass(frozen=True)
class GridSpec:
    """Uniform point grid over an axis-aligned cuboid in 2 or 3 dimensions."""

    shape: tuple
    origin: tuple
    spacing: float

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        origin = tuple(float(c) for c in self.origin)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", float(self.spacing))
        if len(shape) not in (2, 3):
            raise DimensionMismatch(f"grid dimension must be 2 or 3, got {len(shape)}")
        if len(origin) != len(shape):
            raise ValueError("origin length must match grid dimension")
        if any(n < 1 for n in shape):
            raise ValueError("grid shape entries must be positive")
        if self.spacing <= 0.0:
            raise ValueError("grid spacing must be positive")
        if self.num_points > POINT_CAP:
            raise ValueError(f"grid has {self.num_points} points, cap is {POINT_CAP}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def num_points(self) -> int:
        return int(np.prod(self.shape))

    def axes(self):
        """Per-axis coordinate arrays."""
        return tuple(self.origin[k] + self.spacing * np.arange(self.shape[k])
                     for k in range(self.dim))

    def points(self) -> np.ndarray:
        """All grid points, shape (*shape, dim)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def refine(self) -> "GridSpec":
        """Halve the spacing, keeping the same cuboid: n points become 2n-1."""
        return GridSpec(tuple(2 * n - 1 for n in self.shape), self.origin,
                        self.spacing / 2.0)

    def face(self, axis: int = -1, side: int = 0) -> "GridSpec":
        """The (dim-1)-grid of the face where the given axis is extremal."""
        axis = axis % self.dim
        shape = tuple(n for k, n in enumerate(self.shape) if k != axis)
        origin = tuple(c for k, c in enumerate(self.origin) if k != axis)
        if len(shape) < 2:
            raise DimensionMismatch("face grids are only defined for 3d grids")
        del side  # the face grid geometry is the same on both sides
        return GridSpec(shape, origin, self.spacing)

    def interior(self):
        """Slices selecting interior points on every axis."""
        return tuple(slice(1, -1) for _ in range(self.dim))


def _check_values(grid, values, trailing, name):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape + trailing:
        raise ValueError(
            f"{name} values must have shape {grid.shape + trailing}, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} contains non-finite entries")
    return values


@dataclass(frozen=True)
class VectorField:
    """Per-point real vectors on a grid; component count may differ from dim."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != self.grid.dim + 1:
            raise ValueError("vector field values must have one component axis")
        values = _check_values(self.grid, values, values.shape[-1:], "VectorField")
        object.__setattr__(self, "values", values)

    @property
    def components(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def zeros(cls, grid, components=None):
        m = grid.dim if components is None else components
        return cls(grid, np.zeros(grid.shape + (m,)))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, np.asarray(fn(grid.points()), dtype=float))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class MatrixField:
    """Per-point square dim x dim matrices on a grid."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.dim
        values = _check_values(self.grid, np.asarray(self.values, dtype=float),
                               (n, n), "MatrixField")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid, matrix):
        matrix = np.asarray(matrix, dtype=float)
        return cls(grid, np.broadcast_to(matrix, grid.shape + matrix.shape).copy())

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, np.asarray(fn(grid.points()), dtype=float))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def _require_stencil_room(grid):
    if any(n < 3 for n in grid.shape):
        raise GridTooSmall(f"need >= 3 points per axis for derivatives, shape {grid.shape}")


def _diff(values, grid, axis):
    # np.gradient with edge_order=2: central interior, 3-point one-sided edges
    return np.gradient(values, grid.spacing, axis=axis, edge_order=2)


def fd_grad(f: VectorField) -> MatrixField:
    """Jacobian of a vector field: row i of the result is the gradient of f_i."""
    grid = f.grid
    _require_stencil_room(grid)
    if f.components != grid.dim:
        raise DimensionMismatch(
            f"fd_grad needs {grid.dim} components on a {grid.dim}d grid, got {f.components}")
    n = grid.dim
    out = np.empty(grid.shape + (n, n))
    for i in range(n):
        for j in range(n):
            out[..., i, j] = _diff(f.values[..., i], grid, j)
    return MatrixField(grid, out)


def fd_entry_gradients(m: MatrixField) -> np.ndarray:
    """Gradients of all nine entries of a 3d matrix field, vec-ordered.

    Returns shape (*grid.shape, 9, 3): slot k holds the spatial gradient of
    entry vec(M)[k], ready for the pointwise curl-of-product formula.
    """
    grid = m.grid
    _require_stencil_room(grid)
    if grid.dim != 3:
        raise DimensionMismatch("entry gradients are defined for 3d matrix fields")
    out = np.empty(grid.shape + (9, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                out[..., 3 * i + j, k] = _diff(m.values[..., i, j], grid, k)
    return out


def fd_curl_rowwise(m: MatrixField) -> MatrixField:
    """Row-wise curl of a 3d matrix field."""
    grid = m.grid
    if grid.dim != 3:
        raise DimensionMismatch("row-wise curl requires a 3d grid")
    _require_stencil_room(grid)
    out = np.empty_like(m.values)
    for l in range(3):
        row = m.values[..., l, :]
        d = [[_diff(row[..., c], grid, ax) for c in range(3)] for ax in range(3)]
        out[..., l, 0] = d[1][2] - d[2][1]
        out[..., l, 1] = d[2][0] - d[0][2]
        out[..., l, 2] = d[0][1] - d[1][0]
    return MatrixField(grid, out)


@dataclass(frozen=True)
class ConvergenceReport:
    """Max-norm errors across grids refined by spacing halving."""

    spacings: tuple
    max_errors: tuple

    def __post_init__(self):
        spacings = tuple(float(h) for h in self.spacings)
        errors = tuple(float(e) for e in self.max_errors)
        if len(spacings) != len(errors) or not spacings:
            raise ValueError("need one error per spacing")
        for a, b in zip(spacings, spacings[1:]):
            if not math.isclose(a / b, 2.0, rel_tol=1e-9):
                raise ValueError("spacings must refine by exact factors of 2")
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "max_errors", errors)

    @property
    def orders(self) -> tuple:
        """Observed order log2(err(h) / err(h/2)) per refinement step."""
        out = []
        for e0, e1 in zip(self.max_errors, self.max_errors[1:]):
            if e1 == 0.0:
                out.append(float("inf"))
            else:
                out.append(math.log2(e0 / e1))
        return tuple(out)

    @property
    def min_order(self) -> float:
        orders = self.orders
        return min(orders) if orders else float("nan")


def refinement_errors(error_fn, base_grid: GridSpec, levels: int = 2) -> ConvergenceReport:
    """Evaluate a grid-indexed error functional on successively refined grids."""
    if levels < 1:
        raise ValueError("need at least one level")
    grid = base_grid
    spacings, errors = [], []
    for _ in range(levels):
        spacings.append(grid.spacing)
        errors.append(float(error_fn(grid)))
        grid = grid.refine()
    return ConvergenceReport(tuple(spacings), tuple(errors))


def curl_product_discrepancy(x: MatrixField, y: MatrixField,
                             curl_y_exact: MatrixField | None = None) -> float:
    """Interior max-norm gap between FD curl(X @ Y) and the pointwise formula."""
    if x.grid != y.grid:
        raise DimensionMismatch("X and Y must share a grid")
    if x.grid.dim != 3:
        raise DimensionMismatch("the curl-of-product identity lives on 3d grids")
    grid = x.grid
    product = MatrixField(grid, x.values @ y.values)
    lhs = fd_curl_rowwise(product)
    curl_y = curl_y_exact if curl_y_exact is not None else fd_curl_rowwise(y)
    if curl_y.grid != grid:
        raise DimensionMismatch("curl_y_exact must live on the same grid")
    grad_x = fd_entry_gradients(x)
    rhs = algebra.curl_product_pointwise(grad_x, x.values, y.values, curl_y.values)
    inner = grid.interior()
    return float(np.max(np.abs(lhs.values[inner] - rhs[inner])))


def verify_curl_product(x: MatrixField, y: MatrixField,
                        curl_y_exact: MatrixField | None = None) -> ConvergenceReport:
    """Single-grid verification of the curl-of-product identity."""
    err = curl_product_discrepancy(x, y, curl_y_exact)
    return ConvergenceReport((x.grid.spacing,), (err,))
