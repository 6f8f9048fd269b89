"""Transport of boundary data along grid lines for first-order systems.

The systems have the form grad(zeta) = G zeta with zeta prescribed on a
boundary face.  Along any grid line parallel to the last axis the system
restricts to a linear ODE zeta' = G_line zeta, which is integrated with
classic fixed-step RK4.  A Gronwall envelope |zeta(a)| * exp(int |G|)
certifies that zero boundary data forces the zero solution whenever the
coefficient norm is integrable; the envelope machinery also exposes the
failure mode for non-integrable coefficients such as 1/t on (0, 1).

Voxel domains are handled by covering them with overlapping axis-aligned
cuboids grown greedily from a zero seed region, checking each cuboid by
propagation plus a full-system residual.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .errors import (DisconnectedDomain, DimensionMismatch, FaceMismatch,
                     NonFiniteCoefficient, NotIntegrable, SeedOutsideDomain)
from .fields import GridSpec, MatrixField, VectorField, fd_grad

QUAD_VALUE_CAP = 1e6
QUAD_MAX_DEPTH = 40


def operator_norm(matrix) -> float:
    """Max absolute row sum; compatible with the max-abs vector norm."""
    m = np.asarray(matrix, dtype=float)
    return float(np.max(np.sum(np.abs(m), axis=-1)))


def _milne(f, lo, hi):
    # open 3-point Newton-Cotes rule, fourth order, no endpoint evaluations
    length = hi - lo
    f1 = f(lo + 0.25 * length)
    f2 = f(lo + 0.50 * length)
    f3 = f(lo + 0.75 * length)
    return (length / 3.0) * (2.0 * f1 - f2 + 2.0 * f3)


def integrate_norm(f: Callable[[float], float], a: float, b: float, *,
                   value_cap: float = QUAD_VALUE_CAP,
                   max_depth: int = QUAD_MAX_DEPTH,
                   rtol: float = 1e-9):
    """Adaptive dyadic quadrature of a non-negative integrand.

    Uses an open fourth-order rule, so the integrand is never evaluated at
    the interval endpoints and may blow up there.  Returns a pair
    (estimate, divergent); divergent is set when the running value exceeds
    value_cap, or a segment still disagrees at max_depth levels of dyadic
    refinement while contributing more than a negligible sliver.
    """
    if not b > a:
        raise ValueError("need b > a")
    total_len = b - a
    est0 = _milne(f, a, b)
    if not math.isfinite(est0):
        return est0, True
    stack = [(a, b, est0, 0)]
    total = 0.0
    while stack:
        lo, hi, parent, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _milne(f, lo, mid)
        right = _milne(f, mid, hi)
        children = left + right
        if not math.isfinite(children):
            return total + parent, True
        tol = 1e-12 * abs(children) \
            + rtol * ((hi - lo) / total_len) * max(1.0, total)
        if abs(children - parent) <= tol:
            total += children
            if total > value_cap:
                return total, True
            continue
        if depth >= max_depth:
            # a still-disagreeing sliver is absorbed if its whole
            # contribution is below the reporting accuracy; anything larger
            # marks the integral as divergent
            if children <= 1e-5 * max(1.0, total + children):
                total += children
                continue
            return total + children, True
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return total, False


@dataclass(frozen=True)
class IntegrabilityReport:
    """Numeric estimate of the integral of a coefficient norm."""

    estimate: float
    divergent: bool
    value_cap: float
    max_depth: int


@dataclass(frozen=True)
class LineCoefficient:
    """Matrix-valued coefficient t -> G(t) on an interval.

    The sampler must be finite on the open interval; blow-up at the
    endpoints is allowed and is exactly what the integrability report is
    for.  Norms are operator max-row-sum norms.
    """

    sampler: Callable[[float], np.ndarray]
    interval: tuple
    dim: int

    def __post_init__(self):
        a, b = (float(self.interval[0]), float(self.interval[1]))
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        object.__setattr__(self, "interval", (a, b))

    def sample(self, t: float) -> np.ndarray:
        g = np.asarray(self.sampler(t), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"coefficient sample at t={t:g} has shape {g.shape}, expected "
                f"({self.dim}, {self.dim})")
        return g

    def norm_at(self, t: float) -> float:
        return operator_norm(self.sampler(t))

    def integrability_report(self, value_cap: float = QUAD_VALUE_CAP,
                             max_depth: int = QUAD_MAX_DEPTH) -> IntegrabilityReport:
        a, b = self.interval
        estimate, divergent = integrate_norm(self.norm_at, a, b,
                                             value_cap=value_cap, max_depth=max_depth)
        return IntegrabilityReport(float(estimate), bool(divergent),
                                   value_cap, max_depth)

    @classmethod
    def constant(cls, matrix, interval):
        m = np.asarray(matrix, dtype=float)
        return cls(lambda t: m, tuple(interval), m.shape[0])


class GronwallBound:
    """Envelope x -> |zeta(a)| * exp(int_a^x |G|), with cached quadrature.

    Calls raise NotIntegrable when the norm integral diverges on [a, x].
    """

    def __init__(self, coefficient: LineCoefficient, initial_norm: float, *,
                 value_cap: float = QUAD_VALUE_CAP, max_depth: int = QUAD_MAX_DEPTH):
        if initial_norm < 0:
            raise ValueError("initial_norm must be non-negative")
        self.coefficient = coefficient
        self.initial_norm = float(initial_norm)
        self.value_cap = value_cap
        self.max_depth = max_depth
        a, _ = coefficient.interval
        self._xs = [a]
        self._cums = [0.0]

    def cumulative(self, x: float) -> float:
        a, b = self.coefficient.interval
        if not a <= x <= b:
            raise ValueError(f"x={x:g} outside [{a:g}, {b:g}]")
        i = bisect.bisect_right(self._xs, x) - 1
        x0, c0 = self._xs[i], self._cums[i]
        if x == x0:
            return c0
        value, divergent = integrate_norm(self.coefficient.norm_at, x0, x,
                                          value_cap=self.value_cap,
                                          max_depth=self.max_depth)
        if divergent or c0 + value > self.value_cap:
            raise NotIntegrable(
                f"norm integral diverges on [{a:g}, {x:g}] "
                f"(estimate {c0 + value:g}, cap {self.value_cap:g})")
        c = c0 + value
        j = bisect.bisect_left(self._xs, x)
        self._xs.insert(j, x)
        self._cums.insert(j, c)
        return c

    def __call__(self, x: float) -> float:
        c = self.cumulative(x)
        if self.initial_norm == 0.0:
            return 0.0
        try:
            return self.initial_norm * math.exp(c)
        except OverflowError:
            return math.inf


def gronwall_bound(coefficient: LineCoefficient, initial_norm: float,
                   **caps) -> GronwallBound:
    """Bound function for solutions of zeta' = G zeta with |zeta(a)| given."""
    return GronwallBound(coefficient, initial_norm, **caps)


@dataclass(frozen=True)
class Trajectory:
    """RK4 samples of a line solution with step-halving error estimates."""

    times: np.ndarray
    values: np.ndarray
    error_estimates: np.ndarray

    @property
    def final_value(self) -> np.ndarray:
        return self.values[-1]

    @property
    def final_error(self) -> float:
        return float(self.error_estimates[-1])

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _rk4_line(coefficient: LineCoefficient, z0: np.ndarray, n: int) -> np.ndarray:
    a, b = coefficient.interval
    h = (b - a) / n
    out = np.empty((n + 1, z0.shape[0]))
    out[0] = z0
    z = z0.copy()

    def sample(t):
        g = coefficient.sample(t)
        if not np.all(np.isfinite(g)):
            raise NonFiniteCoefficient(f"coefficient sample is not finite at t={t:g}")
        return g

    for k in range(n):
        t = a + k * h
        g1 = sample(t)
        g2 = sample(t + 0.5 * h)
        g4 = sample(t + h)
        k1 = g1 @ z
        k2 = g2 @ (z + 0.5 * h * k1)
        k3 = g2 @ (z + 0.5 * h * k2)
        k4 = g4 @ (z + h * k3)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = z
    return out


def integrate_line(coefficient: LineCoefficient, zeta0, steps: int) -> Trajectory:
    """Fixed-step RK4 for zeta' = G(t) zeta, with a step-halving estimate.

    The returned values use the requested step count; the error estimate at
    each sample is the max-abs gap to a run with half the step size.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    z0 = np.atleast_1d(np.asarray(zeta0, dtype=float))
    if z0.shape != (coefficient.dim,):
        raise DimensionMismatch(
            f"zeta0 has shape {z0.shape}, expected ({coefficient.dim},)")
    a, b = coefficient.interval
    coarse = _rk4_line(coefficient, z0, steps)
    fine = _rk4_line(coefficient, z0, 2 * steps)
    estimates = np.max(np.abs(coarse - fine[::2]), axis=1)
    times = a + (b - a) * np.arange(steps + 1) / steps
    return Trajectory(times, coarse, estimates)


@dataclass(frozen=True)
class CoefficientTensorField:
    """Per-point linear maps from R^N to R^(N x N), indexed [row, col, input]."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.dim
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape + (n, n, n):
            raise ValueError(
                f"tensor values must have shape {self.grid.shape + (n, n, n)}, "
                f"got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("CoefficientTensorField contains non-finite entries")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec):
        n = grid.dim
        return cls(grid, np.zeros(grid.shape + (n, n, n)))

    @classmethod
    def constant(cls, grid: GridSpec, tensor):
        tensor = np.asarray(tensor, dtype=float)
        return cls(grid, np.broadcast_to(tensor, grid.shape + tensor.shape).copy())

    def apply(self, zeta: VectorField) -> MatrixField:
        """Pointwise matrix G(x) zeta(x)."""
        if zeta.grid != self.grid:
            raise DimensionMismatch("zeta must live on the tensor's grid")
        vals = np.einsum("...ijk,...k->...ij", self.values, zeta.values)
        return MatrixField(self.grid, vals)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def propagate_cube(coefficient: CoefficientTensorField, face_data: VectorField,
                   steps: int = 200) -> VectorField:
    """Integrate every grid line parallel to the last axis from face data.

    The face is the side where the last coordinate is smallest.  Along a
    line, the system restricts to zeta' = M(x) zeta with M the last-column
    slice of the coefficient tensor; M is interpolated linearly between grid
    points and all lines advance together with RK4.  The requested total
    step count is rounded up to a whole number of substeps per grid cell so
    samples land exactly on grid points.
    """
    grid = coefficient.grid
    n = grid.dim
    n_last = grid.shape[-1]
    if n_last < 2:
        raise FaceMismatch("propagation needs at least 2 points along the last axis")
    if n == 3:
        expected_face = GridSpec(grid.shape[:-1], grid.origin[:-1], grid.spacing)
        if face_data.grid != expected_face:
            raise FaceMismatch(
                f"face grid {face_data.grid} does not match {expected_face}")
    else:
        # a 2d cuboid's face is a line of points, carried as an (n0, 1) grid
        if face_data.grid.dim != 2 or \
                face_data.grid.shape != (grid.shape[0], 1):
            raise FaceMismatch(
                f"face data must live on ({grid.shape[0]}, 1) points")
    if face_data.components != n:
        raise FaceMismatch(
            f"face data has {face_data.components} components, expected {n}")

    line_ode = coefficient.values[..., :, n - 1, :]  # (*shape, N, N)
    perp = int(np.prod(grid.shape[:-1]))
    line_ode = line_ode.reshape(perp, n_last, n, n)
    states = face_data.values.reshape(perp, n).copy()

    out = np.empty((perp, n_last, n))
    out[:, 0] = states
    substeps = max(1, math.ceil(steps / max(1, n_last - 1)))
    dt = grid.spacing / substeps
    for m in range(n_last - 1):
        a0 = line_ode[:, m]
        a1 = line_ode[:, m + 1]
        for s in range(substeps):
            g1 = a0 + (s / substeps) * (a1 - a0)
            gh = a0 + ((s + 0.5) / substeps) * (a1 - a0)
            g4 = a0 + ((s + 1.0) / substeps) * (a1 - a0)
            k1 = np.einsum("pij,pj->pi", g1, states)
            k2 = np.einsum("pij,pj->pi", gh, states + 0.5 * dt * k1)
            k3 = np.einsum("pij,pj->pi", gh, states + 0.5 * dt * k2)
            k4 = np.einsum("pij,pj->pi", g4, states + dt * k3)
            states = states + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, m + 1] = states
    return VectorField(grid, out.reshape(grid.shape + (n,)))


@dataclass(frozen=True)
class ResidualReport:
    """Interior max-norm of grad(zeta) - G zeta with a per-axis breakdown."""

    max_norm: float
    per_axis: tuple
    tolerance: float
    passed: bool


def system_residual(zeta: VectorField, coefficient: CoefficientTensorField,
                    tol: float = 1e-8) -> ResidualReport:
    """Check the full first-order system, not just the propagated direction."""
    if zeta.grid != coefficient.grid:
        raise DimensionMismatch("zeta and coefficient must share a grid")
    residual = fd_grad(zeta).values - np.einsum(
        "...ijk,...k->...ij", coefficient.values, zeta.values)
    inner = zeta.grid.interior()
    per_axis = tuple(float(np.max(np.abs(residual[inner][..., :, j])))
                     for j in range(zeta.grid.dim))
    max_norm = max(per_axis)
    return ResidualReport(max_norm, per_axis, float(tol), max_norm <= tol)


def ball_mask(grid: GridSpec, center, radius: float) -> np.ndarray:
    """Boolean point mask of a euclidean ball."""
    pts = grid.points()
    center = np.asarray(center, dtype=float)
    return np.linalg.norm(pts - center, axis=-1) <= radius


def cuboid_mask(grid: GridSpec, lo, hi) -> np.ndarray:
    """Boolean point mask of an index cuboid [lo, hi) per axis."""
    mask = np.zeros(grid.shape, dtype=bool)
    mask[tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))] = True
    return mask


@dataclass(frozen=True)
class CuboidRecord:
    """One covering cuboid: bounds are half-open index ranges per axis."""

    bounds: tuple
    axis: int
    direction: int
    face_max: float
    zero_propagation_max: float
    zeta_max: float
    residual: Optional[ResidualReport]
    passed: bool


@dataclass(frozen=True)
class CoverageReport:
    """Outcome of covering a voxel domain by propagation cuboids."""

    cuboids: tuple
    covered_fraction: float
    tolerance: float
    passed: bool
    reason: str

    @property
    def n_cuboids(self) -> int:
        return len(self.cuboids)


def _shifted(mask: np.ndarray, axis: int, direction: int) -> np.ndarray:
    """Mask of points whose neighbor at -direction along axis is set."""
    out = np.zeros_like(mask)
    src = [slice(None)] * mask.ndim
    dst = [slice(None)] * mask.ndim
    if direction > 0:
        src[axis] = slice(0, -1)
        dst[axis] = slice(1, None)
    else:
        src[axis] = slice(1, None)
        dst[axis] = slice(0, -1)
    out[tuple(dst)] = mask[tuple(src)]
    return out


def _orient(values: np.ndarray, spatial_dim: int, axis: int, direction: int,
            is_tensor: bool) -> np.ndarray:
    """Move the propagation axis last (pointing forward); fix tensor columns.

    The derivative-direction index of a coefficient tensor (its middle
    component axis) transforms with the coordinates: it is permuted the same
    way the spatial axes are, and the flipped axis changes sign.  The value
    components themselves are not spatial and stay put.
    """
    if direction < 0:
        values = np.flip(values, axis=axis)
    perm = [k for k in range(spatial_dim) if k != axis] + [axis]
    values = np.moveaxis(values, axis, spatial_dim - 1)
    if is_tensor:
        values = values[..., perm, :]
        if direction < 0:
            sign = np.ones(spatial_dim)
            sign[-1] = -1.0
            values = values * sign[:, None]
    return np.ascontiguousarray(values)


def flood_propagate(domain_mask: np.ndarray, seed, coefficient: CoefficientTensorField,
                    zeta: VectorField, *, tol: Optional[float] = None,
                    residual_tol: float = 1e-8, steps: int = 200,
                    slab: int = 2) -> CoverageReport:
    """Certify zeta == 0 on a voxel domain by a chain of propagation cuboids.

    Starting from a seed region where zeta is verified to vanish, grows
    axis-aligned cuboids that share a face slab with the already-covered
    zero set.  In each cuboid the zero face data is propagated (a direct
    embodiment of line-wise uniqueness), the actual zeta is compared against
    the vanishing tolerance, and the full system residual is evaluated when
    the cuboid is thick enough for interior stencils.
    """
    grid = zeta.grid
    if coefficient.grid != grid:
        raise DimensionMismatch("zeta and coefficient must share a grid")
    domain = np.asarray(domain_mask, dtype=bool)
    if domain.shape != grid.shape:
        raise DimensionMismatch("domain mask shape must match the grid")
    if isinstance(seed, np.ndarray):
        seed_mask = seed.astype(bool)
    else:
        seed_mask = np.zeros(grid.shape, dtype=bool)
        seed_mask[tuple(seed)] = True
    if not seed_mask.any():
        raise SeedOutsideDomain("seed region is empty")
    if np.any(seed_mask & ~domain):
        raise SeedOutsideDomain("seed region leaves the domain mask")
    _, n_components = ndimage.label(domain)
    if n_components != 1:
        raise DisconnectedDomain(f"domain mask has {n_components} components")

    n = grid.dim
    seed_scale = float(np.max(np.abs(zeta.values[seed_mask])))
    if tol is None:
        tol = 1e-10 * (1.0 + seed_scale)

    records = []

    def coverage(covered_mask):
        return float(np.count_nonzero(covered_mask & domain)
                     / np.count_nonzero(domain))

    if seed_scale > tol:
        return CoverageReport((), coverage(seed_mask), float(tol), False,
                              f"seed data is not zero (max {seed_scale:g} > tol {tol:g})")

    covered = seed_mask & domain

    while True:
        uncovered = domain & ~covered
        if not uncovered.any():
            break
        pick = None
        for axis in range(n):
            for direction in (1, -1):
                frontier = uncovered & _shifted(covered, axis, direction)
                if frontier.any():
                    point = tuple(int(c) for c in np.argwhere(frontier)[0])
                    pick = (axis, direction, point)
                    break
            if pick:
                break
        if pick is None:
            # cannot happen on a connected domain with a non-empty seed
            return CoverageReport(tuple(records), coverage(covered), float(tol),
                                  False, "no frontier found on a connected domain")
        axis, direction, point = pick

        bounds = [[c, c + 1] for c in point]
        # base slab: covered layers behind the frontier point
        depth = 0
        while depth < slab:
            nxt = point[axis] - (depth + 1) * direction
            if nxt < 0 or nxt >= grid.shape[axis]:
                break
            probe = list(point)
            probe[axis] = nxt
            if not covered[tuple(probe)]:
                break
            depth += 1
        if direction > 0:
            bounds[axis][0] = point[axis] - depth
        else:
            bounds[axis][1] = point[axis] + depth + 1

        def region(bnds):
            return tuple(slice(lo, hi) for lo, hi in bnds)

        def slab_region(bnds):
            s = list(region(bnds))
            if direction > 0:
                s[axis] = slice(bnds[axis][0], bnds[axis][0] + depth)
            else:
                s[axis] = slice(bnds[axis][1] - depth, bnds[axis][1])
            return tuple(s)

        changed = True
        while changed:
            changed = False
            for ax in range(n):
                for d in (1, -1):
                    if ax == axis and d == -direction:
                        continue  # the base slab already fixes that side
                    trial = [list(pair) for pair in bounds]
                    if d > 0:
                        if trial[ax][1] >= grid.shape[ax]:
                            continue
                        trial[ax][1] += 1
                    else:
                        if trial[ax][0] <= 0:
                            continue
                        trial[ax][0] -= 1
                    if not domain[region(trial)].all():
                        continue
                    if depth > 0 and not covered[slab_region(trial)].all():
                        continue
                    bounds = trial
                    changed = True

        sub = region(bounds)
        zeta_vals = _orient(zeta.values[sub], n, axis, direction, is_tensor=False)
        coef_vals = _orient(coefficient.values[sub], n, axis, direction,
                            is_tensor=True)
        oriented_shape = zeta_vals.shape[:-1]
        sub_grid = GridSpec(oriented_shape, (0.0,) * n, grid.spacing)
        sub_zeta = VectorField(sub_grid, zeta_vals)
        sub_coef = CoefficientTensorField(sub_grid, coef_vals)

        face_max = float(np.max(np.abs(zeta_vals[..., 0, :])))
        zeta_max = float(np.max(np.abs(zeta_vals)))
        if n == 3:
            face_field = VectorField.zeros(sub_grid.face(-1), n)
        else:
            face_field = VectorField(
                GridSpec((oriented_shape[0], 1), (0.0, 0.0), grid.spacing),
                np.zeros((oriented_shape[0], 1, n)))
        if oriented_shape[-1] >= 2:
            zero_prop = propagate_cube(sub_coef, face_field, steps).max_norm()
        else:
            zero_prop = 0.0
        residual = None
        if all(m >= 3 for m in oriented_shape):
            residual = system_residual(sub_zeta, sub_coef, residual_tol)

        passed = (face_max <= tol and zero_prop <= tol and zeta_max <= tol
                  and (residual is None or residual.passed))
        record = CuboidRecord(tuple((lo, hi) for lo, hi in bounds), axis, direction,
                              face_max, zero_prop, zeta_max, residual, passed)
        records.append(record)
        if not passed:
            return CoverageReport(tuple(records), coverage(covered), float(tol),
                                  False,
                                  f"cuboid {len(records) - 1} at {record.bounds} failed")
        covered |= cuboid_mask(grid, [b[0] for b in bounds], [b[1] for b in bounds])

    return CoverageReport(tuple(records), 1.0, float(tol), True,
                          "domain covered; zeta vanishes at tolerance")


@dataclass(frozen=True)
class CounterexampleReport:
    """Three-part demonstration of why coefficient integrability matters.

    Part one: the identity field solves zeta' = zeta / t on [epsilon, 1]
    with zero residual, so zero boundary data at an excluded singular
    endpoint does not force uniqueness by itself.  Part two: 1/t is not
    integrable over (0, 1).  Part three: truncating the coefficient to
    1/max(t, epsilon) restores integrability, and the zero-data solution is
    identically zero.
    """

    epsilon: float
    identity_residual_max: float
    identity_reconstruction_error: float
    full_integral_estimate: float
    full_divergent: bool
    truncated_integral_estimate: float
    truncated_divergent: bool
    truncated_solution_max: float
    truncated_bound_at_one: float
    passed: bool


def counterexample_demo(epsilon: float = 1e-3, steps: int = 1000) -> CounterexampleReport:
    """Run the 1d singular-coefficient demonstration."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")

    # part one: zeta(t) = t against zeta' = (1/t) zeta on [epsilon, 1]
    ts = epsilon + (1.0 - epsilon) * np.arange(steps + 1) / steps
    residual_max = float(np.max(np.abs(1.0 - (1.0 / ts) * ts)))
    line = LineCoefficient(lambda t: np.array([[1.0 / t]]), (epsilon, 1.0), 1)
    traj = integrate_line(line, np.array([epsilon]), steps)
    reconstruction = float(abs(traj.final_value[0] - 1.0))

    # part two: 1/t is not L1 near zero
    full = LineCoefficient(lambda t: np.array([[1.0 / t]]), (0.0, 1.0), 1)
    full_report = full.integrability_report()

    # part three: the truncated coefficient is integrable and zero data stays zero
    truncated = LineCoefficient(
        lambda t: np.array([[1.0 / max(t, epsilon)]]), (0.0, 1.0), 1)
    trunc_report = truncated.integrability_report()
    trunc_traj = integrate_line(truncated, np.array([0.0]), steps)
    trunc_bound = gronwall_bound(truncated, 0.0)(1.0)

    passed = (residual_max <= 1e-12
              and full_report.divergent
              and not trunc_report.divergent
              and trunc_traj.max_norm() <= 1e-10
              and trunc_bound == 0.0)
    return CounterexampleReport(
        epsilon=float(epsilon),
        identity_residual_max=residual_max,
        identity_reconstruction_error=reconstruction,
        full_integral_estimate=full_report.estimate,
        full_divergent=full_report.divergent,
        truncated_integral_estimate=trunc_report.estimate,
        truncated_divergent=trunc_report.divergent,
        truncated_solution_max=float(trunc_traj.max_norm()),
        truncated_bound_at_one=float(trunc_bound),
        passed=bool(passed),
    )
