"""Generalized Korn seminorm, its discrete kernel, and rigid displacements.

The seminorm of a displacement field u with coefficient field P is the
discrete L2 norm of sym(grad(u) P^{-1}).  Displacements live as nodal
values; gradients are the package's second-order finite differences, and
quadrature assigns each node its own cell of volume h^3, so a grid with
n*h = 1 per side integrates over a unit cube.

Whether the seminorm is a norm on boundary-constrained displacements is
probed through the smallest generalized Rayleigh quotient of the assembled
quadratic form against an L2 or H1 Gram matrix.  A near-kernel displacement
is run through the chain that connects the seminorm to a transport system:
its strain-free gradient is A = grad(u) P^{-1}, skew up to discretization,
and the axial vector of A solves grad(zeta) = G_P zeta with G_P built from
L_P^{-1} and curl(P).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import algebra
from .analytic import RotationMatrixField, random_trig_matrix
from .errors import (DeterminantTooSmall, DimensionMismatch, EigensolveFailed,
                     UnknownKind)
from .fields import GridSpec, MatrixField, VectorField, fd_curl_rowwise, fd_grad
from .transport import CoefficientTensorField, ResidualReport, system_residual

_EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS3[_i, _j, _k] = 1.0
    _EPS3[_k, _j, _i] = -1.0


def _sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def _skew(m):
    return 0.5 * (m - np.swapaxes(m, -1, -2))


def _axial(skew):
    return np.stack([skew[..., 2, 1], skew[..., 0, 2], skew[..., 1, 0]], axis=-1)


def boundary_mask(grid: GridSpec) -> np.ndarray:
    """Points with at least one extremal index."""
    mask = np.zeros(grid.shape, dtype=bool)
    for ax in range(grid.dim):
        idx = [slice(None)] * grid.dim
        idx[ax] = 0
        mask[tuple(idx)] = True
        idx[ax] = -1
        mask[tuple(idx)] = True
    return mask


def face_mask(grid: GridSpec, axis: int = 0, side: int = 0) -> np.ndarray:
    """Boolean mask of one full boundary face."""
    mask = np.zeros(grid.shape, dtype=bool)
    idx = [slice(None)] * grid.dim
    idx[axis] = 0 if side == 0 else -1
    mask[tuple(idx)] = True
    return mask


@dataclass(frozen=True)
class KornProblem:
    """Grid, coefficient field P, clamped boundary patch, determinant floor.

    gamma_mask marks the boundary points where displacements are pinned to
    zero; it must be non-empty and must only touch boundary points.  Passing
    None selects the deliberately unconstrained variant used for kernel
    experiments.
    """

    grid: GridSpec
    P: MatrixField
    gamma_mask: Optional[np.ndarray]
    min_det: float = algebra.DEFAULT_MIN_DET

    def __post_init__(self):
        if self.grid.dim != 3:
            raise DimensionMismatch("Korn problems are three-dimensional")
        if self.P.grid != self.grid:
            raise ValueError("P must live on the problem grid")
        dets = np.linalg.det(self.P.values)
        if np.any(dets < self.min_det):
            raise DeterminantTooSmall(
                f"det P reaches {float(dets.min()):g}, floor is {self.min_det:g}")
        if self.gamma_mask is not None:
            mask = np.asarray(self.gamma_mask, dtype=bool)
            if mask.shape != self.grid.shape:
                raise ValueError("gamma mask shape must match the grid")
            if not mask.any():
                raise ValueError("gamma mask must be non-empty; use None for the "
                                 "unconstrained variant")
            if np.any(mask & ~boundary_mask(self.grid)):
                raise ValueError("gamma mask may only mark boundary points")
            object.__setattr__(self, "gamma_mask", mask)


def seminorm(u: VectorField, P: MatrixField,
             min_det: float = algebra.DEFAULT_MIN_DET) -> float:
    """Discrete L2 norm of sym(grad(u) P^{-1}), nodal cells of volume h^3."""
    if u.grid != P.grid:
        raise DimensionMismatch("u and P must share a grid")
    dets = np.linalg.det(P.values)
    if np.any(dets < min_det):
        raise DeterminantTooSmall(
            f"det P reaches {float(dets.min()):g}, floor is {min_det:g}")
    p_inv = np.linalg.inv(P.values)
    strain = _sym(fd_grad(u).values @ p_inv)
    h = u.grid.spacing
    return float(math.sqrt(h ** u.grid.dim * np.sum(strain * strain)))


def _d1_sparse(n: int, h: float) -> sp.csr_matrix:
    d = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        d[i, i - 1] = -0.5 / h
        d[i, i + 1] = 0.5 / h
    d[0, 0], d[0, 1], d[0, 2] = -1.5 / h, 2.0 / h, -0.5 / h
    d[n - 1, n - 1], d[n - 1, n - 2], d[n - 1, n - 3] = 1.5 / h, -2.0 / h, 0.5 / h
    return d.tocsr()


def _gradient_operators(grid: GridSpec):
    """Sparse nodal derivative operators D_k on scalar point fields."""
    h = grid.spacing
    eyes = [sp.identity(n, format="csr") for n in grid.shape]
    ds = [_d1_sparse(n, h) for n in grid.shape]
    return [
        sp.kron(sp.kron(ds[0], eyes[1]), eyes[2], format="csr"),
        sp.kron(sp.kron(eyes[0], ds[1]), eyes[2], format="csr"),
        sp.kron(sp.kron(eyes[0], eyes[1]), ds[2], format="csr"),
    ]


@dataclass(frozen=True)
class DiscreteForm:
    """Constrained quadratic form of the seminorm, with companion Grams."""

    operator: sp.csr_matrix
    gram_l2: sp.csr_matrix
    gram_h1: sp.csr_matrix
    free: np.ndarray
    grid: GridSpec

    @property
    def n_dofs(self) -> int:
        return self.operator.shape[0]

    def gram(self, which: str) -> sp.csr_matrix:
        if which == "l2":
            return self.gram_l2
        if which == "h1":
            return self.gram_h1
        raise ValueError("gram must be 'l2' or 'h1'")

    def apply(self, u: VectorField) -> float:
        """Evaluate the form on a displacement field (clamped values dropped)."""
        flat = u.values.reshape(-1)[self.free]
        return float(flat @ (self.operator @ flat))

    def embed(self, vec: np.ndarray) -> VectorField:
        """Lift a constrained DOF vector back to a grid field, zeros on the clamp."""
        full = np.zeros(self.free.shape[0])
        full[self.free] = vec
        return VectorField(self.grid, full.reshape(self.grid.shape + (3,)))


def assemble_form(problem: KornProblem) -> DiscreteForm:
    """Assemble the seminorm-squared form and the L2 and H1 Gram matrices.

    DOFs are nodal displacement components ordered point-major; clamped
    points are eliminated.  The form is B^T B scaled by the cell volume, so
    it is symmetric non-negative by construction.
    """
    grid = problem.grid
    npts = grid.num_points
    h = grid.spacing
    d_ops = _gradient_operators(grid)
    unit_rows = [sp.csr_matrix((np.ones(1), ([0], [i])), shape=(1, 3)) for i in range(3)]
    # grad_op[i][k]: (npts, 3 npts) operator for d_k u_i
    grad_op = [[sp.kron(d_ops[k], unit_rows[i], format="csr") for k in range(3)]
               for i in range(3)]

    p_inv = np.linalg.inv(problem.P.values).reshape(npts, 3, 3)
    m_ops = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            acc = None
            for k in range(3):
                term = sp.diags(p_inv[:, k, j]) @ grad_op[i][k]
                acc = term if acc is None else acc + term
            m_ops[i][j] = acc
    blocks = []
    for i in range(3):
        for j in range(3):
            blocks.append(0.5 * (m_ops[i][j] + m_ops[j][i]))
    b = sp.vstack(blocks, format="csr")
    operator = (h ** 3) * (b.T @ b)
    operator = 0.5 * (operator + operator.T)

    grad_stack = sp.vstack([grad_op[i][k] for i in range(3) for k in range(3)],
                           format="csr")
    eye = sp.identity(3 * npts, format="csr")
    gram_l2 = (h ** 3) * eye
    gram_h1 = (h ** 3) * (eye + grad_stack.T @ grad_stack)
    gram_h1 = 0.5 * (gram_h1 + gram_h1.T)

    if problem.gamma_mask is None:
        free = np.ones(3 * npts, dtype=bool)
    else:
        free = ~np.repeat(problem.gamma_mask.reshape(-1), 3)

    def restrict(m):
        return m.tocsr()[free][:, free].tocsr()

    return DiscreteForm(restrict(operator), restrict(gram_l2), restrict(gram_h1),
                        free, grid)


@dataclass(frozen=True)
class RayleighResult:
    """Smallest generalized eigenpair of (form, gram) plus kernel census."""

    lambda_min: float
    eigenvector: VectorField
    eigenvalues: np.ndarray
    kernel_dim: int
    kernel_threshold: float
    gram: str
    dense: bool


def min_rayleigh(form: DiscreteForm, gram: str = "l2", *, dense_cap: int = 6000,
                 n_eigs: int = 12) -> RayleighResult:
    """Smallest Rayleigh quotient of the form against the chosen Gram.

    Dense symmetric-definite solve up to dense_cap DOFs, shift-and-invert
    Lanczos above.  Eigenvalues below 1e-10 * trace(form)/DOFs count as
    kernel; for the iterative path the census only sees the computed batch.
    """
    n = form.n_dofs
    m = form.gram(gram)
    threshold = 1e-10 * float(form.operator.diagonal().sum()) / max(n, 1)
    try:
        if n <= dense_cap:
            w, v = scipy.linalg.eigh(form.operator.toarray(), m.toarray())
            dense = True
        else:
            scale = float(form.operator.diagonal().max())
            w, v = spla.eigsh(form.operator, k=min(n_eigs, n - 1), M=m,
                              sigma=-1e-6 * max(scale, 1.0), which="LM")
            order = np.argsort(w)
            w, v = w[order], v[:, order]
            dense = False
    except Exception as exc:  # arpack / lapack failures
        raise EigensolveFailed(str(exc)) from exc
    kernel_dim = int(np.count_nonzero(w < threshold))
    vec = v[:, 0]
    peak = np.max(np.abs(vec))
    if peak > 0:
        vec = vec / peak
    kept = np.asarray(w[:min(len(w), 32)], dtype=float)
    return RayleighResult(float(w[0]), form.embed(vec), kept, kernel_dim,
                          float(threshold), gram, dense)


def build_gp(P: MatrixField, curl_p: Optional[MatrixField] = None,
             min_det: float = algebra.DEFAULT_MIN_DET) -> CoefficientTensorField:
    """Coefficient tensor of the transport system satisfied by axial vectors.

    Per point the linear map is zeta -> -mat(L_P^{-1} vec(smat(zeta) curl P));
    it vanishes wherever curl P does, and L_P is invertible because det P is
    bounded below.
    """
    grid = P.grid
    if grid.dim != 3:
        raise DimensionMismatch("the coefficient tensor is three-dimensional")
    dets = np.linalg.det(P.values)
    if np.any(dets < min_det):
        raise DeterminantTooSmall(
            f"det P reaches {float(dets.min()):g}, floor is {min_det:g}")
    if curl_p is None:
        curl_p = fd_curl_rowwise(P)
    elif curl_p.grid != grid:
        raise ValueError("curl_p must live on the grid of P")
    l_full = algebra.build_l_operators(P.values).full
    l_inv = np.linalg.inv(l_full)
    x9 = np.einsum("imk,...kj->...ijm", _EPS3, curl_p.values)
    x9 = x9.reshape(grid.shape + (9, 3))
    m9 = -np.einsum("...pq,...qm->...pm", l_inv, x9)
    return CoefficientTensorField(grid, m9.reshape(grid.shape + (3, 3, 3)))


@dataclass(frozen=True)
class KernelDiagnostics:
    """Trace of the seminorm-to-transport chain on one displacement."""

    skewness_residual: float
    zeta: VectorField
    zeta_gamma_max: Optional[float]
    transport_residual: ResidualReport
    boundary_condition_missing: bool


def kernel_vector_diagnostics(problem: KornProblem, u: VectorField,
                              residual_tol: float = 1e-8) -> KernelDiagnostics:
    """Follow a candidate kernel displacement through the transport chain."""
    if u.grid != problem.grid:
        raise DimensionMismatch("u must live on the problem grid")
    p_inv = np.linalg.inv(problem.P.values)
    a_field = fd_grad(u).values @ p_inv
    skewness = float(np.max(np.abs(_sym(a_field))))
    zeta = VectorField(problem.grid, _axial(_skew(a_field)))
    gp = build_gp(problem.P, min_det=problem.min_det)
    residual = system_residual(zeta, gp, residual_tol)
    if problem.gamma_mask is None:
        gamma_max = None
        missing = True
    else:
        gamma_max = float(np.max(np.abs(zeta.values[problem.gamma_mask])))
        missing = False
    return KernelDiagnostics(skewness, zeta, gamma_max, residual, missing)


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of probing whether the seminorm is a norm at this resolution."""

    lambda_min: float
    kernel_threshold: float
    kernel_dim: int
    kernel_found: bool
    gram: str
    diagnostics: Optional[KernelDiagnostics]
    diagnosis: str


def norm_property_probe(problem: KornProblem, gram: str = "l2", *,
                        dense_cap: int = 6000,
                        residual_tol: float = 1e-8) -> ProbeReport:
    """Eigen-probe the constrained form; dissect any kernel vector found."""
    form = assemble_form(problem)
    ray = min_rayleigh(form, gram, dense_cap=dense_cap)
    kernel_found = ray.lambda_min < ray.kernel_threshold
    if not kernel_found:
        return ProbeReport(ray.lambda_min, ray.kernel_threshold, ray.kernel_dim,
                           False, gram, None,
                           "smallest Rayleigh quotient is positive: the seminorm "
                           "is a norm on the constrained space at this resolution")
    diag = kernel_vector_diagnostics(problem, ray.eigenvector, residual_tol)
    if diag.boundary_condition_missing:
        message = ("kernel displacement found; its axial vector solves the "
                   "transport system but no boundary condition pins it down "
                   "(no clamped patch), so uniqueness cannot engage")
    elif diag.zeta_gamma_max is not None and diag.transport_residual.passed:
        message = ("kernel displacement found although the transport chain is "
                   "consistent; boundary trace of the axial vector is "
                   f"{diag.zeta_gamma_max:.3e}")
    else:
        message = ("kernel displacement found; the transport identity fails at "
                   "this resolution, pointing at discretization error")
    return ProbeReport(ray.lambda_min, ray.kernel_threshold, ray.kernel_dim,
                       True, gram, diag, message)


@dataclass(frozen=True)
class RigidRecovery:
    """Constant skew map and translation recovered from two configurations."""

    rotation: algebra.SkewMat3
    translation: np.ndarray
    skewness_residual: float
    constancy_residual: float
    reconstruction_residual: float


def rigid_recover(phi: VectorField, psi: VectorField,
                  min_det: float = algebra.DEFAULT_MIN_DET) -> RigidRecovery:
    """Recover A and a with phi ~= A psi + a from pointwise gradient ratios.

    A(x) = grad(phi) grad(psi)^{-1} should be skew and constant when phi is
    an infinitesimal rigid displacement of psi; the residuals report how far
    the sampled fields are from that ideal.
    """
    if phi.grid != psi.grid:
        raise DimensionMismatch("phi and psi must share a grid")
    grad_phi = fd_grad(phi).values
    grad_psi = fd_grad(psi).values
    dets = np.linalg.det(grad_psi)
    if np.any(dets < min_det):
        raise DeterminantTooSmall(
            f"det grad(psi) reaches {float(dets.min()):g}, floor is {min_det:g}")
    a_field = grad_phi @ np.linalg.inv(grad_psi)
    skewness = float(np.max(np.abs(_sym(a_field))))
    spatial = tuple(range(phi.grid.dim))
    a_bar = a_field.mean(axis=spatial)
    rotation = algebra.SkewMat3(_axial(_skew(a_bar)))
    constancy = float(np.max(np.abs(a_field - rotation.matrix)))
    mapped = np.einsum("ij,...j->...i", rotation.matrix, psi.values)
    translation = (phi.values - mapped).mean(axis=spatial)
    reconstruction = float(np.max(np.abs(phi.values - mapped - translation)))
    return RigidRecovery(rotation, translation, skewness, constancy, reconstruction)


def sym_conjugation_sides(grad_phi, grad_psi):
    """Both sides of the strain conjugation identity, batched.

    Left: F_psi^{-T} sym(F_phi^T F_psi) F_psi^{-1}; right: sym(F_phi F_psi^{-1}).
    They agree identically for invertible F_psi.
    """
    f_phi = np.asarray(grad_phi, dtype=float)
    f_psi = np.asarray(grad_psi, dtype=float)
    inv = np.linalg.inv(f_psi)
    inv_t = np.swapaxes(inv, -1, -2)
    lhs = inv_t @ _sym(np.swapaxes(f_phi, -1, -2) @ f_psi) @ inv
    rhs = _sym(f_phi @ inv)
    return lhs, rhs


def sym_conjugation_residual(grad_phi, grad_psi) -> float:
    lhs, rhs = sym_conjugation_sides(grad_phi, grad_psi)
    return float(np.max(np.abs(lhs - rhs)))


def builtin_p_field(name: str, grid: GridSpec, **params) -> MatrixField:
    """Built-in coefficient families: identity, rotation-valued, graded-roughness.

    The graded-roughness family is identity plus a seeded trigonometric
    perturbation whose wavenumber acts as the roughness knob; amplitudes are
    kept small enough that the determinant floor stays safe.
    """
    if name == "identity":
        return MatrixField.constant(grid, np.eye(3))
    if name == "rotation-valued":
        field = RotationMatrixField(
            axis=params.get("axis", (0.0, 0.0, 1.0)),
            base=params.get("base", 0.3),
            lin=params.get("lin", (0.4, 0.2, 0.1)),
            amp=params.get("amp", 0.0),
            freq=params.get("freq", (0.0, 0.0, 0.0)),
            phase=params.get("phase", 0.0))
        return field.sample(grid)
    if name == "graded-roughness":
        amplitude = float(params.get("amplitude", 0.1))
        frequency = float(params.get("frequency", 1.0))
        seed = int(params.get("seed", 0))
        min_det = float(params.get("min_det", 0.1))
        trig = random_trig_matrix(seed, amplitude=amplitude, wavenumber=frequency)
        values = np.broadcast_to(np.eye(3), grid.shape + (3, 3)) + trig.value(grid.points())
        dets = np.linalg.det(values)
        if np.any(dets < min_det):
            raise DeterminantTooSmall(
                f"graded-roughness field dips to det {float(dets.min()):g}; "
                f"reduce the amplitude")
        return MatrixField(grid, values)
    raise UnknownKind(f"unknown coefficient family {name!r}")


@dataclass(frozen=True)
class SweepPoint:
    frequency: float
    lambda_min: float
    kernel_dim: int


@dataclass(frozen=True)
class RoughnessSweep:
    """Trend of the smallest Rayleigh quotient against coefficient roughness.

    Numerical evidence only: a monotone trend at fixed resolution neither
    proves nor refutes anything about the continuum problem.
    """

    points: tuple
    amplitude: float
    gram: str
    note: str = "numerical evidence only, not a proof"


def sweep_roughness(grid: GridSpec, gamma_mask, frequencies, *, amplitude: float = 0.1,
                    seed: int = 0, gram: str = "l2",
                    dense_cap: int = 6000) -> RoughnessSweep:
    """Sweep the graded-roughness family and record lambda_min per frequency."""
    points = []
    for freq in frequencies:
        p = builtin_p_field("graded-roughness", grid, amplitude=amplitude,
                            frequency=float(freq), seed=seed)
        problem = KornProblem(grid, p, gamma_mask)
        ray = min_rayleigh(assemble_form(problem), gram, dense_cap=dense_cap)
        points.append(SweepPoint(float(freq), ray.lambda_min, ray.kernel_dim))
    return RoughnessSweep(tuple(points), float(amplitude), gram)
