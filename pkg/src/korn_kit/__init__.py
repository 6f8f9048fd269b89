"""Desk-scale numerical toolkit for matrix-curl identities, unique-continuation
transport of boundary data, and generalized Korn seminorms."""

from .algebra import (LOperators, SkewMat3, axl, build_l_operators,
                      curl_product_pointwise, curl_product_skew_pointwise, dvec,
                      invert_l, mat_of_vec, skewvec, smat, symvec, vec_of_mat)
from .analytic import make_analytic_field
from .errors import (ConfigError, DeterminantTooSmall, DimensionMismatch,
                     DisconnectedDomain, EigensolveFailed, FaceMismatch,
                     GridTooSmall, KornKitError, NonFiniteCoefficient,
                     NotIntegrable, SeedOutsideDomain, UnknownKind)
from .fields import (ConvergenceReport, GridSpec, MatrixField, VectorField,
                     curl_product_discrepancy, fd_curl_rowwise,
                     fd_entry_gradients, fd_grad, refinement_errors,
                     verify_curl_product)
from .fieldio import load_field, load_field_csv, save_field, save_field_csv
from .korn import (DiscreteForm, KornProblem, ProbeReport, RayleighResult,
                   RigidRecovery, assemble_form, build_gp, builtin_p_field,
                   face_mask, kernel_vector_diagnostics, min_rayleigh,
                   norm_property_probe, rigid_recover, seminorm,
                   sweep_roughness, sym_conjugation_residual,
                   sym_conjugation_sides)
from .transport import (CoefficientTensorField, CoverageReport,
                        CounterexampleReport, GronwallBound, IntegrabilityReport,
                        LineCoefficient, ResidualReport, Trajectory, ball_mask,
                        counterexample_demo, cuboid_mask, flood_propagate,
                        gronwall_bound, integrate_line, integrate_norm,
                        propagate_cube, system_residual)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
