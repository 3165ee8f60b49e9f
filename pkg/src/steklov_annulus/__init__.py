"""Steklov spectrum of conformal annuli: closed-form branches, crossing
times, suprema, sharp bands, a Fourier-Galerkin solver for non-constant
boundary weights, and the associated free-boundary minimal surfaces."""

from .errors import (
    SteklovError,
    DomainError,
    NumericalError,
    NoCrossing,
    NotSPD,
)
from .spectral import (
    INFINITE_T,
    Family,
    MetricShape,
    shape,
    shape_from_boundary_lengths,
    BranchValue,
    SpectrumEntry,
    eval_lambda,
    eval_mu,
    branch_derivative_T,
    branch_derivative_beta,
    enumerate_spectrum,
    raw_sigma,
    sigma_k_grid,
    eigenfunction_offsets,
)
from .crossings import (
    alpha_from_beta,
    CrossingQuery,
    crossing_time,
    crossing_value,
    crossing_residual,
    t20_of_one,
    tk1_of_one,
    f_beta_monotone_witness,
)
from .suprema import (
    SupremumResult,
    PartitionCase,
    supremum,
    sigma_upper_bound,
    scan_suprema,
)
from .galerkin import (
    FourierSeries,
    BoundaryWeight,
    weight_from_dict,
    load_weight,
    save_weight,
    counterexample_weight,
    GalerkinSystem,
    assemble,
    solve_spectrum,
    solve_with_auto_truncation,
    QuadraticFormReport,
    matrix_A,
    comparison_check_T_large,
    comparison_check_orthogonal,
    counterexample_scan,
)
from .surfaces import (
    SurfaceSample,
    critical_half_range,
    sample_surface,
    free_boundary_residual,
    boundary_sphere_radii,
    discrete_minimality_residual,
    immersion_consistency,
    export_mesh,
    load_mesh_json,
)
from .linalg import active_backend

__version__ = "0.1.0"

__all__ = [
    "SteklovError",
    "DomainError",
    "NumericalError",
    "NoCrossing",
    "NotSPD",
    "INFINITE_T",
    "Family",
    "MetricShape",
    "shape",
    "shape_from_boundary_lengths",
    "BranchValue",
    "SpectrumEntry",
    "eval_lambda",
    "eval_mu",
    "branch_derivative_T",
    "branch_derivative_beta",
    "enumerate_spectrum",
    "raw_sigma",
    "sigma_k_grid",
    "eigenfunction_offsets",
    "alpha_from_beta",
    "CrossingQuery",
    "crossing_time",
    "crossing_value",
    "crossing_residual",
    "t20_of_one",
    "tk1_of_one",
    "f_beta_monotone_witness",
    "SupremumResult",
    "PartitionCase",
    "supremum",
    "sigma_upper_bound",
    "scan_suprema",
    "FourierSeries",
    "BoundaryWeight",
    "weight_from_dict",
    "load_weight",
    "save_weight",
    "counterexample_weight",
    "GalerkinSystem",
    "assemble",
    "solve_spectrum",
    "solve_with_auto_truncation",
    "QuadraticFormReport",
    "matrix_A",
    "comparison_check_T_large",
    "comparison_check_orthogonal",
    "counterexample_scan",
    "SurfaceSample",
    "critical_half_range",
    "sample_surface",
    "free_boundary_residual",
    "boundary_sphere_radii",
    "discrete_minimality_residual",
    "immersion_consistency",
    "export_mesh",
    "load_mesh_json",
    "active_backend",
    "__version__",
]
