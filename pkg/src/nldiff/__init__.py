"""Numerical toolkit for the non-local diffusion equation u_t = J*u - u.

Kernels, exponential-moment Hamiltonians, Legendre-Fenchel conjugates,
boundary-deviation rate functions, a 1-D Dirichlet solver and a
convergence-study harness with a CLI front end (``nldiff``).
"""

from .errors import (ConjugateError, DomainError, InstabilityError,
                     NldiffError, QuadratureError, ResolutionError,
                     UnsupportedKernel)
from .hamiltonian import (HamiltonianDomain, HamiltonianEval, domain,
                          h_value, h_value_levy, ham_eval)
from .kernels import (Family, Kernel, critical_exp, custom_from_csv,
                      custom_from_table, evaluate, gaussian, kernel_samples,
                      mass, polynomial_compact, singular_compact,
                      stretched_exp, tail_mass, uniform_compact)
from .legendre import (AsymptoticLaw, LegendrePoint, asymptotic_ratio,
                       conjugate, law_prediction, sandwich_check)
from .ratefn import BoundPrediction, bound, rate, rate_capped
from .solver import (ConvolutionOperator, Field, Grid, SolveConfig, convolve,
                     default_dt, default_spacing, deviation_solution,
                     integrate, make_grid, read_field_csv, reference_solution,
                     write_field_csv)
from .study import (DeviationReport, StudyConfig, StudyRow,
                    extract_rate_profile, profile_from_deviation, run_study)

__version__ = "0.1.0"

__all__ = [
    "NldiffError", "DomainError", "QuadratureError", "ConjugateError",
    "UnsupportedKernel", "ResolutionError", "InstabilityError",
    "Family", "Kernel", "uniform_compact", "polynomial_compact", "gaussian",
    "stretched_exp", "critical_exp", "singular_compact", "custom_from_table",
    "custom_from_csv", "evaluate", "mass", "tail_mass", "kernel_samples",
    "HamiltonianEval", "HamiltonianDomain", "h_value", "h_value_levy",
    "domain", "ham_eval",
    "LegendrePoint", "AsymptoticLaw", "conjugate", "law_prediction",
    "asymptotic_ratio", "sandwich_check",
    "BoundPrediction", "rate", "rate_capped", "bound",
    "Grid", "Field", "SolveConfig", "make_grid", "default_spacing",
    "default_dt", "ConvolutionOperator", "convolve", "integrate",
    "deviation_solution", "reference_solution", "write_field_csv",
    "read_field_csv",
    "StudyConfig", "StudyRow", "DeviationReport", "run_study",
    "extract_rate_profile", "profile_from_deviation",
    "__version__",
]
