"""Polynomial approximation of spectral abscissae under parameter uncertainty."""

from .approx import (ApproxConfig, ErrorRecord, MemoField, build_approximation, cheb_interp_1d,
                     coeff_error_sum, eval_approx, fit_rate, galerkin_coeffs, linf_rel_error,
                     natural_rule, padua_interp, rho_norm_error, rule_covers_basis, tensor_interp)
from .estimators import CollocationRegressor, GalerkinRegressor, OrthogonalPolynomialFeatures
from .exceptions import (ConfigParseError, ConfigurationError, DomainError,
                         InsufficientDataError, NumericalFailure)
from .oracle import OracleSeries, oracle_coeffs, oracle_mnssae, oracle_mssae, oracle_sae
from .pce import SensitivityReport, pce_mean, pce_variance, sobol_indices
from .polybasis import CoefficientSet, GradedBasis, cheb_to_leg
from .problems import (BENCHMARKS, DelayOscillator, ParamDomain, ScalarField, benchmark_field,
                       rightmost_root, spectral_abscissa_dde)
from .quadrature import (Rule, clenshaw_curtis, gauss_legendre, integrate, padua_cubature,
                         padua_points, simpson_rule, tensor_cc_cubature, tensor_rule,
                         trapezoid_rule)
from .studies import StudySpec, parse_config, run_study

__version__ = "0.1.0"
