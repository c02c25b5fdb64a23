"""scikit-learn compatible wrappers around the approximation routines.

Inputs live on a box given by ``bounds`` and are mapped affinely to the
reference cube. ``bounds`` is either one ``(low, high)`` pair shared by every
feature or a sequence of per-feature pairs; by default the data are assumed to
lie in [-1, 1]^D already.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .approx import (cheb_interp_1d, galerkin_coeffs, galerkin_from_values, natural_rule,
                     padua_interp, tensor_interp)
from .exceptions import ConfigurationError
from .pce import sobol_indices
from .polybasis import CoefficientSet, GradedBasis, cheb_to_leg
from .problems import ParamDomain
from .quadrature import Rule


def _domain(bounds, n_features):
    if bounds is None:
        return ParamDomain(-np.ones(n_features), np.ones(n_features))
    pairs = np.asarray(bounds, dtype=float)
    if pairs.shape == (2,):
        pairs = np.tile(pairs, (n_features, 1))
    if pairs.shape != (n_features, 2):
        raise ConfigurationError(
            f"bounds must be a (low, high) pair or {n_features} such pairs, "
            f"got shape {pairs.shape}")
    return ParamDomain(pairs[:, 0], pairs[:, 1])


class _ReferenceMixin:
    """Shared input handling: validation and the map to the reference cube."""

    def _setup(self, n_features):
        self.n_features_in_ = n_features
        self.domain_ = _domain(self.bounds, n_features)
        self.basis_ = GradedBasis(self._family, n_features, self.norm, self.degree)

    def _to_reference(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} is expecting "
                f"{self.n_features_in_} features as input")
        return self.domain_.to_reference(X)


class OrthogonalPolynomialFeatures(_ReferenceMixin, TransformerMixin, BaseEstimator):
    """Expand samples in a graded Legendre or Chebyshev tensor basis.

    Parameters
    ----------
    degree : int
        Truncation degree P_d.
    family : {"legendre", "chebyshev"}
    norm : {"total", "maximal"}
        Multivariate degree used for truncation.
    bounds : (low, high) or sequence of (low, high), optional
        Input box, shared by all features or given per feature.
    """

    def __init__(self, degree=2, family="legendre", norm="total", bounds=None):
        self.degree = degree
        self.family = family
        self.norm = norm
        self.bounds = bounds

    @property
    def _family(self):
        return self.family

    def fit(self, X, y=None):
        X = check_array(X)
        self._setup(X.shape[1])
        self.powers_ = np.array(self.basis_.indices)
        return self

    def transform(self, X):
        return self.basis_.matrix(self._to_reference(X))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        names = input_features or [f"x{d}" for d in range(self.n_features_in_)]
        prefix = "P" if self.basis_.family == "legendre" else "T"
        return np.array(["*".join(f"{prefix}{k}({n})" for k, n in zip(idx, names) if k) or "1"
                         for idx in self.basis_.indices], dtype=object)


class _ChaosStatsMixin:
    """Statistics of the fitted expansion under a uniform input distribution."""

    def _legendre(self):
        check_is_fitted(self, "coefficients_")
        c = self.coefficients_
        return cheb_to_leg(c) if c.family == "chebyshev" else c

    @property
    def mean_(self):
        return self.sensitivity_.mean

    @property
    def variance_(self):
        return self.sensitivity_.variance

    @property
    def sensitivity_(self):
        return sobol_indices(self._legendre())

    def predict(self, X):
        check_is_fitted(self, "coefficients_")
        return np.asarray(self.coefficients_(self._to_reference(X))).reshape(-1)

    def _finish(self, coeffs: CoefficientSet):
        self.coefficients_ = coeffs
        self.coef_ = np.array(coeffs.coeffs)
        return self


class GalerkinRegressor(_ChaosStatsMixin, _ReferenceMixin, RegressorMixin, BaseEstimator):
    """Legendre expansion by discrete orthogonal projection.

    ``fit`` treats the samples as nodes of a quadrature rule whose weights are
    ``sample_weight`` rescaled to sum to 2^D, the measure of the reference
    cube (rule weights pass through unchanged). Without weights the samples
    are taken as uniform random draws (Monte-Carlo projection), which is not a
    least-squares fit and needs samples spread over the whole box. ``fit_field`` projects a callable with ``rule`` or, by
    default, the natural rule for the basis.

    Parameters
    ----------
    degree : int
    norm : {"total", "maximal"}
    rule : Rule, optional
        Quadrature rule used by ``fit_field``.
    bounds : (low, high) or sequence of (low, high), optional
    """

    _family = "legendre"

    def __init__(self, degree=4, norm="total", rule=None, bounds=None):
        self.degree = degree
        self.norm = norm
        self.rule = rule
        self.bounds = bounds

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y, y_numeric=True)
        self._setup(X.shape[1])
        Z = self.domain_.to_reference(X)
        if sample_weight is None:
            w = np.full(len(y), 2.0 ** X.shape[1] / len(y))
        else:
            w = np.asarray(sample_weight, dtype=float).reshape(-1)
            if w.shape[0] != len(y):
                raise ValueError("sample_weight and y differ in length")
            w = w * (2.0 ** X.shape[1] / w.sum())
        rule = Rule(Z, w, 0, "samples")
        return self._finish(galerkin_from_values(self.basis_, rule, y))

    def fit_field(self, f, n_features=1):
        """Project a field defined on the reference cube."""
        self._setup(getattr(f, "dimension", n_features))
        rule = self.rule if self.rule is not None else natural_rule(self.basis_)
        return self._finish(galerkin_coeffs(f, self.basis_, rule))


class CollocationRegressor(_ChaosStatsMixin, _ReferenceMixin, RegressorMixin, BaseEstimator):
    """Chebyshev expansion by interpolation or least squares.

    ``fit`` solves the least-squares problem on arbitrary samples (exact
    interpolation when the samples are unisolvent and as many as the basis);
    ``fit_field`` samples a callable on Chebyshev, Padua or tensor Chebyshev
    nodes and interpolates directly.
    """

    _family = "chebyshev"

    def __init__(self, degree=4, norm="total", bounds=None):
        self.degree = degree
        self.norm = norm
        self.bounds = bounds

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self._setup(X.shape[1])
        B = self.basis_.matrix(self.domain_.to_reference(X))
        coeffs, *_ = np.linalg.lstsq(B, y, rcond=None)
        return self._finish(CoefficientSet(self.basis_, coeffs, {"method": "least_squares"}))

    def fit_field(self, f, n_features=1):
        """Interpolate a field defined on the reference cube."""
        D = getattr(f, "dimension", n_features)
        self._setup(D)
        if D == 1:
            coeffs = cheb_interp_1d(f, self.degree)
        elif D == 2 and self.norm == "total":
            coeffs = padua_interp(f, self.degree)
        elif D == 2:
            coeffs = tensor_interp(f, self.degree)
        else:
            raise ConfigurationError("interpolation nodes are available for D <= 2")
        return self._finish(coeffs)
