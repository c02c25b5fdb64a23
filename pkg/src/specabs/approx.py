"""Galerkin and collocation polynomial approximations of scalar fields.

Galerkin coefficients are discrete orthogonal projections onto a Legendre
basis using a quadrature/cubature rule. Collocation coefficients interpolate
the field at Chebyshev points (1-D), Padua points (2-D, total degree) or a
tensor Chebyshev grid (2-D, maximal degree) and are returned in the Chebyshev
basis; use :func:`specabs.polybasis.cheb_to_leg` for statistics.
"""

from __future__ import annotations

import threading
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.fft import dct

from .exceptions import ConfigurationError, InsufficientDataError
from .polybasis import CoefficientSet, GradedBasis, chebyshev_vander
from .problems import ScalarField
from .quadrature import (Rule, chebyshev_points, gauss_legendre, padua_base_weights,
                         padua_cubature, padua_points, tensor_cc_cubature, tensor_rule)
from .utils import as_points, check_int

METHODS = ("galerkin", "collocation")
#: default number of equispaced error-grid points per axis
DEFAULT_GRID = {1: 10001, 2: 201}
#: smallest cubature size used for 2-D Galerkin builds
NATURAL_2D_SIZE = 64


class MemoField(ScalarField):
    """Wrap a field so each distinct point is evaluated at most once.

    The table is keyed by the exact float coordinates and guarded by a lock,
    so concurrent callers may share one instance. Missing points of a call are
    evaluated together in a single batch.
    """

    def __init__(self, inner: ScalarField):
        super().__init__(inner.dimension, self._lookup, name=inner.name)
        self.inner = inner
        self._table: dict = {}
        self._lock = threading.Lock()

    def _lookup(self, pts):
        keys = [row.tobytes() for row in np.ascontiguousarray(pts)]
        with self._lock:
            missing = [i for i, k in enumerate(keys) if k not in self._table]
        if missing:
            fresh = {}
            uniq = {}
            for i in missing:
                uniq.setdefault(keys[i], i)
            order = list(uniq.values())
            values = np.asarray(self.inner._func(pts[order]), dtype=float).reshape(-1)
            for i, v in zip(order, values):
                fresh[keys[i]] = float(v)
            with self._lock:
                for k, v in fresh.items():
                    self._table.setdefault(k, v)
        with self._lock:
            return np.array([self._table[k] for k in keys])

    def __len__(self):
        return len(self._table)


# ---------------------------------------------------------------------------
# Galerkin


def galerkin_coeffs(f, basis: GradedBasis, rule: Rule) -> CoefficientSet:
    """Discrete orthogonal projection of ``f`` onto a Legendre basis.

    Each coefficient is sum_q w_q f(x_q) p_i(x_q) rho / <p_i, p_i>_rho with
    rho = 2^-D; the field is evaluated once per node.
    """
    if basis.family != "legendre":
        raise ConfigurationError("Galerkin projection needs the Legendre basis")
    dim = getattr(f, "dimension", basis.dimension)
    if rule.dimension != basis.dimension or dim != basis.dimension:
        raise ConfigurationError(
            f"dimension mismatch: basis {basis.dimension}, rule {rule.dimension}, field {dim}")
    values = np.asarray(f(rule.points), dtype=float).reshape(-1)
    return galerkin_from_values(basis, rule, values)


def galerkin_from_values(basis: GradedBasis, rule: Rule, values) -> CoefficientSet:
    """Projection coefficients from field values already sampled at ``rule`` nodes."""
    values = np.asarray(values, dtype=float).reshape(-1)
    B = basis.matrix(rule.nodes)
    rho = 0.5 ** basis.dimension
    coeffs = (B.T @ (rule.weights * values)) * rho / basis.norms_sq()
    meta = {"method": "galerkin", "rule": rule.label,
            "rule_covers_basis": rule_covers_basis(rule, basis)}
    return CoefficientSet(basis, coeffs, meta)


def rule_covers_basis(rule: Rule, basis: GradedBasis) -> bool:
    """Whether ``rule`` integrates every basis polynomial exactly.

    This is the decoupling advice: interpolatory rules should be exact on the
    approximation space so that integration error does not pollute the
    truncation error. A maximal-degree basis of degree P_d has total degree
    D * P_d; a total-degree basis has maximal degree P_d.
    """
    if basis.dimension == 1 or rule.exactness_norm == basis.norm:
        needed = basis.degree
    elif rule.exactness_norm == "total":
        needed = basis.dimension * basis.degree
    else:
        needed = basis.degree
    return rule.exactness >= needed


def natural_rule(basis: GradedBasis) -> Rule:
    """Default Galerkin rule for ``basis``.

    Gauss(4P) in 1-D; in 2-D the cubature matching the grading (Padua for
    total degree, tensor Clenshaw-Curtis for maximal degree) of size
    max(P_d, 64). Higher dimensions fall back to a tensor Gauss rule.
    """
    P = basis.degree
    if basis.dimension == 1:
        return gauss_legendre(max(4 * P, 2))
    if basis.dimension == 2:
        size = max(P, NATURAL_2D_SIZE)
        return padua_cubature(size) if basis.norm == "total" else tensor_cc_cubature(size)
    return tensor_rule(gauss_legendre(2 * P + 1), basis.dimension)


# ---------------------------------------------------------------------------
# collocation


def _dct1_coefficients(values, axis=0):
    """Chebyshev coefficients of the interpolant at cos(j pi/n) along ``axis``."""
    n = values.shape[axis] - 1
    if n == 0:
        return values.astype(float)
    a = dct(values, type=1, axis=axis) / n
    sl = [slice(None)] * values.ndim
    for end in (0, n):
        sl[axis] = end
        a[tuple(sl)] *= 0.5
    return a


def cheb_interp_1d(f, P: int) -> CoefficientSet:
    """Interpolate ``f`` at the P+1 Chebyshev points of the second kind."""
    P = check_int(P, "P")
    x = chebyshev_points(P)
    values = np.asarray(f(x), dtype=float).reshape(-1)
    coeffs = _dct1_coefficients(values)
    basis = GradedBasis("chebyshev", 1, "total", P)
    return CoefficientSet(basis, coeffs, {"method": "collocation", "nodes": f"chebyshev({P})"})


def tensor_interp(f, m_c: int) -> CoefficientSet:
    """Interpolate on the (m_c+1)^2 tensor Chebyshev grid (maximal degree m_c)."""
    m_c = check_int(m_c, "m_c", 1)
    x = chebyshev_points(m_c)
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    values = np.asarray(f(pts), dtype=float).reshape(m_c + 1, m_c + 1)
    A = _dct1_coefficients(_dct1_coefficients(values, axis=0), axis=1)
    basis = GradedBasis("chebyshev", 2, "maximal", m_c)
    idx = np.array(basis.indices)
    return CoefficientSet(basis, A[idx[:, 0], idx[:, 1]],
                          {"method": "collocation", "nodes": f"tensor({m_c})"})


def padua_interp(f, m_p: int) -> CoefficientSet:
    """Interpolate on the Padua points (total degree m_p).

    Coefficients come from the discrete orthogonality of the normalized
    Chebyshev basis under the Padua weights, with the (m_p, 0) term halved.
    """
    m_p = check_int(m_p, "m_p", 1)
    pts = padua_points(m_p)
    values = np.asarray(f(pts), dtype=float).reshape(-1)
    return padua_from_values(m_p, values)


def padua_from_values(m_p: int, values) -> CoefficientSet:
    pts = padua_points(m_p)
    w = padua_base_weights(m_p) * np.asarray(values, dtype=float).reshape(-1)
    scale = np.full(m_p + 1, np.sqrt(2.0))
    scale[0] = 1.0
    Tx = chebyshev_vander(m_p, pts[:, 0]) * scale
    Ty = chebyshev_vander(m_p, pts[:, 1]) * scale
    C = Tx.T @ (w[:, None] * Ty)
    C[m_p, 0] *= 0.5
    C *= np.outer(scale, scale)
    basis = GradedBasis("chebyshev", 2, "total", m_p)
    idx = np.array(basis.indices)
    return CoefficientSet(basis, C[idx[:, 0], idx[:, 1]],
                          {"method": "collocation", "nodes": f"padua({m_p})"})


# ---------------------------------------------------------------------------
# evaluation and errors


def _clenshaw(coeffs, x, family):
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    n = len(coeffs) - 1
    for k in range(n, -1, -1):
        if family == "legendre":
            alpha = (2 * k + 1) / (k + 1) * x
            beta_next = -(k + 1) / (k + 2)
        else:
            alpha = x if k == 0 else 2.0 * x
            beta_next = -1.0
        b1, b2 = coeffs[k] + alpha * b1 + beta_next * b2, b1
    return b1


def eval_approx(coeffs: CoefficientSet, points):
    """Evaluate an expansion at points of the reference cube.

    One-dimensional expansions use Clenshaw's backward recurrence in their own
    family; multivariate ones multiply recurrence-built univariate tables.
    """
    pts, lead = as_points(points, coeffs.dimension)
    if coeffs.dimension == 1:
        vals = _clenshaw(coeffs.coeffs, pts[:, 0], coeffs.family)
    else:
        vals = coeffs.basis.matrix(pts) @ coeffs.coeffs
    if lead == ():
        return float(vals[0])
    return vals.reshape(lead)


def equispaced_grid(dimension: int, grid_per_dim: int):
    n = check_int(grid_per_dim, "grid_per_dim", 2)
    g = np.linspace(-1.0, 1.0, n)
    if dimension == 1:
        return g
    mesh = np.meshgrid(*([g] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def linf_rel_error(f, coeffs: CoefficientSet, grid_per_dim: Optional[int] = None) -> float:
    """max |f - f_P| / max |f| over an equispaced grid."""
    dim = coeffs.dimension
    grid = equispaced_grid(dim, grid_per_dim or DEFAULT_GRID.get(dim, 21))
    exact = np.asarray(f(grid), dtype=float).reshape(-1)
    approx = np.asarray(eval_approx(coeffs, grid)).reshape(-1)
    scale = np.max(np.abs(exact))
    if scale == 0.0:
        return float(np.max(np.abs(approx)))
    return float(np.max(np.abs(exact - approx)) / scale)


def rho_norm_error(f, coeffs: CoefficientSet, M: int = 200) -> float:
    """Error in the norm induced by the uniform density, via tensor Gauss(M)."""
    rule = tensor_rule(gauss_legendre(M), coeffs.dimension)
    diff = np.asarray(f(rule.points), dtype=float).reshape(-1) - \
        np.asarray(eval_approx(coeffs, rule.points)).reshape(-1)
    rho = 0.5 ** coeffs.dimension
    return float(np.sqrt(rho * (rule.weights @ (diff * diff))))


def coeff_error_sum(reference: CoefficientSet, test: CoefficientSet) -> float:
    """Sum of absolute coefficient differences between two expansions."""
    if reference.basis != test.basis:
        raise ConfigurationError(f"basis mismatch: {reference.basis} vs {test.basis}")
    return float(np.sum(np.abs(reference.coeffs - test.coeffs)))


@dataclass
class ErrorRecord:
    """One point of a convergence sweep."""

    degree: int
    n_coeffs: int
    rel_linf_error: float
    extra: Optional[float] = None
    wall_ms: float = 0.0

    def __post_init__(self):
        if not self.rel_linf_error >= 0:
            raise ValueError(f"negative or NaN error {self.rel_linf_error!r}")


def fit_rate(records, window=None) -> float:
    """Least-squares slope of log(error) against log(degree).

    ``window`` is an inclusive (low, high) degree range; by default the upper
    half of the sweep is used. At least four records with positive degree and
    positive finite error must fall inside it.
    """
    records = sorted(records, key=lambda r: r.degree)
    if window is None:
        degrees = [r.degree for r in records]
        if not degrees:
            raise InsufficientDataError("no records")
        lo, hi = degrees[len(degrees) // 2], degrees[-1]
    else:
        lo, hi = window
    usable = [r for r in records if lo <= r.degree <= hi and r.degree > 0
              and np.isfinite(r.rel_linf_error) and r.rel_linf_error > 0]
    if len(usable) < 4:
        raise InsufficientDataError(
            f"need at least 4 usable records in [{lo}, {hi}], got {len(usable)}")
    x = np.log([r.degree for r in usable])
    y = np.log([r.rel_linf_error for r in usable])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# configuration-driven builds


@dataclass
class ApproxConfig:
    """How to build one approximation.

    ``rule`` is only used by the Galerkin method. A rule that does not cover
    the basis (see :func:`rule_covers_basis`) is accepted but flagged.
    """

    method: str
    basis: GradedBasis
    rule: Optional[Rule] = None
    dde_n: int = 20
    flags: list = field(default_factory=list)

    def __post_init__(self):
        self.method = str(self.method).lower()
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "galerkin":
            if self.rule is None:
                raise ConfigurationError("Galerkin builds need a quadrature rule")
            if self.rule.dimension != self.basis.dimension:
                raise ConfigurationError("rule and basis dimensions differ")
            if not rule_covers_basis(self.rule, self.basis):
                msg = (f"{self.rule.label} is not exact on the {self.basis.norm}-degree "
                       f"basis of degree {self.basis.degree}")
                self.flags.append(msg)
                warnings.warn(msg, UserWarning, stacklevel=2)


def build_approximation(f, config: ApproxConfig) -> CoefficientSet:
    """Build the approximation described by ``config``."""
    basis = config.basis
    t0 = time.perf_counter()
    if config.method == "galerkin":
        out = galerkin_coeffs(f, basis.with_family("legendre"), config.rule)
    elif basis.dimension == 1:
        out = cheb_interp_1d(f, basis.degree)
    elif basis.dimension == 2 and basis.norm == "total":
        out = padua_interp(f, basis.degree)
    elif basis.dimension == 2:
        out = tensor_interp(f, basis.degree)
    else:
        raise ConfigurationError("collocation is implemented for D <= 2")
    out.meta["wall_ms"] = 1e3 * (time.perf_counter() - t0)
    out.meta["flags"] = list(config.flags)
    return out


def error_record(f, coeffs: CoefficientSet, grid_per_dim=None, extra=None) -> ErrorRecord:
    t0 = time.perf_counter()
    err = linf_rel_error(f, coeffs, grid_per_dim)
    wall = coeffs.meta.get("wall_ms", 0.0) + 1e3 * (time.perf_counter() - t0)
    return ErrorRecord(coeffs.basis.degree, len(coeffs), err, extra, wall)

