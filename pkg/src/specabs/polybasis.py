"""Legendre/Chebyshev bases, multi-index grading and coefficient containers.

Multivariate bases are tensor products of univariate ones. The linear order of
the multi-indices is fixed by a pairing function: Cantor's (anti-diagonals) for
total-degree truncation and Rosenberg-Strong's (square shells) for
maximal-degree truncation. For D > 2 the order is by norm shell, then
lexicographic within a shell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .exceptions import ConfigurationError
from .utils import as_points, check_int

FAMILIES = ("legendre", "chebyshev")
NORMS = ("total", "maximal")


def _norm_name(norm):
    norm = str(norm).lower()
    if norm not in NORMS:
        raise ConfigurationError(f"unknown degree norm {norm!r}; expected one of {NORMS}")
    return norm


def _family_name(family):
    family = str(family).lower()
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return family


# ---------------------------------------------------------------------------
# univariate evaluation


def legendre_vander(n, x):
    """Values P_0(x) .. P_n(x) as an array of shape x.shape + (n+1,)."""
    x = np.asarray(x, dtype=float)
    V = np.empty(x.shape + (n + 1,))
    V[..., 0] = 1.0
    if n >= 1:
        V[..., 1] = x
    for k in range(1, n):
        V[..., k + 1] = ((2 * k + 1) * x * V[..., k] - k * V[..., k - 1]) / (k + 1)
    return V


def chebyshev_vander(n, x):
    """Values T_0(x) .. T_n(x) as an array of shape x.shape + (n+1,)."""
    x = np.asarray(x, dtype=float)
    V = np.empty(x.shape + (n + 1,))
    V[..., 0] = 1.0
    if n >= 1:
        V[..., 1] = x
    for k in range(1, n):
        V[..., k + 1] = 2.0 * x * V[..., k] - V[..., k - 1]
    return V


def vander(family, n, x):
    return legendre_vander(n, x) if _family_name(family) == "legendre" else chebyshev_vander(n, x)


def legendre_eval(i, x):
    """Legendre polynomial P_i(x), normalized so that P_i(1) = 1."""
    i = check_int(i, "degree")
    out = legendre_vander(i, x)[..., i]
    return float(out) if out.ndim == 0 else out


def chebyshev_eval(i, x):
    """Chebyshev polynomial T_i(x) of the first kind."""
    i = check_int(i, "degree")
    out = chebyshev_vander(i, x)[..., i]
    return float(out) if out.ndim == 0 else out


def legendre_norm_sq(i):
    """Squared norm of P_i under the uniform probability density on [-1, 1].

    ``i`` may be a degree or a multi-index; for a multi-index the tensor
    product density 2^-D is used and the result is the product over axes.
    """
    if np.ndim(i) == 0:
        return 1.0 / (2 * check_int(i, "degree") + 1)
    return float(np.prod([1.0 / (2 * check_int(k, "degree") + 1) for k in i]))


def chebyshev_norm_sq(i):
    """Squared norm of T_i under the uniform probability density on [-1, 1]."""
    if np.ndim(i) != 0:
        return float(np.prod([chebyshev_norm_sq(k) for k in i]))
    i = check_int(i, "degree")
    # (1/2) * integral of T_i^2 = (1/2) * (1 - 1/(4 i^2 - 1))
    return 1.0 if i == 0 else 0.5 * (1.0 - 1.0 / (4 * i * i - 1))


# ---------------------------------------------------------------------------
# pairing functions


def cantor_pair(i1, i2):
    i1 = check_int(i1, "i1")
    i2 = check_int(i2, "i2")
    return (i1 * i1 + 3 * i1 + 2 * i1 * i2 + i2 + i2 * i2) // 2


def cantor_unpair(k):
    k = check_int(k, "k")
    s = (math.isqrt(8 * k + 1) - 1) // 2
    i1 = k - s * (s + 1) // 2
    return i1, s - i1


def rosenberg_pair(i1, i2):
    i1 = check_int(i1, "i1")
    i2 = check_int(i2, "i2")
    m = max(i1, i2)
    return m * m + m + i1 - i2


def rosenberg_unpair(k):
    k = check_int(k, "k")
    m = math.isqrt(k)
    r = k - m * m
    if r <= m:
        return r, m
    return m, 2 * m - r


def multi_index_norm(idx, norm):
    return sum(idx) if _norm_name(norm) == "total" else max(idx, default=0)


def _enumerate(dimension, norm, degree):
    if dimension == 1:
        return [(k,) for k in range(degree + 1)]
    if dimension == 2:
        if norm == "total":
            size = (degree + 1) * (degree + 2) // 2
            return [cantor_unpair(k) for k in range(size)]
        return [rosenberg_unpair(k) for k in range((degree + 1) ** 2)]
    if norm == "total":
        kept = list(_bounded_sum(dimension, degree))
    else:
        kept = list(product(range(degree + 1), repeat=dimension))
    return sorted(kept, key=lambda idx: (multi_index_norm(idx, norm), idx))


def _bounded_sum(dimension, budget):
    """Multi-indices of length ``dimension`` with entries summing to <= budget."""
    if dimension == 1:
        for k in range(budget + 1):
            yield (k,)
        return
    for k in range(budget + 1):
        for rest in _bounded_sum(dimension - 1, budget - k):
            yield (k,) + rest


@dataclass(frozen=True)
class GradedBasis:
    """Tensor-product polynomial basis truncated by a multivariate degree."""

    family: str = "legendre"
    dimension: int = 1
    norm: str = "total"
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", _family_name(self.family))
        object.__setattr__(self, "norm", _norm_name(self.norm))
        object.__setattr__(self, "dimension", check_int(self.dimension, "dimension", 1))
        object.__setattr__(self, "degree", check_int(self.degree, "degree"))

    @cached_property
    def indices(self):
        return tuple(_enumerate(self.dimension, self.norm, self.degree))

    @property
    def size(self):
        """Number of basis functions, P + 1."""
        return len(self.indices)

    @cached_property
    def _position(self):
        return {idx: k for k, idx in enumerate(self.indices)}

    def position(self, idx):
        """Linear index of a multi-index (KeyError if outside the truncation)."""
        return self._position[tuple(int(k) for k in idx)]

    def norms_sq(self):
        fn = legendre_norm_sq if self.family == "legendre" else chebyshev_norm_sq
        return np.array([fn(idx) for idx in self.indices])

    def with_family(self, family):
        return GradedBasis(family, self.dimension, self.norm, self.degree)

    def matrix(self, points):
        """Basis values at points: array of shape (n_points, P + 1)."""
        pts, _ = as_points(points, self.dimension)
        idx = np.array(self.indices, dtype=int)
        out = np.ones((pts.shape[0], self.size))
        for d in range(self.dimension):
            V = vander(self.family, self.degree, pts[:, d])
            out *= V[:, idx[:, d]]
        return out


def graded_indices(basis: GradedBasis):
    """Multi-indices of ``basis`` in their fixed linear order."""
    return list(basis.indices)


def basis_eval(basis: GradedBasis, idx, point):
    """Value of the tensor-product basis function ``idx`` at ``point``."""
    idx = tuple(int(k) for k in np.atleast_1d(idx))
    if len(idx) != basis.dimension:
        raise ConfigurationError(f"multi-index {idx} does not match dimension {basis.dimension}")
    if multi_index_norm(idx, basis.norm) > basis.degree:
        raise ConfigurationError(f"multi-index {idx} outside the truncation of {basis}")
    x = np.atleast_1d(np.asarray(point, dtype=float))
    one = vander(basis.family, max(idx), x)
    return float(np.prod([one[d, k] for d, k in enumerate(idx)]))


# ---------------------------------------------------------------------------
# coefficient container


@dataclass(frozen=True)
class CoefficientSet:
    """Expansion coefficients of a polynomial in a graded basis."""

    basis: GradedBasis
    coeffs: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.shape[0] != self.basis.size:
            raise ConfigurationError(
                f"{c.shape[0]} coefficients for a basis of size {self.basis.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def family(self):
        return self.basis.family

    @property
    def dimension(self):
        return self.basis.dimension

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            return float(self.coeffs[self.basis.position(idx)])
        return self.coeffs[idx]

    def __call__(self, points):
        from .approx import eval_approx
        return eval_approx(self, points)


def cheb_to_leg(cheb: CoefficientSet) -> CoefficientSet:
    """Re-express a Chebyshev expansion in the Legendre basis of the same grading.

    Both expansions span the same polynomial space, so projecting the
    Chebyshev polynomial with a tensor Gauss-Legendre rule exact to degree
    2 P_d + 1 per axis reproduces it exactly up to rounding.
    """
    if cheb.family != "chebyshev":
        raise ConfigurationError("cheb_to_leg expects a Chebyshev coefficient set")
    from .quadrature import gauss_legendre, tensor_rule

    basis = cheb.basis
    rule = tensor_rule(gauss_legendre(basis.degree), basis.dimension)
    values = cheb.basis.matrix(rule.nodes) @ cheb.coeffs
    leg = basis.with_family("legendre")
    B = leg.matrix(rule.nodes)
    rho = 0.5 ** basis.dimension
    coeffs = (B.T @ (rule.weights * values)) * rho / leg.norms_sq()
    return CoefficientSet(leg, coeffs, dict(cheb.meta))
