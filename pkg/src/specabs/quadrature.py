"""Quadrature and cubature rules on the reference cube with unit weight.

Rules integrate against dx (or dx dy); callers that need the probability
density of the uniform germ multiply by 2^-D themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import ConfigurationError
from .polybasis import chebyshev_vander, legendre_vander
from .utils import check_int


@dataclass(frozen=True)
class Rule:
    """Nodes and weights over [-1, 1]^D.

    ``exactness`` is the polynomial degree integrated exactly, measured in the
    ``exactness_norm`` ("total" or "maximal") when D > 1.
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exactness: int
    label: str
    exactness_norm: str = "total"

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if nodes.shape[0] != weights.shape[0]:
            raise ConfigurationError("nodes and weights differ in length")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def dimension(self):
        return self.nodes.shape[1]

    @property
    def points(self):
        """Nodes as a flat vector for D = 1, else the (n, D) array."""
        return self.nodes[:, 0] if self.dimension == 1 else self.nodes

    def __len__(self):
        return self.weights.shape[0]


def integrate(rule: Rule, f) -> float:
    """Weighted sum of ``f`` over the rule's nodes."""
    dim = getattr(f, "dimension", rule.dimension)
    if dim != rule.dimension:
        raise ConfigurationError(f"rule is {rule.dimension}-D but field is {dim}-D")
    values = np.asarray(f(rule.points), dtype=float).reshape(-1)
    return float(rule.weights @ values)


# ---------------------------------------------------------------------------
# one-dimensional rules


def trapezoid_rule(M: int) -> Rule:
    """Extended trapezoidal rule on M+1 equispaced nodes including the ends."""
    M = check_int(M, "M", 1)
    x = np.linspace(-1.0, 1.0, M + 1)
    w = np.full(M + 1, 2.0 / M)
    w[[0, -1]] *= 0.5
    return Rule(x, w, 1, f"trapezoid({M})")


def simpson_rule(M: int) -> Rule:
    """Extended Simpson rule; M must be even."""
    M = check_int(M, "M", 2)
    if M % 2:
        raise ConfigurationError(f"Simpson's rule needs an even M, got {M}")
    x = np.linspace(-1.0, 1.0, M + 1)
    w = np.empty(M + 1)
    w[1::2] = 4.0
    w[2::2] = 2.0
    w[[0, -1]] = 1.0
    w *= (2.0 / M) / 3.0
    return Rule(x, w, 3, f"simpson({M})")


def chebyshev_points(M: int) -> np.ndarray:
    """The M+1 Chebyshev points of the second kind, cos(j pi / M), j = 0..M."""
    M = check_int(M, "M")
    if M == 0:
        return np.zeros(1)
    x = np.cos(np.pi * np.arange(M + 1) / M)
    # exact zero at the centre for even M
    if M % 2 == 0:
        x[M // 2] = 0.0
    return x


def _clenshaw_curtis_weights(M):
    theta = np.pi * np.arange(M + 1) / M
    w = np.zeros(M + 1)
    inner = theta[1:-1]
    v = np.ones(M - 1)
    if M % 2 == 0:
        w[0] = w[M] = 1.0 / (M * M - 1)
        for k in range(1, M // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
        v -= np.cos(M * inner) / (M * M - 1)
    else:
        w[0] = w[M] = 1.0 / (M * M)
        for k in range(1, (M - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / M
    return w


def clenshaw_curtis(M: int) -> Rule:
    """Clenshaw-Curtis rule on the M+1 Chebyshev points of the second kind."""
    M = check_int(M, "M", 1)
    return Rule(chebyshev_points(M), _clenshaw_curtis_weights(M), M, f"clenshaw_curtis({M})")


@lru_cache(maxsize=128)
def gauss_legendre(M: int) -> Rule:
    """Gauss-Legendre rule with M+1 nodes (exact to degree 2M+1).

    Rules are immutable, so repeated sizes are served from a cache.

    Nodes come from the symmetric Jacobi matrix (Golub-Welsch), then get two
    Newton sweeps on P_{M+1}; weights use the derivative formula.
    """
    M = check_int(M, "M")
    n = M + 1
    if n == 1:
        return Rule(np.zeros(1), np.array([2.0]), 1, "gauss_legendre(0)")
    k = np.arange(1, n)
    beta = k / np.sqrt(4.0 * k * k - 1.0)
    x = np.sort(eigh_tridiagonal(np.zeros(n), beta, eigvals_only=True))
    for _ in range(2):
        value, slope = _legendre_and_derivative(n, x)
        x = x - value / slope
    x = 0.5 * (x - x[::-1])
    if n % 2:
        x[n // 2] = 0.0
    _, slope = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * slope * slope)
    w = 0.5 * (w + w[::-1])
    return Rule(x, w, 2 * M + 1, f"gauss_legendre({M})")


def _legendre_and_derivative(n, x):
    V = legendre_vander(n, x)
    return V[:, n], n * (x * V[:, n] - V[:, n - 1]) / (x * x - 1.0)


# ---------------------------------------------------------------------------
# two-dimensional cubatures


def tensor_rule(rule: Rule, dimension: int) -> Rule:
    """Cartesian power of a one-dimensional rule (exact in maximal degree)."""
    dimension = check_int(dimension, "dimension", 1)
    if rule.dimension != 1:
        raise ConfigurationError("tensor_rule expects a one-dimensional rule")
    if dimension == 1:
        return rule
    x = rule.points
    grids = np.meshgrid(*([x] * dimension), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([rule.weights] * dimension), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return Rule(nodes, weights, rule.exactness, f"{rule.label}^{dimension}", "maximal")


def tensor_cc_cubature(m_c: int) -> Rule:
    """Tensorial Clenshaw-Curtis cubature on the (m_c+1)^2 Chebyshev grid."""
    m_c = check_int(m_c, "m_c", 1)
    rule = tensor_rule(clenshaw_curtis(m_c), 2)
    return Rule(rule.nodes, rule.weights, m_c, f"tensor_cc({m_c})", "maximal")


def _padua_grid(m_p):
    j, k = np.meshgrid(np.arange(m_p + 1), np.arange(m_p + 2), indexing="ij")
    keep = (j + k) % 2 == 0
    return j[keep], k[keep]


def padua_points(m_p: int) -> np.ndarray:
    """The (m_p+1)(m_p+2)/2 Padua points (first family), shape (n, 2).

    The points are (cos(j pi/m_p), cos(k pi/(m_p+1))) with j + k even; they
    are the self-intersections and boundary contacts of the curve
    T_{m_p}(x) = T_{m_p+1}(y).
    """
    m_p = check_int(m_p, "m_p", 1)
    j, k = _padua_grid(m_p)
    x = chebyshev_points(m_p)[j]
    y = chebyshev_points(m_p + 1)[k]
    return np.stack([x, y], axis=1)


def padua_base_weights(m_p: int) -> np.ndarray:
    """Weights of the Padua points w.r.t. the product Chebyshev measure.

    Normalised to sum to one: 1/(m(m+1)) times 1/2 at vertices, 1 on edges
    and 2 in the interior.
    """
    m_p = check_int(m_p, "m_p", 1)
    j, k = _padua_grid(m_p)
    on_x_edge = (j == 0) | (j == m_p)
    on_y_edge = (k == 0) | (k == m_p + 1)
    w = np.full(j.shape, 2.0)
    w[on_x_edge ^ on_y_edge] = 1.0
    w[on_x_edge & on_y_edge] = 0.5
    return w / (m_p * (m_p + 1))


def _scaled_chebyshev(n, x):
    """Orthonormal Chebyshev values: T_0 and sqrt(2) T_p."""
    V = chebyshev_vander(n, x)
    V[..., 1:] *= np.sqrt(2.0)
    return V


def padua_cubature(m_p: int) -> Rule:
    """Non-tensorial Clenshaw-Curtis cubature on Padua points.

    Integrates the Padua interpolant of the integrand exactly, so it is exact
    for all polynomials of total degree <= m_p.
    """
    m_p = check_int(m_p, "m_p", 1)
    pts = padua_points(m_p)
    w0 = padua_base_weights(m_p)
    p = np.arange(m_p + 1)
    moments = np.zeros(m_p + 1)
    even = p[p % 2 == 0]
    moments[even] = 2.0 / (1.0 - even * even)
    moments[1:] *= np.sqrt(2.0)
    # moment matrix restricted to the triangle j + l <= m_p, corner halved
    jj, ll = np.meshgrid(p, p, indexing="ij")
    Mmat = np.where(jj + ll <= m_p, np.outer(moments, moments), 0.0)
    Mmat[m_p, 0] *= 0.5
    Tx = _scaled_chebyshev(m_p, pts[:, 0])
    Ty = _scaled_chebyshev(m_p, pts[:, 1])
    weights = w0 * np.einsum("qj,jl,ql->q", Tx, Mmat, Ty)
    return Rule(pts, weights, m_p, f"padua({m_p})", "total")
