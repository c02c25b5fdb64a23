"""Benchmark spectral abscissa functions.

Three closed-form one-parameter problems (smooth, Lipschitz kink, square-root
splitting) and the two-parameter oscillator with delayed feedback,

    x''(t) = -w1^2 x(t) - 2 w1 w2 x'(t) + K1 x(t - tau) + K2 x'(t - tau),

whose rightmost characteristic roots are computed by pseudospectral collocation
of the infinitesimal generator followed by Newton refinement on the scalar
characteristic function.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .utils import as_points, check_in_cube, check_int

#: default number of Chebyshev intervals for the delay discretization
DEFAULT_DDE_N = 20
#: discrete eigenvalues within this distance of the rightmost one are refined
CANDIDATE_BAND = 0.1
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50

#: (K1, K2) control gains per smoothness class of the oscillator benchmark
OSCILLATOR_GAINS = {
    "OSC_SAE": (0.2, 0.2),
    "OSC_MSSAE": (0.5105, -0.0918),
    "OSC_MNSSAE": (0.6179, -0.0072),
}
#: physical box for (angular frequency, damping ratio)
OSCILLATOR_BOX = ((0.9, 1.1), (0.1, 0.2))

BENCHMARKS = ("SAE1", "MSSAE1", "MNSSAE1", "OSC_SAE", "OSC_MSSAE", "OSC_MNSSAE")


@dataclass(frozen=True)
class ParamDomain:
    """Axis-aligned box with an affine map onto the reference cube [-1, 1]^D."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) != len(upper) or not lower:
            raise ConfigurationError("lower and upper must have the same positive length")
        if any(not lo < hi for lo, hi in zip(lower, upper)):
            raise ConfigurationError(f"empty box: lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self):
        return len(self.lower)

    def to_reference(self, x):
        lo, hi = np.array(self.lower), np.array(self.upper)
        return 2.0 * (np.asarray(x, dtype=float) - lo) / (hi - lo) - 1.0

    def from_reference(self, r):
        lo, hi = np.array(self.lower), np.array(self.upper)
        return lo + 0.5 * (np.asarray(r, dtype=float) + 1.0) * (hi - lo)


class ScalarField:
    """A real function on the reference cube [-1, 1]^D.

    ``func`` receives an array of shape (n, D) and returns n values. Calling
    the field accepts a single point or any stack of points; for D = 1 plain
    scalars and 1-D arrays of coordinates are accepted as well.
    """

    def __init__(self, dimension: int, func: Callable, name: str = "field"):
        self.dimension = check_int(dimension, "dimension", 1)
        self._func = func
        self.name = name

    def __call__(self, points):
        pts, lead = as_points(points, self.dimension)
        check_in_cube(pts)
        vals = np.asarray(self._func(pts), dtype=float).reshape(-1)
        if vals.shape[0] != pts.shape[0]:
            raise ConfigurationError(
                f"field {self.name!r} returned {vals.shape[0]} values for {pts.shape[0]} points")
        if lead == ():
            return float(vals[0])
        return vals.reshape(lead)

    def __repr__(self):
        return f"ScalarField(name={self.name!r}, dimension={self.dimension})"


# ---------------------------------------------------------------------------
# closed-form one-parameter benchmarks


def _check_unit_interval(omega):
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w < -1.0) or np.any(w > 1.0):
        raise DomainError(f"omega must lie in [-1, 1], got {omega!r}")
    return w


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def sae_abscissa(omega):
    """Spectral abscissa of diag(e^omega, -1): a smooth function."""
    w = _check_unit_interval(omega)
    return _scalar_or_array(np.exp(w), omega)


def mssae_abscissa(omega):
    """Spectral abscissa of diag(omega, 0): ``max(0, omega)``."""
    w = _check_unit_interval(omega)
    return _scalar_or_array(np.maximum(w, 0.0), omega)


def mnssae_abscissa(omega):
    """Spectral abscissa of [[0, omega], [1, 0]]: ``sqrt(omega)`` on [0, 1], else 0."""
    w = _check_unit_interval(omega)
    return _scalar_or_array(np.sqrt(np.maximum(w, 0.0)), omega)


def matrix2x2_abscissa(a11, a12, a21, a22):
    """Largest real part of the eigenvalues of a real 2x2 matrix.

    Uses the trace/determinant quadratic formula with the discriminant written
    as ((a11 - a22)/2)^2 + a12*a21, which keeps diagonal cases exact.
    """
    a11, a12, a21, a22 = (np.asarray(v, dtype=float) for v in (a11, a12, a21, a22))
    if not all(np.all(np.isfinite(v)) for v in (a11, a12, a21, a22)):
        raise ValueError("matrix entries must be finite")
    half_trace = 0.5 * (a11 + a22)
    half_gap = 0.5 * (a11 - a22)
    disc = half_gap * half_gap + a12 * a21
    out = half_trace + np.sqrt(np.maximum(disc, 0.0))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# oscillator with delayed feedback


@dataclass(frozen=True)
class DelayOscillator:
    """Parameters of the delayed-feedback oscillator (tau is the delay)."""

    omega1: float
    omega2: float
    k1: float = 0.0
    k2: float = 0.0
    tau: float = 1.0

    @property
    def a0(self):
        return np.array([[0.0, 1.0],
                         [-self.omega1 ** 2, -2.0 * self.omega1 * self.omega2]])

    @property
    def a1(self):
        return np.array([[0.0, 0.0], [self.k1, self.k2]])


def _char(lam, w1, w2, k1, k2, tau):
    return lam * lam + 2.0 * w1 * w2 * lam + w1 * w1 - (k1 + k2 * lam) * np.exp(-lam * tau)


def _char_prime(lam, w1, w2, k1, k2, tau):
    e = np.exp(-lam * tau)
    return 2.0 * lam + 2.0 * w1 * w2 + tau * (k1 + k2 * lam) * e - k2 * e


def oscillator_char(osc: DelayOscillator, lam):
    """Characteristic function h(lambda) of the delayed oscillator."""
    lam = np.asarray(lam, dtype=complex)
    out = _char(lam, osc.omega1, osc.omega2, osc.k1, osc.k2, osc.tau)
    return complex(out) if out.ndim == 0 else out


def oscillator_char_prime(osc: DelayOscillator, lam):
    lam = np.asarray(lam, dtype=complex)
    out = _char_prime(lam, osc.omega1, osc.omega2, osc.k1, osc.k2, osc.tau)
    return complex(out) if out.ndim == 0 else out


def chebyshev_diff_matrix(N, a=-1.0, b=1.0):
    """Differentiation matrix on the N+1 points cos(j*pi/N) mapped to [a, b].

    Returns ``(D, nodes)`` with nodes ordered from b down to a.
    """
    x = np.cos(np.pi * np.arange(N + 1) / N)
    nodes = a + 0.5 * (x + 1.0) * (b - a)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(N + 1)
    dX = nodes[:, None] - nodes[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D, nodes


def _generator_template(N, tau):
    D, _ = chebyshev_diff_matrix(N, -tau, 0.0)
    A = np.zeros((2 * (N + 1), 2 * (N + 1)))
    A[2:, :] = np.kron(D[1:], np.eye(2))
    return A


def discretize_dde(osc: DelayOscillator, N: int = DEFAULT_DDE_N):
    """Pseudospectral discretization of the infinitesimal generator.

    The state history on [-tau, 0] is represented at N+1 Chebyshev points;
    the first block row imposes the delay equation at theta = 0 and the
    remaining rows differentiate the history.
    """
    N = check_int(N, "N", 4)
    A = _generator_template(N, osc.tau)
    A[:2, :2] += osc.a0
    A[:2, -2:] += osc.a1
    return A


@dataclass
class RootResult:
    """Rightmost characteristic root and how it was obtained."""

    abscissa: float
    root: complex
    refined: bool
    residual: float
    accurate: bool = True
    candidates: np.ndarray = field(default_factory=lambda: np.empty(0, complex), repr=False)


def _newton(lam, w1, w2, k1, k2, tau):
    lam = lam.copy()
    h = _char(lam, w1, w2, k1, k2, tau)
    active = np.isfinite(lam) & ~(np.abs(h) < NEWTON_TOL)
    for _ in range(NEWTON_MAXITER):
        if not active.any():
            break
        with np.errstate(all="ignore"):
            step = h / _char_prime(lam, w1, w2, k1, k2, tau)
            lam = np.where(active, lam - step, lam)
            h = _char(lam, w1, w2, k1, k2, tau)
        active &= np.isfinite(h) & ~(np.abs(h) < NEWTON_TOL)
    return lam, np.abs(h)


def rightmost_roots(omega1, omega2, k1, k2, tau=1.0, N=DEFAULT_DDE_N, refine=True):
    """Batched spectral abscissa of the delayed oscillator.

    ``omega1`` and ``omega2`` are broadcast against each other; the gains and
    delay are shared. Returns ``(abscissa, roots, accurate)`` arrays.
    """
    N = check_int(N, "N", 4)
    w1, w2 = np.broadcast_arrays(np.asarray(omega1, dtype=float).ravel(),
                                 np.asarray(omega2, dtype=float).ravel())
    n = w1.shape[0]
    A = np.broadcast_to(_generator_template(N, tau), (n, 2 * (N + 1), 2 * (N + 1))).copy()
    A[:, 0, 1] += 1.0
    A[:, 1, 0] += -w1 * w1
    A[:, 1, 1] += -2.0 * w1 * w2
    A[:, 1, -2] += k1
    A[:, 1, -1] += k2
    ev = np.linalg.eigvals(A)
    re = ev.real
    top = re.max(axis=1, keepdims=True)
    raw_idx = re.argmax(axis=1)
    raw_roots = ev[np.arange(n), raw_idx]

    if not refine:
        coarse = raw_roots.real
        fine = rightmost_roots(w1, w2, k1, k2, tau, 2 * N, refine=False)[0] if N <= 200 else coarse
        accurate = np.abs(coarse - fine) < 1e-6
        return coarse, raw_roots, accurate

    cand = np.where((re >= top - CANDIDATE_BAND) & (ev.imag >= -1e-12), ev, np.nan + 0j)
    lam, res = _newton(cand, w1[:, None], w2[:, None], k1, k2, tau)
    ok = np.isfinite(lam) & (res < NEWTON_TOL)
    re_ref = np.where(ok, lam.real, -np.inf)
    best = re_ref.argmax(axis=1)
    roots = lam[np.arange(n), best]
    accurate = ok.any(axis=1)
    roots = np.where(accurate, roots, raw_roots)
    return roots.real.copy(), roots, accurate


def rightmost_root(osc: DelayOscillator, N: int = DEFAULT_DDE_N, refine: bool = True) -> RootResult:
    """Rightmost characteristic root of one oscillator, with diagnostics."""
    abscissa, roots, accurate = rightmost_roots(
        osc.omega1, osc.omega2, osc.k1, osc.k2, osc.tau, N, refine)
    root = complex(roots[0])
    residual = abs(oscillator_char(osc, root))
    return RootResult(float(abscissa[0]), root, bool(refine and accurate[0]), residual,
                      bool(accurate[0]))


def spectral_abscissa_dde(osc: DelayOscillator, N: int = DEFAULT_DDE_N, refine: bool = True) -> float:
    """Spectral abscissa of the delayed oscillator.

    When Newton refinement fails on every candidate the unrefined value is
    returned and a ``RuntimeWarning`` is issued; use :func:`rightmost_root`
    to inspect the ``accurate`` flag programmatically.
    """
    result = rightmost_root(osc, N, refine)
    if not result.accurate:
        warnings.warn(f"reduced accuracy for {osc}: returning unrefined abscissa",
                      RuntimeWarning, stacklevel=2)
    return result.abscissa


# ---------------------------------------------------------------------------
# benchmark registry


def oscillator_domain() -> ParamDomain:
    (a, b), (c, d) = OSCILLATOR_BOX
    return ParamDomain((a, c), (b, d))


def _oscillator_field(name, N, refine):
    k1, k2 = OSCILLATOR_GAINS[name]
    domain = oscillator_domain()

    def func(pts):
        phys = domain.from_reference(pts)
        abscissa, _, accurate = rightmost_roots(phys[:, 0], phys[:, 1], k1, k2, 1.0, N, refine)
        if not accurate.all():
            warnings.warn(f"{name}: {np.count_nonzero(~accurate)} point(s) evaluated "
                          "with reduced accuracy", RuntimeWarning, stacklevel=3)
        return abscissa

    return ScalarField(2, func, name=name)


def benchmark_field(name: str, N: int = DEFAULT_DDE_N, refine: bool = True) -> ScalarField:
    """Return the named benchmark as a field on the reference cube.

    ``N`` is the delay discretization size and is ignored for the three
    closed-form one-parameter problems.
    """
    if name == "SAE1":
        return ScalarField(1, lambda p: np.exp(p[:, 0]), name=name)
    if name == "MSSAE1":
        return ScalarField(1, lambda p: np.maximum(p[:, 0], 0.0), name=name)
    if name == "MNSSAE1":
        return ScalarField(1, lambda p: np.sqrt(np.maximum(p[:, 0], 0.0)), name=name)
    if name in OSCILLATOR_GAINS:
        return _oscillator_field(name, check_int(N, "N", 4), refine)
    raise ConfigurationError(f"unknown benchmark {name!r}; expected one of {BENCHMARKS}")


def oscillator_for(name: str, omega1: float, omega2: float) -> DelayOscillator:
    """Oscillator with the gains of benchmark ``name`` at a physical parameter point."""
    if name not in OSCILLATOR_GAINS:
        raise ConfigurationError(f"{name!r} is not an oscillator benchmark")
    k1, k2 = OSCILLATOR_GAINS[name]
    return DelayOscillator(omega1, omega2, k1, k2, 1.0)

