"""Statistics of a Legendre chaos expansion: moments and Sobol indices."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exceptions import ConfigurationError
from .polybasis import CoefficientSet


@dataclass(frozen=True)
class SensitivityReport:
    """Mean, variance and variance-based sensitivity indices of an expansion.

    ``sobol`` maps each nonempty subset of input axes (1-based tuples) to its
    Sobol index, ``total`` holds the total-order index of every axis.
    """

    mean: float
    variance: float
    sobol: dict = field(default_factory=dict)
    total: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    degenerate: bool = False
    P: int = 0

    def table(self):
        """Aligned plain-text rendering."""
        lines = [f"mean      {self.mean:.17g}", f"variance  {self.variance:.17g}",
                 f"terms     {self.P + 1}"]
        if self.degenerate:
            lines.append("zero variance: indices reported as 0")
        width = max((len(_subset_label(s)) for s in self.sobol), default=1)
        for subset, value in self.sobol.items():
            lines.append(f"S{_subset_label(subset):<{width}}  {value:.17g}")
        for d, value in enumerate(self.total, start=1):
            lines.append(f"T{{{d}}}{' ' * max(width - len(str(d)) - 2, 0)}  {value:.17g}")
        return "\n".join(lines)


def _subset_label(subset):
    return "{" + ",".join(str(d) for d in subset) + "}"


def _require_legendre(coeffs):
    if coeffs.family != "legendre":
        raise ConfigurationError(
            "statistics need a Legendre expansion; convert Chebyshev sets with cheb_to_leg")


def pce_mean(coeffs: CoefficientSet) -> float:
    """Expectation under the uniform germ: the constant coefficient."""
    _require_legendre(coeffs)
    return float(coeffs.coeffs[0])


def _contributions(coeffs):
    # c_i^2 <p_i, p_i>, with the constant term zeroed
    c = coeffs.coeffs
    contrib = c * c * coeffs.basis.norms_sq()
    contrib[0] = 0.0
    return contrib


def pce_variance(coeffs: CoefficientSet) -> float:
    """Variance of the truncated expansion."""
    _require_legendre(coeffs)
    return float(np.sum(_contributions(coeffs)))


def sobol_indices(coeffs: CoefficientSet) -> SensitivityReport:
    """Sobol indices from the partition of multi-indices by their support."""
    _require_legendre(coeffs)
    D = coeffs.dimension
    contrib = _contributions(coeffs)
    variance = float(contrib.sum())
    support = np.array(coeffs.basis.indices) > 0

    subsets = [s for r in range(1, D + 1) for s in combinations(range(1, D + 1), r)]
    mass = {}
    for subset in subsets:
        mask = np.zeros(D, dtype=bool)
        mask[np.array(subset) - 1] = True
        mass[subset] = float(contrib[(support == mask).all(axis=1)].sum())

    degenerate = not variance > 0.0
    if degenerate:
        sobol = {s: 0.0 for s in subsets}
        total = np.zeros(D)
    else:
        sobol = {s: m / variance for s, m in mass.items()}
        total = np.array([sum(v for s, v in sobol.items() if d in s) for d in range(1, D + 1)])
    return SensitivityReport(pce_mean(coeffs), variance, sobol, total, degenerate,
                             len(coeffs) - 1)
