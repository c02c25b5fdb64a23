"""Closed-form Legendre coefficients of the three one-parameter benchmarks.

The exponential case uses the integration-by-parts recurrence for
<e^w, P_{i+1}>, which loses roughly log10((2i+3)!!) digits; it is therefore
run in multiprecision with a working precision sized from that bound and
from the decay of the coefficients themselves. The two
non-smooth cases use ratio recurrences of their Gamma-function closed forms,
which need no Gamma evaluations at all because every base value is rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .exceptions import ConfigurationError
from .polybasis import CoefficientSet, GradedBasis
from .utils import check_int

PROBLEMS = ("SAE1", "MSSAE1", "MNSSAE1")


@dataclass(frozen=True)
class OracleSeries:
    """Legendre coefficients c_0..c_P (inner products already divided by norms)."""

    problem: str
    coeffs: np.ndarray = field(repr=False)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def inner_products(self):
        i = np.arange(len(self.coeffs))
        return self.coeffs / (2 * i + 1)

    def to_coefficient_set(self) -> CoefficientSet:
        basis = GradedBasis("legendre", 1, "total", self.degree)
        return CoefficientSet(basis, self.coeffs, {"method": "oracle", "problem": self.problem})

    def __call__(self, x):
        return self.to_coefficient_set()(x)


def _working_digits(P):
    # rounding errors grow by at most prod_{k<=P} (2k+3) while the coefficients
    # shrink roughly by the same factor, so twice its digits keep c_P accurate
    growth = sum(math.log10(2 * k + 3) for k in range(P + 1))
    return 30 + 2 * int(growth)


def oracle_sae(P: int) -> OracleSeries:
    """Legendre coefficients of e^w via the integration-by-parts recurrence.

    <e^w, p_{i+1}> = (e + (-1)^i / e) / 2 - sum_k c_{i-2k}, with the sum over
    coefficients of the same parity as i.
    """
    P = check_int(P, "P")
    with mpmath.workdps(_working_digits(P)):
        e = mpmath.e
        inv_e = 1 / e
        c = [(e - inv_e) / 2]
        parity_sum = [mpmath.mpf(0), mpmath.mpf(0)]
        for i in range(P):
            parity_sum[i % 2] += c[i]
            inner = (e + (inv_e if i % 2 == 0 else -inv_e)) / 2 - parity_sum[i % 2]
            c.append((2 * (i + 1) + 1) * inner)
        coeffs = np.array([float(v) for v in c])
    return OracleSeries("SAE1", coeffs)


def _ratio_sequence(first, ratio, count):
    """first, first*ratio(0), first*ratio(0)*ratio(1), ... (count terms)."""
    out = np.empty(count)
    if count == 0:
        return out
    out[0] = first
    for j in range(1, count):
        out[j] = out[j - 1] * ratio(j - 1)
    return out


def oracle_mssae(P: int) -> OracleSeries:
    """Legendre coefficients of max(0, w).

    Even inner products are (-1)^j G(j - 1/2) / (4 G(-1/2) G(j + 2)); the
    ratio of consecutive terms is -(j - 1/2)/(j + 2) and the j = 0 term is 1/4.
    The only nonzero odd one is <., p_1> = 1/6.
    """
    P = check_int(P, "P")
    inner = np.zeros(P + 1)
    even = _ratio_sequence(0.25, lambda j: -(j - 0.5) / (j + 2.0), P // 2 + 1)
    inner[0::2] = even
    if P >= 1:
        inner[1] = 1.0 / 6.0
    return OracleSeries("MSSAE1", inner * (2 * np.arange(P + 1) + 1))


def oracle_mnssae(P: int) -> OracleSeries:
    """Legendre coefficients of sqrt(max(0, w)).

    Even terms: (-1)^j G(j - 1/4) G(3/4) / (4 G(-1/4) G(j + 7/4)), first term
    1/3, ratio -(j - 1/4)/(j + 7/4). Odd terms: (-1)^j G(j + 1/4) G(5/4) /
    (4 G(1/4) G(j + 9/4)), first term 1/5, ratio -(j + 1/4)/(j + 9/4).
    """
    P = check_int(P, "P")
    inner = np.zeros(P + 1)
    inner[0::2] = _ratio_sequence(1.0 / 3.0, lambda j: -(j - 0.25) / (j + 1.75), P // 2 + 1)
    inner[1::2] = _ratio_sequence(0.2, lambda j: -(j + 0.25) / (j + 2.25), (P + 1) // 2)
    return OracleSeries("MNSSAE1", inner * (2 * np.arange(P + 1) + 1))


def oracle_coeffs(problem: str, P: int) -> OracleSeries:
    """Dispatch on the benchmark name."""
    try:
        fn = {"SAE1": oracle_sae, "MSSAE1": oracle_mssae, "MNSSAE1": oracle_mnssae}[problem]
    except KeyError:
        raise ConfigurationError(
            f"no closed-form coefficients for {problem!r}; expected one of {PROBLEMS}") from None
    return fn(P)
