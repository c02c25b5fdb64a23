"""Input validation helpers shared by the numerical modules."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ConfigurationError, DomainError

# slack for points produced by affine maps / cosines that land a hair outside
_CUBE_SLACK = 1e-12


def check_int(value, name, minimum=0):
    """Return ``value`` as a Python int, rejecting bools, floats and small values."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def as_points(points, dim):
    """Coerce ``points`` to a float array of shape (n, dim).

    Returns the array together with the leading shape that callers should use
    to reshape per-point results. For ``dim == 1`` a scalar or any-shaped array
    of coordinates is accepted; otherwise the trailing axis must have length
    ``dim``.
    """
    arr = np.asarray(points, dtype=float)
    if dim == 1:
        if arr.ndim >= 1 and arr.shape[-1] == 1 and arr.ndim == 2:
            lead = arr.shape[:-1]
        else:
            lead = arr.shape
        return arr.reshape(-1, 1), lead
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ConfigurationError(
            f"expected points with trailing dimension {dim}, got shape {arr.shape}")
    return arr.reshape(-1, dim), arr.shape[:-1]


def check_in_cube(pts, slack=_CUBE_SLACK):
    """Raise DomainError if any coordinate lies outside [-1, 1]."""
    pts = np.asarray(pts, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise DomainError("non-finite coordinate")
    if pts.size and np.max(np.abs(pts)) > 1.0 + slack:
        raise DomainError(
            f"point outside [-1, 1]: max |coordinate| = {np.max(np.abs(pts))!r}")
    return pts
