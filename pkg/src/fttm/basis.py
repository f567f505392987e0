"""Bernstein polynomial bases for monotone transformations and functional effects.

The sieve spaces used throughout the package are spanned by Bernstein
polynomials on [0, 1].  Two consumers exist: the monotone time
transformation, evaluated at rescaled times ``t / tau``, and the functional
coefficient curve, evaluated on the (rescaled) observation grid of the
functional covariate.  Everything here is plain numerics with no model
state; inputs are validated eagerly so that callers can assume clean
shapes.
"""

from __future__ import annotations

import numpy as np
from scipy.special import comb, gammaln

__all__ = [
    "bernstein_vector",
    "bernstein_matrix",
    "transform_value",
    "transform_deriv",
    "trapezoid_weights",
    "functional_design",
]

# Direct binomial coefficients are exact in float64 up to this degree;
# beyond it the basis is assembled in log space to avoid overflow.
_DIRECT_DEGREE_MAX = 30


def bernstein_matrix(x: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate the full Bernstein basis of a given degree.

    Parameters
    ----------
    x : array_like
        One-dimensional array of evaluation points, all in ``[0, 1]``.
    degree : int
        Degree ``N >= 0`` of the basis; the basis has ``N + 1`` members.

    Returns
    -------
    ndarray of shape ``(len(x), degree + 1)``
        Entry ``[i, k]`` is ``C(N, k) * x_i**k * (1 - x_i)**(N - k)``.
        Each row is a partition of unity.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"evaluation points must be one-dimensional, got ndim={x.ndim}")
    if not isinstance(degree, (int, np.integer)) or degree < 0:
        raise ValueError(f"degree must be a non-negative integer, got {degree!r}")
    if x.size and (not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("evaluation points must be finite and lie in [0, 1]")

    k = np.arange(degree + 1)
    if degree <= _DIRECT_DEGREE_MAX:
        coeff = comb(degree, k)
        return coeff * x[:, None] ** k * (1.0 - x[:, None]) ** (degree - k)

    out = np.zeros((x.size, degree + 1))
    out[x == 0.0, 0] = 1.0
    out[x == 1.0, degree] = 1.0
    interior = (x > 0.0) & (x < 1.0)
    if np.any(interior):
        xi = x[interior, None]
        log_coeff = gammaln(degree + 1) - gammaln(k + 1) - gammaln(degree - k + 1)
        out[interior] = np.exp(log_coeff + k * np.log(xi) + (degree - k) * np.log1p(-xi))
    return out


def bernstein_vector(x: float, degree: int) -> np.ndarray:
    """Bernstein basis at a single point; returns a ``(degree + 1,)`` vector."""
    x = float(x)
    return bernstein_matrix(np.array([x]), degree)[0]


def _check_transform_args(t, coef, tau):
    coef = np.asarray(coef, dtype=float)
    if coef.ndim != 1 or coef.size < 2:
        raise ValueError("transformation needs at least two basis coefficients")
    if not np.all(np.isfinite(coef)):
        raise ValueError("transformation coefficients must be finite")
    tau = float(tau)
    if not np.isfinite(tau) or tau <= 0.0:
        raise ValueError(f"time horizon must be positive and finite, got {tau!r}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if t_arr.size and (not np.all(np.isfinite(t_arr)) or t_arr.min() < 0.0 or t_arr.max() > tau):
        raise ValueError(f"times must lie in [0, {tau}]")
    return t_arr, coef, tau


def transform_value(t, coef, tau: float):
    """Evaluate the sieve time transformation at times ``t``.

    The transformation of degree ``N = len(coef) - 1`` is
    ``sum_k coef[k] * b_k(t / tau, N)``.  Endpoint values are exact:
    the value at 0 is ``coef[0]`` and the value at ``tau`` is ``coef[-1]``.

    Parameters
    ----------
    t : float or array_like
        Times in ``[0, tau]``.
    coef : array_like
        Basis coefficients; monotonicity of the transformation corresponds
        to these being non-decreasing.
    tau : float
        Right endpoint of the modeled time range.

    Returns
    -------
    float or ndarray
        Transformation values, scalar when ``t`` is scalar.
    """
    t_arr, coef, tau = _check_transform_args(t, coef, tau)
    vals = bernstein_matrix(t_arr / tau, coef.size - 1) @ coef
    return vals[0] if np.isscalar(t) or np.ndim(t) == 0 else vals


def transform_deriv(t, coef, tau: float):
    """Derivative of the sieve time transformation at times ``t``.

    Uses the exact degree-reduction identity: the derivative of a degree-N
    Bernstein polynomial is ``N / tau`` times the degree-(N-1) polynomial
    with coefficients ``diff(coef)``.
    """
    t_arr, coef, tau = _check_transform_args(t, coef, tau)
    degree = coef.size - 1
    vals = (degree / tau) * (bernstein_matrix(t_arr / tau, degree - 1) @ np.diff(coef))
    return vals[0] if np.isscalar(t) or np.ndim(t) == 0 else vals


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Composite trapezoid quadrature weights for a strictly increasing grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be one-dimensional with at least two points")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be finite and strictly increasing")
    gaps = np.diff(grid)
    w = np.empty_like(grid)
    w[0] = gaps[0] / 2.0
    w[-1] = gaps[-1] / 2.0
    w[1:-1] = (gaps[:-1] + gaps[1:]) / 2.0
    return w


def functional_design(xf: np.ndarray, grid: np.ndarray, degree: int) -> np.ndarray:
    """Quadrature design for the functional covariate term.

    Computes, for each curve, the vector of integrals of the curve against
    every Bernstein basis member of the given degree, using composite
    trapezoid quadrature on the observation grid.  With the functional
    coefficient expanded in the same basis, the inner product of this
    design row with the coefficient vector is the curve's contribution to
    the linear predictor.

    Parameters
    ----------
    xf : array_like
        Curve values, shape ``(m,)`` for a single curve or ``(n, m)`` for a
        stack of curves observed on a common grid.
    grid : array_like
        Strictly increasing grid of ``m >= 2`` points in ``[0, 1]``.
    degree : int
        Degree of the coefficient basis.

    Returns
    -------
    ndarray
        Shape ``(degree + 1,)`` or ``(n, degree + 1)`` matching ``xf``.
    """
    xf = np.asarray(xf, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if grid.size and (grid.min() < 0.0 or grid.max() > 1.0):
        raise ValueError("grid must lie in [0, 1]; rescale before building the design")
    if xf.ndim not in (1, 2) or xf.shape[-1] != grid.size:
        raise ValueError(
            f"curve values with {xf.shape[-1] if xf.ndim else 0} points do not match "
            f"a grid of {grid.size} points"
        )
    if not np.all(np.isfinite(xf)):
        raise ValueError("curve values must be finite")
    w = trapezoid_weights(grid)
    basis = bernstein_matrix(grid, degree)
    return (xf * w) @ basis
