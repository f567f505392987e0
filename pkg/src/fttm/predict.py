"""Conditional survival prediction from a fitted model.

All operations evaluate the fitted transformation and linear predictor;
nothing here touches the data the model was estimated on except
:func:`pseudo_residuals`, which scores the fit at the observed times.
The transformation is defined on ``[0, tau]`` only, so requests beyond
the horizon raise instead of extrapolating.
"""

from __future__ import annotations

import warnings

import numpy as np

from .basis import bernstein_matrix, functional_design
from .data import SurvivalDataset
from .optimize import FttmFit

__all__ = [
    "HorizonError",
    "linear_predictor_at",
    "survival_at",
    "h_inverse",
    "expected_survival",
    "pseudo_residuals",
]

# -log(survival) beyond this is numerically indistinguishable from
# infinity in double precision; residuals are capped here
_RESIDUAL_CAP = 700.0


class HorizonError(ValueError):
    """A requested value lies outside the fitted transformation range.

    ``boundary`` is the time endpoint (0 or ``tau``) the request would
    clamp to.
    """

    def __init__(self, message, boundary):
        super().__init__(message)
        self.boundary = float(boundary)


def _transform_at(fit: FttmFit, t: np.ndarray) -> np.ndarray:
    return bernstein_matrix(np.asarray(t, dtype=float) / fit.spec.tau, fit.spec.n0) @ fit.gamma


def linear_predictor_at(fit: FttmFit, x_row, xf_values, grid) -> float | np.ndarray:
    """Estimated linear predictor for one or more covariate profiles.

    Parameters
    ----------
    fit : FttmFit
    x_row : array_like
        Scalar covariates, shape ``(p,)`` or ``(n, p)``.
    xf_values : array_like
        Functional covariate on ``grid``, shape ``(m,)`` or ``(n, m)``.
    grid : array_like
        Strictly increasing observation grid inside ``[0, 1]``.

    Returns
    -------
    float or ndarray
        Scalar for a single profile, length-``n`` vector for a stack.
    """
    x = np.asarray(x_row, dtype=float)
    xf = np.asarray(xf_values, dtype=float)
    single = x.ndim <= 1 and xf.ndim == 1
    x = np.atleast_2d(x)
    xf = np.atleast_2d(xf)
    if x.shape[1] != fit.spec.p:
        raise ValueError(f"expected {fit.spec.p} scalar covariates, got {x.shape[1]}")
    if x.shape[0] != xf.shape[0]:
        raise ValueError("scalar and functional covariates disagree on the profile count")
    z = functional_design(xf, np.asarray(grid, dtype=float), fit.spec.n1)
    lp = x @ fit.params.beta + z @ fit.params.theta
    return float(lp[0]) if single else lp


def survival_at(fit: FttmFit, x_row, xf_values, grid, t) -> float | np.ndarray:
    """Predicted survival probability at time ``t``.

    Evaluates the fitted error-family survival function at
    ``H(t) + linear predictor``.  ``t`` may be a scalar or a vector of
    times, all inside ``[0, tau]``; a single profile with a scalar ``t``
    yields a float, a vector ``t`` a vector, and stacked profiles an
    ``(n, len(t))`` matrix.

    Raises
    ------
    HorizonError
        If any requested time lies outside ``[0, tau]``.
    """
    scalar_t = np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    tau = fit.spec.tau
    if not np.all(np.isfinite(t_arr)):
        raise ValueError("prediction times must be finite")
    if np.any(t_arr < 0.0):
        raise HorizonError("prediction times must be nonnegative", 0.0)
    if np.any(t_arr > tau):
        raise HorizonError(
            f"prediction beyond the fitted horizon {tau} is undefined", tau
        )
    lp = linear_predictor_at(fit, x_row, xf_values, grid)
    h_vals = _transform_at(fit, t_arr)
    if np.ndim(lp) == 0:
        surv = fit.spec.error.survival(h_vals + lp)
        return float(surv[0]) if scalar_t else surv
    surv = fit.spec.error.survival(np.add.outer(lp, h_vals))
    return surv[:, 0] if scalar_t else surv


def h_inverse(fit: FttmFit, v: float) -> float:
    """Invert the fitted transformation by bisection on ``[0, tau]``.

    Stops when ``|H(t) - v| <= 1e-10 * (1 + |v|)`` or the bracket is
    narrower than ``1e-12 * tau``; both are attainable because the
    fitted transformation is increasing.

    Raises
    ------
    HorizonError
        If ``v`` is outside ``[H(0), H(tau)]``; the exception's
        ``boundary`` is the endpoint the request would clamp to.
    """
    v = float(v)
    tau = fit.spec.tau
    h0, h1 = float(fit.gamma[0]), float(fit.gamma[-1])
    if v < h0:
        raise HorizonError(
            f"value {v:.6g} below the transformation range [{h0:.6g}, {h1:.6g}]; "
            "it would clamp to t = 0", 0.0
        )
    if v > h1:
        raise HorizonError(
            f"value {v:.6g} above the transformation range [{h0:.6g}, {h1:.6g}]; "
            f"it would clamp to t = tau = {tau:.6g}", tau
        )
    lo, hi = 0.0, tau
    tol = 1e-10 * (1.0 + abs(v))
    while hi - lo > 1e-12 * tau:
        mid = 0.5 * (lo + hi)
        value = float(_transform_at(fit, np.array([mid]))[0])
        if abs(value - v) <= tol:
            return mid
        if value < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expected_survival(fit: FttmFit, x_row, xf_values, grid) -> float:
    """Approximate expected survival time for one covariate profile.

    Inverts the transformation at minus the linear predictor shifted by
    the error mean.  This is an approximation to the conditional mean,
    not an identity, and it exists only when the inversion point falls
    inside the fitted transformation range.
    """
    lp = linear_predictor_at(fit, x_row, xf_values, grid)
    if np.ndim(lp) != 0:
        raise ValueError("expected_survival takes a single covariate profile")
    return h_inverse(fit, -(lp + fit.spec.error.mean()))


def pseudo_residuals(fit: FttmFit, ds: SurvivalDataset) -> np.ndarray:
    """Exponential-scale residuals ``-log S(Y_i | covariates)``.

    Under a correct model the pairs ``(U_i, delta_i)`` behave like a
    right-censored sample from a unit exponential.  Residuals beyond 700
    (survival underflowing to zero) are capped with a warning.
    """
    if ds.p != fit.spec.p:
        raise ValueError(f"dataset has {ds.p} scalar covariates, fit expects {fit.spec.p}")
    if float(ds.y.max()) > fit.spec.tau:
        raise HorizonError(
            "observed times exceed the fitted horizon", fit.spec.tau
        )
    lp = linear_predictor_at(fit, ds.x, ds.xf, ds.grid)
    u = -fit.spec.error.log_survival(_transform_at(fit, ds.y) + lp)
    capped = u > _RESIDUAL_CAP
    if np.any(capped):
        warnings.warn(
            f"{int(capped.sum())} residual(s) exceeded {_RESIDUAL_CAP:.0f} and were capped",
            stacklevel=2,
        )
        u = np.where(capped, _RESIDUAL_CAP, u)
    return u
