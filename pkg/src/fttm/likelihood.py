"""Censored log-likelihood of the transformation model and its gradient.

For subject i with observed time ``y_i``, event indicator ``d_i``, scalar
covariates ``x_i`` and functional design row ``z_i`` (integrals of the
curve against the coefficient basis), write ``u_i = H(y_i) + x_i'beta +
z_i'theta`` for the transformation ``H`` determined by the increasing
coefficients ``gamma``.  The log-likelihood is

    sum_i  d_i * [log H'(y_i) + log f(u_i)]  +  (1 - d_i) * log S(u_i)

with ``f`` and ``S`` the density and survival function of the fixed error
family.  Everything that depends only on the data and the model
configuration (basis matrices, quadrature design, event masks) lives in a
:class:`LikelihoodWorkspace` built once per fit; evaluations at new
parameters are then a handful of matrix-vector products.

The gradient is analytic.  In the unconstrained parametrization the
increments enter through ``gamma_from_eta``, whose triangular Jacobian
turns into a reversed cumulative sum; no matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import bernstein_matrix, functional_design
from .data import SurvivalDataset
from .params import FttmSpec, RawParams, gamma_from_eta

__all__ = [
    "LikelihoodWorkspace",
    "build_workspace",
    "log_likelihood",
    "gradient",
    "linear_predictor",
    "coefficient_log_likelihood",
    "coefficient_gradient",
]

# returned instead of -inf when an event sits where the fitted
# transformation has nonpositive slope; keeps line searches finite
IMPOSSIBLE_LOGLIK = -1e300

_ETA_CAP = 700.0


@dataclass(frozen=True, eq=False)
class LikelihoodWorkspace:
    """Data-dependent quantities shared by every likelihood evaluation."""

    spec: FttmSpec
    n: int
    event: np.ndarray
    x: np.ndarray
    z: np.ndarray
    basis_y: np.ndarray
    basis_y_slope: np.ndarray
    slope_scale: float


def build_workspace(spec: FttmSpec, ds: SurvivalDataset) -> LikelihoodWorkspace:
    """Precompute basis matrices and design rows for one model and sample.

    Raises
    ------
    ValueError
        If the scalar covariate count disagrees with the model, or any
        observed time falls outside ``[0, tau]``.
    """
    if ds.p != spec.p:
        raise ValueError(f"model expects {spec.p} scalar covariates, data has {ds.p}")
    if float(np.max(ds.y)) > spec.tau or float(np.min(ds.y)) < 0.0:
        raise ValueError("every observed time must lie in [0, tau]")
    rescaled = ds.y / spec.tau
    return LikelihoodWorkspace(
        spec=spec,
        n=ds.n,
        event=np.asarray(ds.delta == 1.0),
        x=ds.x,
        z=functional_design(ds.xf, ds.grid, spec.n1),
        basis_y=bernstein_matrix(rescaled, spec.n0),
        basis_y_slope=bernstein_matrix(rescaled, spec.n0 - 1),
        slope_scale=spec.n0 / spec.tau,
    )


def linear_predictor(params: RawParams, ws: LikelihoodWorkspace) -> np.ndarray:
    """Per-subject covariate contribution ``x'beta + z'theta``."""
    return ws.x @ params.beta + ws.z @ params.theta


def _curve_parts(gamma: np.ndarray, ws: LikelihoodWorkspace):
    values = ws.basis_y @ gamma
    slopes = ws.slope_scale * (ws.basis_y_slope @ np.diff(gamma))
    return values, slopes


def _loglik_from_coefficients(beta, gamma, theta, ws: LikelihoodWorkspace) -> float:
    values, slopes = _curve_parts(gamma, ws)
    u = values + ws.x @ beta + ws.z @ theta
    ev = ws.event
    slopes_ev = slopes[ev]
    if slopes_ev.size and float(np.min(slopes_ev)) <= 0.0:
        return IMPOSSIBLE_LOGLIK
    fam = ws.spec.error
    total = (
        float(np.sum(np.log(slopes_ev)))
        + float(np.sum(fam.log_density(u[ev])))
        + float(np.sum(fam.log_survival(u[~ev])))
    )
    if np.isnan(total):
        raise FloatingPointError(
            f"log-likelihood is NaN; first bad subject index {_first_bad_subject(u, slopes, ws)}"
        )
    return total


def _grad_from_coefficients(beta, gamma, theta, ws: LikelihoodWorkspace):
    """Gradient blocks with respect to (beta, gamma, theta)."""
    values, slopes = _curve_parts(gamma, ws)
    u = values + ws.x @ beta + ws.z @ theta
    ev = ws.event
    fam = ws.spec.error
    w = np.empty(ws.n)
    w[ev] = fam.log_density_slope(u[ev])
    w[~ev] = fam.log_survival_slope(u[~ev])

    g_beta = w @ ws.x
    g_theta = w @ ws.z
    g_gamma = w @ ws.basis_y
    # events add d/dgamma of log H'(y); the slope basis has one less member
    v = ws.slope_scale / slopes[ev]
    s = v @ ws.basis_y_slope[ev]
    g_gamma[0] -= s[0]
    if s.size > 1:
        g_gamma[1:-1] += s[:-1] - s[1:]
    g_gamma[-1] += s[-1]
    return g_beta, g_gamma, g_theta


def _first_bad_subject(u, slopes, ws) -> int:
    fam = ws.spec.error
    per_subject = np.where(
        ws.event, np.log(np.maximum(slopes, 0.0)) + fam.log_density(u), fam.log_survival(u)
    )
    bad = np.flatnonzero(np.isnan(per_subject))
    return int(bad[0]) if bad.size else -1


def _loglik_vector(vec: np.ndarray, ws: LikelihoodWorkspace) -> float:
    p, k = ws.spec.p, ws.spec.n0 + 1
    gamma = gamma_from_eta(vec[p : p + k])
    return _loglik_from_coefficients(vec[:p], gamma, vec[p + k :], ws)


def _gradient_vector(vec: np.ndarray, ws: LikelihoodWorkspace) -> np.ndarray:
    p, k = ws.spec.p, ws.spec.n0 + 1
    eta = vec[p : p + k]
    gamma = gamma_from_eta(eta)
    g_beta, g_gamma, g_theta = _grad_from_coefficients(vec[:p], gamma, vec[p + k :], ws)
    # chain rule through the increment map: lower-triangular Jacobian with
    # constant columns collapses to a reversed cumulative sum
    tail_sums = np.cumsum(g_gamma[::-1])[::-1]
    g_eta = np.empty_like(g_gamma)
    g_eta[0] = tail_sums[0]
    g_eta[1:] = np.exp(np.minimum(eta[1:], _ETA_CAP)) * tail_sums[1:]
    return np.concatenate([g_beta, g_eta, g_theta])


def log_likelihood(params: RawParams, ws: LikelihoodWorkspace) -> float:
    """Censored log-likelihood at the given free parameters.

    Returns a large negative sentinel (never ``-inf``) when the
    transformation slope is nonpositive at an observed event, which can
    only happen for parameters built directly from coefficients rather
    than through the unconstrained map.
    """
    if not params.matches(ws.spec):
        raise ValueError("parameter block sizes do not match the model configuration")
    return _loglik_vector(params.pack(), ws)


def gradient(params: RawParams, ws: LikelihoodWorkspace) -> np.ndarray:
    """Analytic gradient in the packed free parametrization."""
    if not params.matches(ws.spec):
        raise ValueError("parameter block sizes do not match the model configuration")
    return _gradient_vector(params.pack(), ws)


def coefficient_log_likelihood(beta, gamma, theta, ws: LikelihoodWorkspace) -> float:
    """Log-likelihood parametrized by raw increasing coefficients.

    Used by curvature computations that differentiate in coefficient
    space; ``gamma`` need not be increasing, in which case the sentinel
    value may be returned.
    """
    return _loglik_from_coefficients(
        np.asarray(beta, dtype=float),
        np.asarray(gamma, dtype=float),
        np.asarray(theta, dtype=float),
        ws,
    )


def coefficient_gradient(beta, gamma, theta, ws: LikelihoodWorkspace) -> np.ndarray:
    """Packed gradient with respect to ``(beta, gamma, theta)``."""
    g_beta, g_gamma, g_theta = _grad_from_coefficients(
        np.asarray(beta, dtype=float),
        np.asarray(gamma, dtype=float),
        np.asarray(theta, dtype=float),
        ws,
    )
    return np.concatenate([g_beta, g_gamma, g_theta])
