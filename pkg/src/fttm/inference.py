"""Curvature-based standard errors, Wald intervals, and pointwise bands.

Inference runs in coefficient space (scalar effects, increasing
transformation coefficients, functional loadings) rather than in the
unconstrained optimization space: the observed information is the
negated Jacobian of the analytic score, obtained by central finite
differences, and its inverse supplies the covariance.  Near-singular
curvature, which large sieves produce routinely, is repaired by an
escalating ridge on the diagonal before factorization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .basis import bernstein_matrix
from .data import SurvivalDataset
from .likelihood import build_workspace, coefficient_gradient
from .optimize import FttmFit

__all__ = [
    "CovarianceEstimate",
    "observed_information",
    "estimate_covariance",
    "wald_interval",
    "wald_intervals",
    "functional_band",
    "transformation_band",
]

_Z = 1.96  # default two-sided 95% normal multiplier


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """Coefficient-space covariance with bookkeeping about its repair.

    ``matrix`` is ordered (scalar effects, transformation coefficients,
    functional loadings); ``ridge`` is the diagonal inflation that made
    the information factorizable (zero when none was needed), and
    ``pd_repair_applied`` flags that a repair happened at all.
    ``condition_number`` refers to the information matrix that was
    inverted, ridge included.
    """

    matrix: np.ndarray
    ridge: float
    condition_number: float
    p: int
    n0: int
    n1: int

    @property
    def pd_repair_applied(self) -> bool:
        return self.ridge > 0.0

    @property
    def scalar_block(self) -> np.ndarray:
        return self.matrix[: self.p, : self.p]

    @property
    def transform_block(self) -> np.ndarray:
        k = self.p + self.n0 + 1
        return self.matrix[self.p : k, self.p : k]

    @property
    def functional_block(self) -> np.ndarray:
        k = self.p + self.n0 + 1
        return self.matrix[k:, k:]

    @property
    def scalar_se(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.scalar_block), 0.0, None))


def observed_information(fit: FttmFit, ds: SurvivalDataset) -> np.ndarray:
    """Negated curvature of the log-likelihood at the estimate.

    Central finite differences of the analytic coefficient-space score,
    with per-coordinate steps ``1e-5 * max(1, |estimate|)``; the result
    is symmetrized before being returned.
    """
    ws = build_workspace(fit.spec, ds)
    beta, gamma, theta = fit.params.beta, fit.gamma, fit.params.theta
    center = np.concatenate([beta, gamma, theta])
    p, k = fit.spec.p, fit.spec.n0 + 1

    def score(vec):
        return coefficient_gradient(vec[:p], vec[p : p + k], vec[p + k :], ws)

    dim = center.size
    info = np.empty((dim, dim))
    for j in range(dim):
        h = 1e-5 * max(1.0, abs(center[j]))
        bump = np.zeros(dim)
        bump[j] = h
        info[:, j] = -(score(center + bump) - score(center - bump)) / (2.0 * h)
    return 0.5 * (info + info.T)


def _ridge_inverse(info: np.ndarray):
    """Invert a symmetric matrix, inflating the diagonal only if needed."""
    dim = info.shape[0]
    scale = float(np.trace(info)) / dim
    if not np.isfinite(scale) or scale <= 0.0:
        scale = 1.0
    identity = np.eye(dim)
    ridge = 0.0
    while True:
        try:
            factor = cho_factor(info + ridge * identity, lower=True)
            cov = cho_solve(factor, identity)
            return 0.5 * (cov + cov.T), ridge
        except np.linalg.LinAlgError:
            ridge = 1e-8 * scale if ridge == 0.0 else ridge * 10.0
            if ridge > 1e-2 * scale:
                raise np.linalg.LinAlgError(
                    "observed information is not positive definite even after "
                    f"ridge repair up to {1e-2 * scale:.3g}"
                )


def estimate_covariance(fit: FttmFit, ds: SurvivalDataset) -> CovarianceEstimate:
    """Invert the observed information and attach the result to the fit.

    A warning is emitted when a ridge repair was required, since the
    corresponding standard errors are then conservative approximations.
    """
    info = observed_information(fit, ds)
    cov, ridge = _ridge_inverse(info)
    if ridge > 0.0:
        warnings.warn(
            f"observed information needed a ridge of {ridge:.3g} to factorize",
            stacklevel=2,
        )
    repaired = info + ridge * np.eye(info.shape[0])
    estimate = CovarianceEstimate(
        matrix=cov,
        ridge=ridge,
        condition_number=float(np.linalg.cond(repaired)),
        p=fit.spec.p,
        n0=fit.spec.n0,
        n1=fit.spec.n1,
    )
    fit.covariance = estimate
    return estimate


def _require_covariance(fit: FttmFit) -> CovarianceEstimate:
    if fit.covariance is None:
        raise ValueError("no covariance attached; run estimate_covariance(fit, ds) first")
    return fit.covariance


def wald_interval(estimate: float, se: float, z: float = _Z) -> tuple[float, float]:
    """Normal-theory interval ``estimate +- z * se`` for one quantity."""
    if se < 0.0:
        raise ValueError(f"standard error must be nonnegative, got {se}")
    return float(estimate - z * se), float(estimate + z * se)


def wald_intervals(fit: FttmFit, z: float = _Z):
    """Intervals for the scalar effects (95% by default).

    Returns
    -------
    (estimate, se, lower, upper) : tuple of ndarrays, each of length p.
    """
    cov = _require_covariance(fit)
    est = fit.params.beta
    se = cov.scalar_se
    return est, se, est - z * se, est + z * se


def functional_band(fit: FttmFit, s: np.ndarray, z: float = _Z):
    """Functional coefficient curve with a pointwise band on ``s``."""
    cov = _require_covariance(fit)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    basis = bernstein_matrix(s, fit.spec.n1)
    est = basis @ fit.params.theta
    se = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", basis, cov.functional_block, basis), 0.0, None))
    return est, se, est - z * se, est + z * se


def transformation_band(fit: FttmFit, t: np.ndarray, z: float = _Z):
    """Fitted transformation curve with a pointwise band on ``t``."""
    cov = _require_covariance(fit)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    basis = bernstein_matrix(t / fit.spec.tau, fit.spec.n0)
    est = basis @ fit.gamma
    se = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", basis, cov.transform_block, basis), 0.0, None))
    return est, se, est - z * se, est + z * se
