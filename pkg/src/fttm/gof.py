"""Cumulative-hazard diagnostics for fitted residuals.

A correctly specified model turns the observed times into residuals that
are censored unit-exponential draws, so their cumulative hazard should
track the identity line.  This module estimates that cumulative hazard
nonparametrically and packages the comparison curve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import SurvivalDataset
from .optimize import FttmFit
from .predict import pseudo_residuals

__all__ = ["StepFunction", "nelson_aalen", "gof_curve"]

_Z = 1.96


def _frozen(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous nondecreasing step function with variances.

    ``knots`` are the (strictly increasing) jump locations, ``values``
    the function values from each knot onward, and ``variances`` the
    accumulated variance at each knot.  Before the first knot the
    function and its variance are zero; an empty knot set is the constant
    zero function.
    """

    knots: np.ndarray
    values: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        knots = np.atleast_1d(np.asarray(self.knots, dtype=float))
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        variances = np.atleast_1d(np.asarray(self.variances, dtype=float))
        if not (knots.shape == values.shape == variances.shape) or knots.ndim != 1:
            raise ValueError("knots, values, and variances must be equal-length vectors")
        if knots.size and np.any(np.diff(knots) <= 0.0):
            raise ValueError("knots must be strictly increasing")
        if knots.size and (np.any(np.diff(values) < 0.0) or np.any(np.diff(variances) < 0.0)):
            raise ValueError("values and variances must be nondecreasing")
        for name, arr in (("knots", knots), ("values", values), ("variances", variances)):
            object.__setattr__(self, name, _frozen(arr))

    def __call__(self, t) -> float | np.ndarray:
        scalar = np.ndim(t) == 0
        idx = np.searchsorted(self.knots, np.atleast_1d(t), side="right") - 1
        padded = np.concatenate([[0.0], self.values])
        out = padded[idx + 1]
        return float(out[0]) if scalar else out

    def variance_at(self, t) -> float | np.ndarray:
        scalar = np.ndim(t) == 0
        idx = np.searchsorted(self.knots, np.atleast_1d(t), side="right") - 1
        padded = np.concatenate([[0.0], self.variances])
        out = padded[idx + 1]
        return float(out[0]) if scalar else out


def nelson_aalen(times, delta) -> StepFunction:
    """Nonparametric cumulative hazard of a right-censored sample.

    At each distinct event time the hazard increments by
    ``events / at-risk`` and the variance by ``events / at-risk**2``;
    subjects censored exactly at an event time still count as at risk
    for that event.

    Parameters
    ----------
    times : array_like
        Nonnegative observed times.
    delta : array_like
        Event indicators in {0, 1}.

    Returns
    -------
    StepFunction
        Constant zero (with a warning) when the sample has no events.
    """
    times = np.asarray(times, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if times.ndim != 1 or times.shape != delta.shape:
        raise ValueError("times and event indicators must be equal-length vectors")
    if not np.all(np.isfinite(times)) or np.any(times < 0.0):
        raise ValueError("times must be finite and nonnegative")
    if not np.all(np.isin(delta, (0.0, 1.0))):
        raise ValueError("event indicators must be 0 or 1")
    if not np.any(delta == 1.0):
        warnings.warn("no events; cumulative hazard is identically zero", stacklevel=2)
        empty = np.empty(0)
        return StepFunction(knots=empty, values=empty, variances=empty)

    event_times = times[delta == 1.0]
    knots, counts = np.unique(event_times, return_counts=True)
    # subjects with times >= knot are at risk; searchsorted on the sorted
    # sample counts how many fall strictly before it
    at_risk = times.size - np.searchsorted(np.sort(times), knots, side="left")
    increments = counts / at_risk
    return StepFunction(
        knots=knots,
        values=np.cumsum(increments),
        variances=np.cumsum(counts / at_risk**2),
    )


def gof_curve(fit: FttmFit, ds: SurvivalDataset):
    """Goodness-of-fit comparison curve on the residual scale.

    Computes the residuals of the fit, estimates their cumulative hazard,
    and evaluates it at each event knot with 95% pointwise limits.  A
    good fit keeps the curve close to the identity line.

    Returns
    -------
    (u, lambda_hat, lo, hi) : tuple of ndarrays
        Empty arrays (with a warning) when the data contain no events.
    """
    u = pseudo_residuals(fit, ds)
    step = nelson_aalen(u, ds.delta)
    lam = step.values
    se = np.sqrt(step.variances)
    return step.knots, lam, lam - _Z * se, lam + _Z * se
