"""Concordance between predicted risk and observed survival.

The index scores all usable subject pairs: pairs where the shorter time
is an observed event, plus event-versus-censored pairs at a shared time.
Larger risk should go with shorter survival; ties in risk score half.
Cross-validated evaluation refits the model on fold complements and
scores held-out linear predictors, with fold membership derived from the
time-ordered subjects so the split does not depend on row order.
"""

from __future__ import annotations

import warnings

import numpy as np
from joblib import Parallel, delayed

from .data import SurvivalDataset, default_tau
from .optimize import FitError, FitOptions, fit
from .params import FttmSpec
from .predict import linear_predictor_at
from .select import GridSearchError, grid_search

__all__ = ["c_index", "cv_c_index"]


def c_index(risk, times, delta) -> float:
    """Harrell's concordance index.

    Parameters
    ----------
    risk : array_like
        Risk scores; larger must mean stochastically shorter survival.
    times : array_like
        Observed times.
    delta : array_like
        Event indicators in {0, 1}.

    Returns
    -------
    float in [0, 1]
        Fraction of usable pairs ordered concordantly, ties counting 0.5.

    Raises
    ------
    ValueError
        If no pair is usable (for instance, a fully censored sample).
    """
    risk = np.asarray(risk, dtype=float)
    times = np.asarray(times, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if not (risk.shape == times.shape == delta.shape) or risk.ndim != 1:
        raise ValueError("risk, times, and delta must be equal-length vectors")
    if not (np.all(np.isfinite(risk)) and np.all(np.isfinite(times))):
        raise ValueError("risk scores and times must be finite")
    if not np.all(np.isin(delta, (0.0, 1.0))):
        raise ValueError("event indicators must be 0 or 1")

    earlier = times[:, None] < times[None, :]
    tied_time = times[:, None] == times[None, :]
    event_i = delta[:, None] == 1.0
    censored_j = delta[None, :] == 0.0
    usable = (earlier & event_i) | (tied_time & event_i & censored_j)

    higher = risk[:, None] > risk[None, :]
    tied_risk = risk[:, None] == risk[None, :]
    score = np.where(higher, 1.0, np.where(tied_risk, 0.5, 0.0))

    n_usable = int(usable.sum())
    if n_usable == 0:
        raise ValueError("concordance undefined: no usable pairs")
    return float(score[usable].sum() / n_usable)


def _fold_assignment(ds: SurvivalDataset, k: int, seed: int) -> np.ndarray:
    """Fold label per subject, stratified by event status.

    Within each stratum the subjects are ordered by observed time and
    dealt to folds round robin from a seed-chosen starting fold, so the
    assignment is reproducible and independent of row order (up to exact
    time ties).
    """
    rng = np.random.default_rng(seed)
    labels = np.empty(ds.n, dtype=int)
    for value in (1.0, 0.0):
        members = np.flatnonzero(ds.delta == value)
        ordered = members[np.argsort(ds.y[members], kind="stable")]
        offset = int(rng.integers(k))
        labels[ordered] = (np.arange(ordered.size) + offset) % k
    return labels


def _score_fold(ds, labels, fold, config, tau, options, seed):
    train = ds.subset(np.flatnonzero(labels != fold))
    test = ds.subset(np.flatnonzero(labels == fold))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if isinstance(config, FttmSpec):
                result = fit(config, train, options=options)
            else:
                n0_grid, n1_grid, r_grid = config
                result, _ = grid_search(
                    train, n0_grid, n1_grid, r_grid, tau=tau, options=options
                )
        risk = linear_predictor_at(result, test.x, test.xf, test.grid)
        return c_index(risk, test.y, test.delta)
    except (ValueError, FitError, GridSearchError, np.linalg.LinAlgError) as exc:
        warnings.warn(f"fold {fold} excluded: {exc}", stacklevel=2)
        return np.nan


def cv_c_index(
    ds: SurvivalDataset,
    config,
    k: int,
    seed: int,
    options: FitOptions | None = None,
    n_jobs: int = 1,
) -> tuple[float, np.ndarray]:
    """K-fold cross-validated concordance of the fitted linear predictor.

    Parameters
    ----------
    ds : SurvivalDataset
    config : FttmSpec or (n0_grid, n1_grid, r_grid)
        Either a fixed configuration refitted on every fold complement,
        or degree/family grids selected by AIC per fold.
    k : int
        Number of folds, at least 2.
    seed : int
        Seed for the fold assignment.
    options : FitOptions, optional
    n_jobs : int
        Parallel workers for the fold fits.

    Returns
    -------
    (mean, per_fold) : (float, ndarray of length k)
        Across-fold average and the fold values; folds without a usable
        pair (or with a failed fit) are NaN and excluded from the mean.

    Raises
    ------
    ValueError
        If ``k < 2``, or every fold was excluded.
    """
    if k < 2:
        raise ValueError("cross-validation needs at least 2 folds")
    if k > ds.n:
        raise ValueError("more folds than subjects")
    labels = _fold_assignment(ds, k, seed)
    tau = config.tau if isinstance(config, FttmSpec) else default_tau(ds)
    per_fold = Parallel(n_jobs=n_jobs)(
        delayed(_score_fold)(ds, labels, fold, config, tau, options, seed)
        for fold in range(k)
    )
    per_fold = np.asarray(per_fold, dtype=float)
    if not np.any(np.isfinite(per_fold)):
        raise ValueError("concordance undefined in every fold")
    return float(np.nanmean(per_fold)), per_fold
