"""Model selection over sieve degrees and the error-family parameter.

Candidate configurations are compared by AIC after a full fit of each.
Ties prefer the smaller sieve (sum of the two degrees), then the smaller
family parameter, then grid order, so selection is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .data import SurvivalDataset, default_tau
from .errors import logarithmic
from .optimize import FitError, FitOptions, FttmFit, fit
from .params import FttmSpec

__all__ = ["GridCell", "GridSearchError", "DEFAULT_R_GRID", "aic", "grid_search"]

DEFAULT_R_GRID = (0.0, 0.35, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class GridCell:
    """One row of the selection table."""

    n0: int
    n1: int
    r: float
    loglik: float
    aic: float
    converged: bool


class GridSearchError(RuntimeError):
    """No candidate converged; carries the full selection table."""

    def __init__(self, message, table):
        super().__init__(message)
        self.table = tuple(table)


def aic(fit_result: FttmFit) -> float:
    """Selection criterion of a fit (lower is better)."""
    return fit_result.aic


def _fit_cell(n0, n1, r, ds, tau, p, options, sieve_bound):
    spec = FttmSpec(
        n0=n0, n1=n1, error=logarithmic(r), tau=tau, p=p, sieve_bound=sieve_bound
    )
    try:
        return fit(spec, ds, options)
    except FitError:
        raise
    except (FloatingPointError, np.linalg.LinAlgError):
        return None


def grid_search(
    ds: SurvivalDataset,
    n0_grid,
    n1_grid,
    r_grid=DEFAULT_R_GRID,
    tau: float | None = None,
    options: FitOptions | None = None,
    sieve_bound: float | None = None,
    n_jobs: int = 1,
):
    """Fit every combination of degrees and family parameter; pick by AIC.

    Parameters
    ----------
    ds : SurvivalDataset
    n0_grid, n1_grid : iterable of int
        Candidate transformation and functional-coefficient degrees.
    r_grid : iterable of float
        Candidate logarithmic-family parameters (default
        ``{0, 0.35, 0.5, 1, 2, 4}``).
    tau : float, optional
        Shared time horizon; defaults to the data-driven choice so that
        all candidates maximize the same likelihood.
    n_jobs : int
        Parallel workers for the candidate fits (joblib).

    Returns
    -------
    (best, table) : (FttmFit, list of GridCell)
        The winning fit and the full table in grid order (``r`` outermost,
        then ``n0``, then ``n1``).  Candidates that failed to converge are
        listed but never selected.

    Raises
    ------
    GridSearchError
        If no candidate converges.
    """
    horizon = default_tau(ds) if tau is None else float(tau)
    combos = [
        (int(n0), int(n1), float(r)) for r in r_grid for n0 in n0_grid for n1 in n1_grid
    ]
    if not combos:
        raise ValueError("empty selection grid")

    fits = Parallel(n_jobs=n_jobs)(
        delayed(_fit_cell)(n0, n1, r, ds, horizon, ds.p, options, sieve_bound)
        for n0, n1, r in combos
    )

    table: list[GridCell] = []
    candidates = []
    for idx, ((n0, n1, r), fit_result) in enumerate(zip(combos, fits)):
        if fit_result is None:
            table.append(GridCell(n0, n1, r, np.nan, np.nan, False))
            continue
        cell = GridCell(n0, n1, r, fit_result.loglik, fit_result.aic, fit_result.converged)
        table.append(cell)
        if fit_result.converged:
            candidates.append(((cell.aic, n0 + n1, r, idx), fit_result))
    if not candidates:
        raise GridSearchError("no selection candidate converged", table)
    best = min(candidates, key=lambda pair: pair[0])[1]
    return best, table
