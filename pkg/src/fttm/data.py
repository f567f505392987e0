"""Right-censored survival data with scalar and functional covariates.

A :class:`SurvivalDataset` bundles observed times, event indicators, a
scalar covariate matrix, and curves of a functional covariate observed on
a shared grid.  Construction enforces shape agreement and freezes the
arrays; statistical problems (no events, bad indicator codes, grids in
the wrong order, ...) are reported by :func:`validate` as findings so
callers can decide what is fatal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SurvivalDataset", "Finding", "validate", "default_tau"]


@dataclass(frozen=True)
class Finding:
    """One validation message; ``level`` is ``"error"`` or ``"warning"``."""

    level: str
    code: str
    message: str


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SurvivalDataset:
    """Immutable container for one sample.

    Parameters
    ----------
    y : array_like, shape (n,)
        Observed times (event or censoring, whichever came first).
    delta : array_like, shape (n,)
        Event indicators; 1 for an observed event, 0 for censoring.
    x : array_like, shape (n, p)
        Scalar covariates; ``p`` may be zero.
    xf : array_like, shape (n, m)
        Functional covariate curves on a common grid.
    grid : array_like, shape (m,)
        Observation grid of the curves, rescaled to the unit interval.
    scalar_names : tuple of str, optional
        Column names for ``x``; defaults to ``x1, x2, ...``.
    grid_range : (float, float), optional
        Original grid endpoints before rescaling, kept for reporting.
    ids : tuple, optional
        Subject identifiers; defaults to ``1..n``.
    """

    y: np.ndarray
    delta: np.ndarray
    x: np.ndarray
    xf: np.ndarray
    grid: np.ndarray
    scalar_names: tuple = ()
    grid_range: tuple = (0.0, 1.0)
    ids: tuple = field(default=(), repr=False)

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        delta = np.atleast_1d(np.asarray(self.delta, dtype=float))
        x = np.asarray(self.x, dtype=float)
        xf = np.asarray(self.xf, dtype=float)
        grid = np.atleast_1d(np.asarray(self.grid, dtype=float))
        if x.ndim == 1:
            x = x[:, None]
        if y.ndim != 1 or delta.shape != y.shape:
            raise ValueError("times and event indicators must be equal-length vectors")
        n = y.size
        if n == 0:
            raise ValueError("dataset must contain at least one subject")
        if x.ndim != 2 or x.shape[0] != n:
            raise ValueError(f"scalar covariates must have shape ({n}, p), got {x.shape}")
        if xf.ndim != 2 or xf.shape[0] != n:
            raise ValueError(f"functional covariates must have shape ({n}, m), got {xf.shape}")
        if grid.ndim != 1 or grid.size != xf.shape[1]:
            raise ValueError(
                f"grid of {grid.size} points does not match curves with {xf.shape[1]} points"
            )
        if grid.size < 2:
            raise ValueError("functional grid needs at least two points")
        names = tuple(self.scalar_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise ValueError("scalar_names length does not match the covariate count")
        ids = tuple(self.ids) or tuple(range(1, n + 1))
        if len(ids) != n:
            raise ValueError("ids length does not match the subject count")
        lo, hi = self.grid_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("grid_range must be an increasing pair of finite numbers")
        for name, arr in (("y", y), ("delta", delta), ("x", x), ("xf", xf), ("grid", grid)):
            object.__setattr__(self, name, _frozen(arr))
        object.__setattr__(self, "scalar_names", names)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "grid_range", (float(lo), float(hi)))

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def m(self) -> int:
        return self.grid.size

    @property
    def n_events(self) -> int:
        return int(np.sum(self.delta == 1.0))

    @property
    def event_fraction(self) -> float:
        return self.n_events / self.n

    def subset(self, index) -> "SurvivalDataset":
        """New dataset restricted to the given subject indices."""
        index = np.asarray(index)
        return SurvivalDataset(
            y=self.y[index],
            delta=self.delta[index],
            x=self.x[index],
            xf=self.xf[index],
            grid=self.grid,
            scalar_names=self.scalar_names,
            grid_range=self.grid_range,
            ids=tuple(np.asarray(self.ids, dtype=object)[index]),
        )


def validate(ds: SurvivalDataset) -> list[Finding]:
    """Statistical sanity checks; returns error and warning findings.

    Errors make a fit meaningless (no events, malformed indicators,
    nonpositive or nonfinite values, a disordered grid).  Warnings flag
    fragile designs: a rank-deficient scalar covariate matrix or a
    censoring fraction above 95%.
    """
    findings: list[Finding] = []

    if not np.all(np.isfinite(ds.y)):
        findings.append(Finding("error", "nonfinite-time", "observed times contain NaN or inf"))
    elif np.any(ds.y <= 0.0):
        findings.append(
            Finding("error", "nonpositive-time", "observed times must be strictly positive")
        )
    bad = ~np.isin(ds.delta, (0.0, 1.0))
    if np.any(bad):
        findings.append(
            Finding(
                "error",
                "bad-status",
                f"event indicators must be 0 or 1; first offender at row {int(np.argmax(bad))}",
            )
        )
    elif ds.n_events == 0:
        findings.append(Finding("error", "no-events", "every subject is censored"))
    if ds.p and not np.all(np.isfinite(ds.x)):
        findings.append(
            Finding("error", "nonfinite-covariate", "scalar covariates contain NaN or inf")
        )
    if not np.all(np.isfinite(ds.xf)):
        findings.append(
            Finding("error", "nonfinite-curve", "functional covariate curves contain NaN or inf")
        )
    if np.any(np.diff(ds.grid) <= 0.0) or not np.all(np.isfinite(ds.grid)):
        findings.append(
            Finding("error", "bad-grid", "functional grid must be finite and strictly increasing")
        )
    elif ds.grid[0] < 0.0 or ds.grid[-1] > 1.0:
        findings.append(
            Finding("error", "grid-not-unit", "functional grid must be rescaled to [0, 1]")
        )

    if ds.p and np.all(np.isfinite(ds.x)):
        scale = float(np.linalg.norm(ds.x, 2)) if ds.x.size else 0.0
        if scale > 0.0 and np.linalg.matrix_rank(ds.x, tol=1e-8 * scale) < min(ds.n, ds.p):
            findings.append(
                Finding(
                    "warning",
                    "collinear-covariates",
                    "scalar covariate matrix is rank deficient at tolerance 1e-8",
                )
            )
    if ds.n_events > 0 and 1.0 - ds.event_fraction > 0.95:
        findings.append(
            Finding("warning", "heavy-censoring", "more than 95% of subjects are censored")
        )
    return findings


def default_tau(ds: SurvivalDataset) -> float:
    """Smallest integer strictly greater than the largest observed time."""
    top = float(np.max(ds.y))
    if not math.isfinite(top):
        raise ValueError("cannot choose a time horizon with nonfinite observed times")
    c = math.ceil(top)
    return float(c + 1 if c == top else c)
