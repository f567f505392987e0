"""Shared helpers for the test suite."""

import numpy as np

from fttm.data import SurvivalDataset
from fttm.errors import logarithmic
from fttm.optimize import FttmFit
from fttm.params import FttmSpec, RawParams, eta_from_gamma


def random_dataset(rng, n=50, p=2, m=21, censor_prob=0.3) -> SurvivalDataset:
    """Small synthetic sample with no model structure, for exercising code paths."""
    y = rng.uniform(0.05, 5.0, n)
    delta = (rng.uniform(size=n) > censor_prob).astype(float)
    if delta.sum() == 0:
        delta[int(rng.integers(n))] = 1.0
    x = rng.normal(size=(n, p))
    xf = rng.normal(scale=1.5, size=(n, m))
    grid = np.linspace(0.0, 1.0, m)
    return SurvivalDataset(y=y, delta=delta, x=x, xf=xf, grid=grid)


def random_params(rng, spec: FttmSpec) -> RawParams:
    """Moderate random parameters: an increasing transformation spanning a
    few units and small covariate effects."""
    beta = rng.normal(scale=0.5, size=spec.p)
    gamma = np.cumsum(rng.uniform(0.1, 0.7, spec.n0 + 1)) - 2.0
    theta = rng.normal(scale=0.5, size=spec.n1 + 1)
    return RawParams(beta=beta, eta=eta_from_gamma(gamma), theta=theta)


def a_spec(ds, n0=4, n1=2, r=0.0, tau=None) -> FttmSpec:
    tau = float(np.ceil(ds.y.max()) + 1.0) if tau is None else tau
    return FttmSpec(n0=n0, n1=n1, error=logarithmic(r), tau=tau, p=ds.p)


def shell_fit(gamma, tau, error, beta=(), theta=(0.0,)) -> FttmFit:
    """Assemble an FttmFit with chosen coefficients, bypassing estimation."""
    gamma = np.asarray(gamma, dtype=float)
    theta = np.asarray(theta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    spec = FttmSpec(
        n0=gamma.size - 1,
        n1=theta.size - 1,
        error=error,
        tau=float(tau),
        p=beta.size,
    )
    params = RawParams(beta=beta, eta=eta_from_gamma(gamma), theta=theta)
    return FttmFit(
        spec=spec,
        params=params,
        loglik=0.0,
        converged=True,
        n_iter=0,
        grad_max=0.0,
        n=0,
        n_events=0,
    )


def bare_dataset(y, delta, m=11) -> SurvivalDataset:
    """Covariate-free sample: zero scalar block, flat zero curves."""
    n = len(y)
    return SurvivalDataset(
        y=np.asarray(y, dtype=float),
        delta=np.asarray(delta, dtype=float),
        x=np.zeros((n, 0)),
        xf=np.zeros((n, m)),
        grid=np.linspace(0.0, 1.0, m),
    )
