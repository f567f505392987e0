"""Model configuration and the unconstrained parametrization of the sieve.

The time transformation is kept monotone by optimizing over unconstrained
increments: the first coefficient is free and every subsequent coefficient
adds the exponential of a free parameter.  ``gamma_from_eta`` and
``eta_from_gamma`` convert between the two representations and
``increment_jacobian`` supplies the chain-rule factor used by the
likelihood gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ErrorFamily

__all__ = [
    "FttmSpec",
    "RawParams",
    "gamma_from_eta",
    "eta_from_gamma",
    "increment_jacobian",
]

# keeps exp() of an increment parameter finite; the likelihood is
# astronomically bad long before any increment gets here
_ETA_CAP = 700.0


def gamma_from_eta(eta: np.ndarray) -> np.ndarray:
    """Map unconstrained increment parameters to increasing coefficients.

    ``gamma[0] = eta[0]`` and ``gamma[k] = gamma[k-1] + exp(eta[k])`` for
    ``k >= 1``.  The output never decreases; it is strictly increasing
    whenever the increments stay within float64 dynamic range of each
    other (an increment 16 orders of magnitude below its running sum is
    absorbed).
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or eta.size < 2:
        raise ValueError("increment parameters must be a vector of length >= 2")
    gamma = np.empty_like(eta)
    gamma[0] = eta[0]
    np.cumsum(np.exp(np.minimum(eta[1:], _ETA_CAP)), out=gamma[1:])
    gamma[1:] += eta[0]
    return gamma


def eta_from_gamma(gamma: np.ndarray) -> np.ndarray:
    """Inverse of :func:`gamma_from_eta`; requires strictly increasing input."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1 or gamma.size < 2:
        raise ValueError("coefficients must be a vector of length >= 2")
    steps = np.diff(gamma)
    if np.any(steps <= 0.0) or not np.all(np.isfinite(gamma)):
        raise ValueError("coefficients must be finite and strictly increasing")
    eta = np.empty_like(gamma)
    eta[0] = gamma[0]
    eta[1:] = np.log(steps)
    return eta


def increment_jacobian(eta: np.ndarray) -> np.ndarray:
    """Jacobian ``d gamma / d eta`` of :func:`gamma_from_eta`.

    Lower triangular: column 0 is all ones and column ``j >= 1`` equals
    ``exp(eta[j])`` from row ``j`` down.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or eta.size < 2:
        raise ValueError("increment parameters must be a vector of length >= 2")
    d = eta.size
    jac = np.zeros((d, d))
    jac[:, 0] = 1.0
    steps = np.exp(np.minimum(eta[1:], _ETA_CAP))
    for j in range(1, d):
        jac[j:, j] = steps[j - 1]
    return jac


@dataclass(frozen=True)
class FttmSpec:
    """Fixed model configuration for one fit.

    Parameters
    ----------
    n0 : int
        Degree of the time-transformation sieve (``>= 1``).
    n1 : int
        Degree of the functional-coefficient sieve (``>= 0``).
    error : ErrorFamily
        Known error distribution.
    tau : float
        Right endpoint of the modeled time range; must cover every
        observed time.
    p : int
        Number of scalar covariates.
    sieve_bound : float, optional
        Purely diagnostic magnitude bound on sieve coefficients; fits
        warn when the estimate escapes it but nothing is constrained.
    """

    n0: int
    n1: int
    error: ErrorFamily
    tau: float
    p: int = 0
    sieve_bound: float | None = None

    def __post_init__(self):
        if not isinstance(self.n0, (int, np.integer)) or self.n0 < 1:
            raise ValueError(f"transformation degree must be an integer >= 1, got {self.n0!r}")
        if not isinstance(self.n1, (int, np.integer)) or self.n1 < 0:
            raise ValueError(f"functional degree must be an integer >= 0, got {self.n1!r}")
        if not isinstance(self.error, ErrorFamily):
            raise TypeError("error must be an ErrorFamily")
        if not np.isfinite(self.tau) or self.tau <= 0.0:
            raise ValueError(f"time horizon must be positive and finite, got {self.tau!r}")
        if not isinstance(self.p, (int, np.integer)) or self.p < 0:
            raise ValueError(f"scalar covariate count must be an integer >= 0, got {self.p!r}")
        if self.sieve_bound is not None and not self.sieve_bound > 0.0:
            raise ValueError("sieve_bound must be positive when given")
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def dim(self) -> int:
        """Length of the packed free-parameter vector."""
        return self.p + self.n0 + self.n1 + 2


@dataclass(frozen=True, eq=False)
class RawParams:
    """Free parameters of one fit: scalar effects, transformation
    increments, and functional-coefficient loadings."""

    beta: np.ndarray
    eta: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        for name in ("beta", "eta", "theta"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            object.__setattr__(self, name, arr)
        if self.eta.size < 2:
            raise ValueError("increment parameters must have length >= 2")
        if self.theta.size < 1:
            raise ValueError("functional coefficients must have length >= 1")

    @property
    def gamma(self) -> np.ndarray:
        """Increasing transformation coefficients implied by ``eta``."""
        return gamma_from_eta(self.eta)

    def pack(self) -> np.ndarray:
        """Concatenate into a flat vector (scalar, increment, functional order)."""
        return np.concatenate([self.beta, self.eta, self.theta])

    @classmethod
    def unpack(cls, vector: np.ndarray, spec: FttmSpec) -> "RawParams":
        """Split a flat vector laid out as produced by :meth:`pack`."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (spec.dim,):
            raise ValueError(f"expected a vector of length {spec.dim}, got shape {vector.shape}")
        p, k = spec.p, spec.n0 + 1
        return cls(beta=vector[:p], eta=vector[p : p + k], theta=vector[p + k :])

    def matches(self, spec: FttmSpec) -> bool:
        """Whether the block sizes agree with a model configuration."""
        return (
            self.beta.size == spec.p
            and self.eta.size == spec.n0 + 1
            and self.theta.size == spec.n1 + 1
        )
