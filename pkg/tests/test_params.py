"""Unconstrained parametrization of the monotone sieve and model configs."""

import numpy as np
import pytest

from fttm.errors import logarithmic
from fttm.params import (
    FttmSpec,
    RawParams,
    eta_from_gamma,
    gamma_from_eta,
    increment_jacobian,
)


class TestReparametrization:
    def test_round_trip(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            eta = rng.uniform(-10.0, 10.0, int(rng.integers(2, 16)))
            back = eta_from_gamma(gamma_from_eta(eta))
            np.testing.assert_allclose(back, eta, rtol=1e-9, atol=1e-9)

    def test_output_is_strictly_increasing(self):
        # strictness is guaranteed while the increments span less than the
        # float64 significand range (about 16 orders of magnitude)
        rng = np.random.default_rng(4)
        for _ in range(50):
            eta = rng.uniform(-15.0, 15.0, int(rng.integers(2, 20)))
            gamma = gamma_from_eta(eta)
            assert np.all(np.diff(gamma) > 0.0)

    def test_hand_computed_map(self):
        gamma = gamma_from_eta(np.array([-1.0, 0.0, np.log(2.0)]))
        np.testing.assert_allclose(gamma, [-1.0, 0.0, 2.0], atol=1e-15)

    def test_inverse_rejects_non_increasing(self):
        with pytest.raises(ValueError):
            eta_from_gamma(np.array([0.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            eta_from_gamma(np.array([0.0, -1.0]))

    def test_huge_increments_stay_finite(self):
        # a wild increment saturates instead of overflowing; later tiny
        # increments may be absorbed but the sequence never decreases
        gamma = gamma_from_eta(np.array([0.0, 900.0, 1.0]))
        assert np.all(np.isfinite(gamma))
        assert np.all(np.diff(gamma) >= 0.0)


class TestIncrementJacobian:
    def test_structure(self):
        eta = np.array([0.3, -1.0, 2.0, 0.5])
        jac = increment_jacobian(eta)
        assert jac.shape == (4, 4)
        np.testing.assert_array_equal(jac[:, 0], np.ones(4))
        for j in range(1, 4):
            np.testing.assert_array_equal(jac[:j, j], np.zeros(j))
            np.testing.assert_allclose(jac[j:, j], np.exp(eta[j]), rtol=1e-15)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        eta = rng.uniform(-2.0, 2.0, 7)
        jac = increment_jacobian(eta)
        h = 1e-7
        for j in range(7):
            bump = np.zeros(7)
            bump[j] = h
            fd = (gamma_from_eta(eta + bump) - gamma_from_eta(eta - bump)) / (2 * h)
            np.testing.assert_allclose(jac[:, j], fd, rtol=1e-6, atol=1e-9)


class TestFttmSpec:
    def test_dimension_counts_all_blocks(self):
        spec = FttmSpec(n0=4, n1=3, error=logarithmic(0.0), tau=10.0, p=2)
        assert spec.dim == 2 + 4 + 3 + 2

    def test_validation(self):
        err = logarithmic(0.0)
        with pytest.raises(ValueError):
            FttmSpec(n0=0, n1=3, error=err, tau=1.0)
        with pytest.raises(ValueError):
            FttmSpec(n0=4, n1=-1, error=err, tau=1.0)
        with pytest.raises(ValueError):
            FttmSpec(n0=4, n1=3, error=err, tau=0.0)
        with pytest.raises(ValueError):
            FttmSpec(n0=4, n1=3, error=err, tau=1.0, p=-1)
        with pytest.raises(TypeError):
            FttmSpec(n0=4, n1=3, error="logarithmic", tau=1.0)
        with pytest.raises(ValueError):
            FttmSpec(n0=4, n1=3, error=err, tau=1.0, sieve_bound=0.0)


class TestRawParams:
    def test_pack_unpack_round_trip(self):
        spec = FttmSpec(n0=3, n1=2, error=logarithmic(1.0), tau=5.0, p=2)
        rng = np.random.default_rng(8)
        vec = rng.normal(size=spec.dim)
        params = RawParams.unpack(vec, spec)
        assert params.matches(spec)
        np.testing.assert_array_equal(params.pack(), vec)
        assert params.beta.size == 2
        assert params.eta.size == 4
        assert params.theta.size == 3

    def test_gamma_property(self):
        params = RawParams(beta=[], eta=[0.0, 0.0, 0.0], theta=[0.0])
        np.testing.assert_allclose(params.gamma, [0.0, 1.0, 2.0], atol=1e-15)

    def test_unpack_rejects_wrong_length(self):
        spec = FttmSpec(n0=3, n1=2, error=logarithmic(1.0), tau=5.0, p=2)
        with pytest.raises(ValueError):
            RawParams.unpack(np.zeros(spec.dim + 1), spec)

    def test_empty_scalar_block_is_allowed(self):
        params = RawParams(beta=np.array([]), eta=[0.0, 1.0], theta=[0.5])
        assert params.beta.shape == (0,)
        assert params.pack().size == 3
