"""Observed information, ridge-repaired covariance, and Wald-type bands."""

import dataclasses
import warnings

import numpy as np
import pytest
import reference
from conftest import a_spec, random_dataset, random_params

import fttm.inference
from fttm.data import SurvivalDataset, default_tau
from fttm.errors import logarithmic
from fttm.inference import (
    CovarianceEstimate,
    _ridge_inverse,
    estimate_covariance,
    functional_band,
    observed_information,
    transformation_band,
    wald_interval,
    wald_intervals,
)
from fttm.likelihood import coefficient_gradient
from fttm.optimize import FttmFit, fit
from fttm.params import FttmSpec
from fttm.simulate import ScenarioConfig, generate


@pytest.fixture(scope="module")
def small_fit():
    """Scenario fit with covariance attached, shared across the module."""
    ds, _ = generate(ScenarioConfig("a1", n=200, seed=3))
    spec = FttmSpec(n0=4, n1=2, error=logarithmic(0.0), tau=default_tau(ds), p=2)
    result = fit(spec, ds)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        estimate_covariance(result, ds)
    return ds, spec, result


def _shell_fit(spec, params, ds):
    return FttmFit(
        spec=spec,
        params=params,
        loglik=0.0,
        converged=True,
        n_iter=0,
        grad_max=0.0,
        n=ds.n,
        n_events=ds.n_events,
        scalar_names=ds.scalar_names,
    )


class TestObservedInformation:
    def test_recovers_known_curvature(self, monkeypatch):
        rng = np.random.default_rng(12)
        ds = random_dataset(rng, n=25, p=2, m=11)
        spec = a_spec(ds, n0=2, n1=1)
        params = random_params(rng, spec)
        shell = _shell_fit(spec, params, ds)
        dim = spec.p + spec.n0 + 1 + spec.n1 + 1
        m = rng.normal(size=(dim, dim))
        a = m @ m.T + dim * np.eye(dim)
        center = np.concatenate([params.beta, params.gamma, params.theta])

        def linear_score(beta, gamma, theta, ws):
            vec = np.concatenate([beta, gamma, theta])
            return -a @ (vec - center)

        monkeypatch.setattr(fttm.inference, "coefficient_gradient", linear_score)
        info = observed_information(shell, ds)
        assert np.allclose(info, a, atol=1e-6 * np.max(np.abs(a)))

    def test_result_is_exactly_symmetric(self, small_fit):
        ds, _, result = small_fit
        info = observed_information(result, ds)
        assert np.array_equal(info, info.T)

    def test_raw_differences_nearly_symmetric(self, small_fit):
        # replicate the finite-difference loop without the final
        # symmetrization and check the asymmetry it removes is small
        ds, spec, result = small_fit
        from fttm.likelihood import build_workspace

        ws = build_workspace(spec, ds)
        center = np.concatenate([result.params.beta, result.gamma, result.params.theta])
        p, k = spec.p, spec.n0 + 1

        def score(vec):
            return coefficient_gradient(vec[:p], vec[p : p + k], vec[p + k :], ws)

        dim = center.size
        raw = np.empty((dim, dim))
        for j in range(dim):
            h = 1e-5 * max(1.0, abs(center[j]))
            bump = np.zeros(dim)
            bump[j] = h
            raw[:, j] = -(score(center + bump) - score(center - bump)) / (2.0 * h)
        scale = 1.0 + np.max(np.abs(raw))
        assert np.max(np.abs(raw - raw.T)) <= 1e-4 * scale


class TestRidgeInverse:
    def test_diagonal_matrix_inverted_exactly(self):
        cov, ridge = _ridge_inverse(np.diag([4.0, 25.0]))
        assert ridge == 0.0
        assert np.allclose(cov, np.diag([0.25, 0.04]), atol=1e-14)

    def test_barely_indefinite_matrix_gets_a_ridge(self):
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        info = q @ np.diag([2.0, 1.0, -1e-9]) @ q.T
        cov, ridge = _ridge_inverse(0.5 * (info + info.T))
        assert ridge > 0.0
        assert np.all(np.isfinite(cov))

    def test_hopeless_matrix_raises(self):
        with pytest.raises(np.linalg.LinAlgError):
            _ridge_inverse(-np.eye(3))


class TestCovariance:
    def test_matrix_is_symmetric_positive_definite(self, small_fit):
        _, _, result = small_fit
        cov = result.covariance
        assert np.array_equal(cov.matrix, cov.matrix.T)
        assert np.all(np.linalg.eigvalsh(cov.matrix) > 0.0)

    def test_bookkeeping(self, small_fit):
        _, spec, result = small_fit
        cov = result.covariance
        assert isinstance(cov, CovarianceEstimate)
        assert (cov.p, cov.n0, cov.n1) == (spec.p, spec.n0, spec.n1)
        assert cov.pd_repair_applied == (cov.ridge > 0.0)
        assert cov.condition_number >= 1.0
        dim = spec.p + spec.n0 + 1 + spec.n1 + 1
        assert cov.matrix.shape == (dim, dim)
        assert cov.scalar_block.shape == (spec.p, spec.p)
        assert cov.transform_block.shape == (spec.n0 + 1, spec.n0 + 1)
        assert cov.functional_block.shape == (spec.n1 + 1, spec.n1 + 1)

    def test_standard_errors_positive_finite(self, small_fit):
        _, _, result = small_fit
        se = result.covariance.scalar_se
        assert se.shape == (2,)
        assert np.all(np.isfinite(se)) and np.all(se > 0.0)

    def test_estimate_attaches_to_fit(self, small_fit):
        ds, spec, _ = small_fit
        fresh = fit(spec, ds)
        assert fresh.covariance is None
        returned = estimate_covariance(fresh, ds)
        assert fresh.covariance is returned


@pytest.fixture(scope="module")
def toy():
    """All-zero curves with a single-segment transformation: the loading
    direction is exactly flat, so the information is singular and the
    ridge repair must carry the inversion."""
    rng = np.random.default_rng(21)
    n = 500
    times = rng.exponential(1.0, n)
    censor = rng.exponential(2.0, n)
    y = np.minimum(times, censor)
    delta = (times <= censor).astype(float)
    grid = np.linspace(0.0, 1.0, 5)
    ds = SurvivalDataset(
        y=y, delta=delta, x=np.zeros((n, 0)), xf=np.zeros((n, 5)), grid=grid
    )
    spec = FttmSpec(n0=1, n1=0, error=logarithmic(0.0), tau=default_tau(ds), p=0)
    result = fit(spec, ds)
    return ds, spec, result


class TestFlatDirectionToy:
    def test_flat_loading_never_moves(self, toy):
        _, _, result = toy
        assert result.params.theta[0] == 0.0

    def test_ridge_repair_kicks_in(self, toy):
        ds, _, result = toy
        with pytest.warns(UserWarning, match="ridge"):
            cov = estimate_covariance(result, ds)
        assert cov.pd_repair_applied
        assert np.all(np.isfinite(cov.matrix))

    def test_transform_block_matches_reference_curvature(self, toy):
        ds, spec, result = toy
        info = observed_information(result, ds)
        block = info[:2, :2]

        def value(g0, g1):
            return reference.log_likelihood(
                [],
                [g0, g1],
                [float(result.params.theta[0])],
                ds.y.tolist(),
                ds.delta.tolist(),
                [[] for _ in range(ds.n)],
                ds.xf.tolist(),
                ds.grid.tolist(),
                spec.tau,
                "logarithmic",
                0.0,
            )

        g = result.gamma
        hess = np.empty((2, 2))
        h = 1e-4 * np.maximum(1.0, np.abs(g))
        for i in range(2):
            for j in range(2):
                ei = np.eye(2)[i] * h[i]
                ej = np.eye(2)[j] * h[j]
                hess[i, j] = (
                    value(*(g + ei + ej))
                    - value(*(g + ei - ej))
                    - value(*(g - ei + ej))
                    + value(*(g - ei - ej))
                ) / (4.0 * h[i] * h[j])
        assert np.allclose(block, -hess, rtol=0.05)


class TestWaldInterval:
    def test_unit_standard_error(self):
        assert wald_interval(0.0, 1.0) == pytest.approx((-1.96, 1.96))

    def test_zero_standard_error(self):
        assert wald_interval(2.0, 0.0) == (2.0, 2.0)

    def test_textbook_numbers(self):
        lo, hi = wald_interval(0.077, 0.03163)
        assert lo == pytest.approx(0.015, abs=5e-4)
        assert hi == pytest.approx(0.139, abs=5e-4)

    def test_negative_standard_error_rejected(self):
        with pytest.raises(ValueError):
            wald_interval(0.0, -0.1)

    def test_custom_multiplier(self):
        assert wald_interval(1.0, 2.0, z=1.0) == (-1.0, 3.0)

    def test_vectorized_intervals_consistent(self, small_fit):
        _, _, result = small_fit
        est, se, lo, hi = wald_intervals(result)
        assert est.shape == se.shape == lo.shape == hi.shape == (2,)
        np.testing.assert_allclose(lo, est - 1.96 * se)
        np.testing.assert_allclose(hi, est + 1.96 * se)
        assert np.all(lo < est) and np.all(est < hi)

    def test_missing_covariance_is_an_error(self, small_fit):
        ds, spec, _ = small_fit
        bare = fit(spec, ds)
        with pytest.raises(ValueError, match="covariance"):
            wald_intervals(bare)
        with pytest.raises(ValueError, match="covariance"):
            functional_band(bare, np.linspace(0.0, 1.0, 5))


class TestBands:
    def test_band_brackets_the_estimate(self, small_fit):
        _, _, result = small_fit
        s = np.linspace(0.0, 1.0, 9)
        est, se, lo, hi = functional_band(result, s)
        assert est.shape == se.shape == lo.shape == hi.shape == (9,)
        assert np.all(se >= 0.0)
        assert np.all(lo <= est) and np.all(est <= hi)

    def test_transformation_band_at_zero(self, small_fit):
        _, spec, result = small_fit
        est, se, lo, hi = transformation_band(result, 0.0)
        assert est[0] == pytest.approx(result.gamma[0], rel=1e-12)
        want = np.sqrt(result.covariance.matrix[spec.p, spec.p])
        assert se[0] == pytest.approx(want, rel=1e-12)

    def test_zero_block_gives_zero_width(self, small_fit):
        ds, spec, result = small_fit
        dim = result.covariance.matrix.shape[0]
        zeroed = result.covariance.matrix.copy()
        k = spec.p + spec.n0 + 1
        zeroed[k:, :] = 0.0
        zeroed[:, k:] = 0.0
        stub = CovarianceEstimate(
            matrix=zeroed, ridge=0.0, condition_number=1.0, p=spec.p, n0=spec.n0, n1=spec.n1
        )
        twin = dataclasses.replace(result, covariance=stub)
        s = np.linspace(0.0, 1.0, 7)
        est, se, lo, hi = functional_band(twin, s)
        assert np.all(se == 0.0)
        np.testing.assert_array_equal(lo, est)
        np.testing.assert_array_equal(hi, est)

    def test_shared_points_agree_across_grids(self, small_fit):
        _, _, result = small_fit
        coarse = functional_band(result, np.array([0.0, 0.5, 1.0]))
        fine = functional_band(result, np.linspace(0.0, 1.0, 5))
        for c, f in zip(coarse, fine):
            np.testing.assert_array_equal(c, f[[0, 2, 4]])

    def test_band_width_survives_row_shuffles(self, small_fit):
        ds, spec, result = small_fit
        perm = np.random.default_rng(1).permutation(ds.n)
        shuffled = ds.subset(perm)
        refit = fit(spec, shuffled)
        estimate_covariance(refit, shuffled)
        s = np.linspace(0.0, 1.0, 11)
        _, se_a, _, _ = functional_band(result, s)
        _, se_b, _, _ = functional_band(refit, s)
        np.testing.assert_allclose(se_b, se_a, rtol=1e-3)
