"""Fitting: initialization anchors, convergence, and reproducibility."""

import math
import warnings

import numpy as np
import pytest

from fttm.data import SurvivalDataset, default_tau
from fttm.errors import box_cox, logarithmic
from fttm.likelihood import build_workspace, coefficient_log_likelihood
from fttm.optimize import FitError, FitOptions, FttmFit, _fit_from, _survival_quantile, fit, initialize
from fttm.params import FttmSpec
from fttm.simulate import ScenarioConfig, generate

from conftest import a_spec, random_dataset


@pytest.fixture(scope="module")
def a1_fit():
    """One moderately sized scenario fit shared across the module."""
    ds, truth = generate(ScenarioConfig("a1", n=300, seed=7))
    spec = FttmSpec(n0=13, n1=3, error=logarithmic(0.0), tau=default_tau(ds), p=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = fit(spec, ds)
    return ds, truth, spec, result


class TestSurvivalQuantile:
    def test_logistic_median_is_zero(self):
        assert abs(_survival_quantile(logarithmic(1.0), 0.5)) <= 1e-9

    def test_extreme_value_median(self):
        # survival exp(-e^c) = 0.5 at c = log(log 2)
        assert _survival_quantile(logarithmic(0.0), 0.5) == pytest.approx(
            math.log(math.log(2.0)), abs=1e-9
        )

    @pytest.mark.parametrize("fam", [logarithmic(0.0), logarithmic(1.0), logarithmic(2.0), box_cox(1.0)])
    @pytest.mark.parametrize("target", [0.99, 0.9, 0.5, 0.2, 0.03])
    def test_round_trip(self, fam, target):
        c = _survival_quantile(fam, target)
        assert fam.survival(c) == pytest.approx(target, abs=1e-8)


class TestInitialize:
    def test_covariate_effects_start_at_zero(self):
        rng = np.random.default_rng(1)
        ds = random_dataset(rng)
        spec = a_spec(ds, n0=5, n1=3)
        start = initialize(spec, ds)
        assert np.all(start.beta == 0.0) and np.all(start.theta == 0.0)

    @pytest.mark.parametrize("seed", range(8))
    def test_transformation_starts_increasing(self, seed):
        rng = np.random.default_rng(seed)
        ds = random_dataset(rng, n=40, censor_prob=rng.uniform(0.0, 0.9))
        for r in (0.0, 0.5, 1.0, 2.0):
            spec = a_spec(ds, n0=int(rng.integers(1, 14)), n1=2, r=r)
            gamma = initialize(spec, ds).gamma
            assert np.all(np.diff(gamma) > 0.0)

    def test_nearly_all_censored_sample_keeps_distinct_anchors(self):
        rng = np.random.default_rng(4)
        ds = random_dataset(rng, n=60, censor_prob=0.995)
        spec = a_spec(ds)
        gamma = initialize(spec, ds).gamma
        assert np.all(np.diff(gamma) > 0.0)

    def test_anchor_targets(self):
        rng = np.random.default_rng(9)
        ds = random_dataset(rng, n=50, censor_prob=0.3)
        spec = a_spec(ds, r=1.0)
        gamma = initialize(spec, ds).gamma
        fam = spec.error
        assert fam.survival(gamma[0]) == pytest.approx(0.99, abs=1e-8)
        want = min(max(0.01, 1.0 - 0.99 * ds.event_fraction), 0.97)
        assert fam.survival(gamma[-1]) == pytest.approx(want, abs=1e-8)


class TestFitQuality:
    def test_converges_within_budget(self, a1_fit):
        _, _, _, result = a1_fit
        assert result.converged
        assert result.n_iter <= 500
        assert result.grad_max <= 1e-4

    def test_scalar_effects_near_truth(self, a1_fit):
        _, truth, _, result = a1_fit
        assert np.allclose(result.params.beta, truth.beta, atol=0.35)

    def test_likelihood_ascends_from_start(self, a1_fit):
        ds, _, spec, result = a1_fit
        start = initialize(spec, ds)
        ws = build_workspace(spec, ds)
        ll0 = coefficient_log_likelihood(start.beta, start.gamma, start.theta, ws)
        assert result.loglik >= ll0

    def test_transformation_estimate_is_monotone(self, a1_fit):
        # increments are exp(eta) > 0, but an increment below one ulp of
        # gamma is absorbed, so equality of neighbors is possible
        _, _, _, result = a1_fit
        assert np.all(np.diff(result.gamma) >= 0.0)
        assert result.gamma[-1] > result.gamma[0]

    def test_result_bookkeeping(self, a1_fit):
        ds, _, spec, result = a1_fit
        assert isinstance(result, FttmFit)
        assert result.n == ds.n and result.n_events == ds.n_events
        assert result.scalar_names == ds.scalar_names
        assert result.covariance is None
        assert result.aic == pytest.approx(-2.0 * result.loglik + 2.0 * (2 + 13 + 3 + 1))

    def test_estimate_is_stationary(self, a1_fit):
        ds, _, spec, result = a1_fit
        ws = build_workspace(spec, ds)
        _, ll2, _, _, _ = _fit_from(result.params.pack(), ws, FitOptions())
        assert abs(ll2 - result.loglik) <= 1e-8


class TestReproducibility:
    def test_repeated_fit_is_bit_identical(self, a1_fit):
        ds, _, spec, result = a1_fit
        again = fit(spec, ds)
        assert again.loglik == result.loglik
        assert np.array_equal(again.params.pack(), result.params.pack())
        assert again.n_iter == result.n_iter

    def test_row_order_does_not_matter(self, a1_fit):
        ds, _, spec, result = a1_fit
        perm = np.random.default_rng(0).permutation(ds.n)
        shuffled = fit(spec, ds.subset(perm))
        assert shuffled.loglik == pytest.approx(result.loglik, abs=1e-6)
        assert np.allclose(shuffled.params.pack(), result.params.pack(), atol=1e-6)


class TestFailureModes:
    def test_all_censored_raises_fit_error(self):
        rng = np.random.default_rng(2)
        ds = random_dataset(rng, n=30)
        bad = SurvivalDataset(
            y=ds.y, delta=np.zeros(ds.n), x=ds.x, xf=ds.xf, grid=ds.grid
        )
        with pytest.raises(FitError) as err:
            fit(a_spec(bad), bad)
        assert any(f.code == "no-events" for f in err.value.findings)

    def test_tiny_iteration_budget_reports_nonconvergence(self):
        rng = np.random.default_rng(5)
        ds = random_dataset(rng, n=80)
        opts = FitOptions(max_iters=1, n_restarts=0)
        result = fit(a_spec(ds), ds, options=opts)
        assert not result.converged
        assert result.n_iter <= 1

    def test_validation_warnings_are_recorded(self):
        rng = np.random.default_rng(6)
        ds = random_dataset(rng, n=60)
        col = ds.x[:, 0]
        dup = SurvivalDataset(
            y=ds.y, delta=ds.delta, x=np.column_stack([col, col]), xf=ds.xf, grid=ds.grid
        )
        with pytest.warns(UserWarning, match="collinear"):
            result = fit(a_spec(dup), dup, options=FitOptions(max_iters=40, n_restarts=0))
        assert "collinear-covariates" in result.warnings

    def test_options_are_validated(self):
        with pytest.raises(ValueError):
            FitOptions(max_iters=0)
        with pytest.raises(ValueError):
            FitOptions(grad_tol=0.0)
        with pytest.raises(ValueError):
            FitOptions(n_restarts=-1)
