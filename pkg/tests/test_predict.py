"""Prediction: survival curves, transformation inversion, and residuals."""

import math
import warnings

import numpy as np
import pytest

from fttm.data import default_tau
from fttm.errors import logarithmic
from fttm.optimize import fit
from fttm.params import FttmSpec
from fttm.predict import (
    HorizonError,
    expected_survival,
    h_inverse,
    linear_predictor_at,
    pseudo_residuals,
    survival_at,
)
from fttm.simulate import ScenarioConfig, generate

import reference
from conftest import bare_dataset, shell_fit


def loop_linear_predictor(beta, theta, x_row, xf_values, grid):
    """Plain-arithmetic linear predictor, independent of the package."""
    lp = sum(float(beta[j]) * float(x_row[j]) for j in range(len(beta)))
    z = reference.functional_row(list(xf_values), list(grid), len(theta) - 1)
    lp += sum(float(theta[k]) * z[k] for k in range(len(theta)))
    return lp


@pytest.fixture(scope="module")
def a1_fit():
    """A moderately sized fit shared by round-trip and monotonicity tests."""
    ds, truth = generate(ScenarioConfig("a1", n=200, seed=5))
    spec = FttmSpec(n0=6, n1=3, error=logarithmic(0.0), tau=default_tau(ds), p=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = fit(spec, ds)
    assert result.converged
    return ds, result


@pytest.fixture()
def hazard_shell():
    """Degree-one shell whose transformation matches log(0.2 t) at t = 1, 4.

    A linear H agrees with the log curve at exactly two points; with the
    extreme-value family the survival prediction at those points reduces
    to the closed form exp(-0.2 t e^lp).
    """
    t1, t2 = 1.0, 4.0
    tau = 5.0
    v1, v2 = math.log(0.2 * t1), math.log(0.2 * t2)
    slope = (v2 - v1) / (t2 - t1)
    inter = v1 - slope * t1
    gamma = np.array([inter, inter + slope * tau])
    beta = np.array([-0.5, 0.4])
    theta = np.array([0.3, -0.2, 0.5])
    return shell_fit(gamma, tau, logarithmic(0.0), beta=beta, theta=theta), (t1, t2)


class TestLinearPredictorAt:
    def test_matches_plain_loops(self, hazard_shell):
        fit_, _ = hazard_shell
        rng = np.random.default_rng(31)
        grid = np.linspace(0.0, 1.0, 41)
        x_row = rng.normal(size=2)
        xf_row = rng.normal(size=41)
        got = linear_predictor_at(fit_, x_row, xf_row, grid)
        want = loop_linear_predictor(fit_.params.beta, fit_.params.theta, x_row, xf_row, grid)
        assert isinstance(got, float)
        assert abs(got - want) <= 1e-10 * (1.0 + abs(want))

    def test_stack_matches_single_rows(self, hazard_shell):
        fit_, _ = hazard_shell
        rng = np.random.default_rng(32)
        grid = np.linspace(0.0, 1.0, 21)
        x = rng.normal(size=(4, 2))
        xf = rng.normal(size=(4, 21))
        stacked = linear_predictor_at(fit_, x, xf, grid)
        assert stacked.shape == (4,)
        for i in range(4):
            single = linear_predictor_at(fit_, x[i], xf[i], grid)
            assert abs(stacked[i] - single) <= 1e-12

    def test_wrong_scalar_count_raises(self, hazard_shell):
        fit_, _ = hazard_shell
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError, match="scalar covariates"):
            linear_predictor_at(fit_, np.zeros(3), np.zeros(11), grid)

    def test_profile_count_mismatch_raises(self, hazard_shell):
        fit_, _ = hazard_shell
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError, match="profile count"):
            linear_predictor_at(fit_, np.zeros((3, 2)), np.zeros((4, 11)), grid)

    def test_covariate_free_model(self):
        fit_ = shell_fit([0.0, 5.0], 5.0, logarithmic(0.0), theta=[0.7])
        grid = np.linspace(0.0, 1.0, 11)
        xf = np.ones(11)
        got = linear_predictor_at(fit_, np.zeros(0), xf, grid)
        # integral of a constant curve against the degree-zero basis is one
        assert got == pytest.approx(0.7, abs=1e-12)
        stacked = linear_predictor_at(fit_, np.zeros((3, 0)), np.tile(xf, (3, 1)), grid)
        assert stacked.shape == (3,)


class TestSurvivalAt:
    def test_closed_form_at_interpolation_points(self, hazard_shell):
        fit_, (t1, t2) = hazard_shell
        rng = np.random.default_rng(33)
        grid = np.linspace(0.0, 1.0, 41)
        x_row = rng.normal(size=2)
        xf_row = rng.normal(size=41)
        lp = loop_linear_predictor(fit_.params.beta, fit_.params.theta, x_row, xf_row, grid)
        for t in (t1, t2):
            want = math.exp(-0.2 * t * math.exp(lp))
            got = survival_at(fit_, x_row, xf_row, grid, t)
            assert isinstance(got, float)
            assert abs(got - want) <= 1e-10

    def test_vector_times(self, hazard_shell):
        fit_, (t1, t2) = hazard_shell
        grid = np.linspace(0.0, 1.0, 41)
        x_row = np.array([1.0, -0.3])
        xf_row = np.zeros(41)
        got = survival_at(fit_, x_row, xf_row, grid, np.array([t1, t2]))
        assert got.shape == (2,)
        for k, t in enumerate((t1, t2)):
            assert got[k] == pytest.approx(survival_at(fit_, x_row, xf_row, grid, t), abs=1e-14)

    def test_stacked_profiles(self, hazard_shell):
        fit_, (t1, t2) = hazard_shell
        rng = np.random.default_rng(34)
        grid = np.linspace(0.0, 1.0, 21)
        x = rng.normal(size=(3, 2))
        xf = rng.normal(size=(3, 21))
        matrix = survival_at(fit_, x, xf, grid, np.array([t1, t2]))
        assert matrix.shape == (3, 2)
        column = survival_at(fit_, x, xf, grid, t1)
        assert column.shape == (3,)
        for i in range(3):
            assert matrix[i, 0] == pytest.approx(column[i], abs=1e-14)
            assert matrix[i, 1] == pytest.approx(
                survival_at(fit_, x[i], xf[i], grid, t2), abs=1e-14
            )

    def test_monotone_in_time(self, a1_fit):
        ds, result = a1_fit
        times = np.linspace(0.0, result.spec.tau, 101)
        curve = survival_at(result, ds.x[0], ds.xf[0], ds.grid, times)
        assert np.all(np.diff(curve) <= 1e-12)
        assert np.all((curve >= 0.0) & (curve <= 1.0))

    def test_survival_one_at_origin_when_transform_dives(self):
        fit_ = shell_fit([-35.0, 1.0], 5.0, logarithmic(0.0), theta=[0.0])
        got = survival_at(fit_, np.zeros(0), np.zeros(11), np.linspace(0, 1, 11), 0.0)
        assert got >= 1.0 - 1e-10

    def test_beyond_horizon_raises(self, hazard_shell):
        fit_, _ = hazard_shell
        grid = np.linspace(0.0, 1.0, 11)
        args = (np.zeros(2), np.zeros(11), grid)
        with pytest.raises(HorizonError) as err:
            survival_at(fit_, *args, fit_.spec.tau * 1.0001)
        assert err.value.boundary == fit_.spec.tau
        with pytest.raises(HorizonError) as err:
            survival_at(fit_, *args, -0.1)
        assert err.value.boundary == 0.0
        # endpoints themselves are inside the domain
        survival_at(fit_, *args, 0.0)
        survival_at(fit_, *args, fit_.spec.tau)

    def test_nonfinite_time_raises(self, hazard_shell):
        fit_, _ = hazard_shell
        with pytest.raises(ValueError, match="finite"):
            survival_at(fit_, np.zeros(2), np.zeros(11), np.linspace(0, 1, 11), np.nan)


class TestHInverse:
    def test_linear_transformation_is_identity(self):
        fit_ = shell_fit([0.0, 5.0], 5.0, logarithmic(0.0))
        assert h_inverse(fit_, 0.37) == pytest.approx(0.37, abs=1e-9)
        assert h_inverse(fit_, 0.0) == pytest.approx(0.0, abs=1e-9)
        # query the stored endpoint: the increment round trip can land an
        # ulp below the literal 5.0, which would be out of range
        top = float(fit_.gamma[-1])
        assert h_inverse(fit_, top) == pytest.approx(5.0, abs=1e-9)

    def test_round_trip_on_fitted_model(self, a1_fit):
        _, result = a1_fit
        from fttm.basis import bernstein_matrix

        for t in (0.5, 3.0, 10.0, 25.0):
            v = float(
                (bernstein_matrix(np.array([t / result.spec.tau]), result.spec.n0) @ result.gamma)[0]
            )
            t_rec = h_inverse(result, v)
            v_rec = float(
                (bernstein_matrix(np.array([t_rec / result.spec.tau]), result.spec.n0) @ result.gamma)[0]
            )
            assert abs(v_rec - v) <= 1e-8 * (1.0 + abs(v))

    def test_out_of_range_reports_boundary(self):
        fit_ = shell_fit([-1.0, 1.0], 5.0, logarithmic(0.0))
        with pytest.raises(HorizonError) as err:
            h_inverse(fit_, -1.5)
        assert err.value.boundary == 0.0
        assert "clamp" in str(err.value)
        with pytest.raises(HorizonError) as err:
            h_inverse(fit_, 1.5)
        assert err.value.boundary == 5.0


class TestExpectedSurvival:
    def test_logistic_midpoint(self):
        # logistic errors have mean zero, so a zero linear predictor
        # inverts the transformation at zero: -1 + 2 t = 0 at t = 0.5
        fit_ = shell_fit([-1.0, 1.0], 1.0, logarithmic(1.0), theta=[0.0])
        got = expected_survival(fit_, np.zeros(0), np.zeros(11), np.linspace(0, 1, 11))
        assert got == pytest.approx(0.5, abs=1e-9)

    def test_predicted_survival_at_point_is_family_constant(self, a1_fit):
        ds, result = a1_fit
        t_star = expected_survival(result, ds.x[0], ds.xf[0], ds.grid)
        target = float(result.spec.error.survival(np.array([-result.spec.error.mean()]))[0])
        got = survival_at(result, ds.x[0], ds.xf[0], ds.grid, t_star)
        assert abs(got - target) <= 1e-8

    def test_decreasing_in_linear_predictor(self):
        fit_ = shell_fit([-3.0, 3.0], 10.0, logarithmic(0.0), beta=[1.0], theta=[0.0])
        grid = np.linspace(0.0, 1.0, 11)
        lo = expected_survival(fit_, np.array([0.5]), np.zeros(11), grid)
        hi = expected_survival(fit_, np.array([-0.5]), np.zeros(11), grid)
        assert hi > lo

    def test_out_of_range_reports_boundary(self):
        fit_ = shell_fit([-1.0, 1.0], 5.0, logarithmic(1.0), beta=[1.0], theta=[0.0])
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(HorizonError) as err:
            expected_survival(fit_, np.array([5.0]), np.zeros(11), grid)
        assert err.value.boundary == 0.0
        with pytest.raises(HorizonError) as err:
            expected_survival(fit_, np.array([-5.0]), np.zeros(11), grid)
        assert err.value.boundary == 5.0

    def test_rejects_profile_stack(self, a1_fit):
        ds, result = a1_fit
        with pytest.raises(ValueError, match="single"):
            expected_survival(result, ds.x[:2], ds.xf[:2], ds.grid)


class TestPseudoResiduals:
    def test_unit_value_where_transform_is_zero(self):
        # H(0.5) = 0 and lp = 0, so u = -log S(0) = e^0 = 1 exactly
        fit_ = shell_fit([-1.0, 1.0], 1.0, logarithmic(0.0), theta=[0.0])
        ds = bare_dataset([0.5], [1.0])
        u = pseudo_residuals(fit_, ds)
        assert u.shape == (1,)
        assert u[0] == pytest.approx(1.0, abs=1e-14)

    def test_near_zero_where_survival_is_one(self):
        fit_ = shell_fit([-40.0, -39.0], 1.0, logarithmic(0.0), theta=[0.0])
        ds = bare_dataset([0.5], [0.0])
        u = pseudo_residuals(fit_, ds)
        assert 0.0 <= u[0] <= 1e-10

    def test_caps_underflowing_survival(self):
        fit_ = shell_fit([0.0, 800.0], 1.0, logarithmic(0.0), theta=[0.0])
        ds = bare_dataset([0.999, 0.005], [1.0, 0.0])
        with pytest.warns(UserWarning, match="capped"):
            u = pseudo_residuals(fit_, ds)
        assert u[0] == 700.0
        assert u[1] < 700.0

    def test_scalar_covariate_count_must_match(self, a1_fit):
        _, result = a1_fit
        ds = bare_dataset([0.5, 0.7], [1.0, 0.0])
        with pytest.raises(ValueError, match="scalar covariates"):
            pseudo_residuals(result, ds)

    def test_times_beyond_horizon_raise(self):
        fit_ = shell_fit([-1.0, 1.0], 1.0, logarithmic(0.0), theta=[0.0])
        ds = bare_dataset([0.5, 1.5], [1.0, 0.0])
        with pytest.raises(HorizonError):
            pseudo_residuals(fit_, ds)

    def test_residual_total_matches_event_count(self, a1_fit):
        # with extreme-value errors the likelihood is stationary along a
        # constant shift of the transformation, which forces the summed
        # residuals to equal the event count at the optimum
        ds, result = a1_fit
        u = pseudo_residuals(result, ds)
        assert u.shape == (ds.n,)
        assert abs(u.sum() - result.n_events) <= 1e-4
